#include <algorithm>
#include <cmath>

#include "hyperperc/errors.hpp"
#include "hyperperc/operators.hpp"
#include "hyperperc/oracles.hpp"

namespace hyperperc::operators {

CriterionTable criterion_evaluate(const graphs::Family& family, const std::vector<double>& p_grid,
                                  int window_radius, std::uint64_t n_samples, std::uint64_t seed,
                                  const CriterionOptions& options) {
  require(!p_grid.empty(), "p_grid must be nonempty");
  require(window_radius >= 0, "window radius must be non-negative");
  for (double p : p_grid) require(p >= 0.0 && p < 1.0, "every p must lie in [0, 1)");
  const bool tree = family.kind == graphs::FamilyKind::tree;

  CriterionTable table;
  table.family = family.name();
  table.window_radius = window_radius;
  table.n_samples = tree ? 0 : n_samples;
  table.seed = seed;
  auto w = std::make_shared<const GraphWindow>(graphs::build_window(family, window_radius));

  if (options.pc) {
    table.pc_hat = *options.pc;
    table.pc_source = "given";
  } else if (tree) {
    table.pc_hat = oracles::tree_thresholds(family.k).p_c;
    table.pc_source = "exact";
  } else {
    auto est = percolation::pc_estimate(family, options.pc_radii, options.pc_samples, seed, options.exec);
    table.pc_hat = est.value;
    table.pc_ci_half_width = est.ci_half_width;
    table.pc_source = est.monotone ? "estimated" : "estimated-nonmonotone";
  }
  table.adjacency_norm = adjacency_norm(*w).value;
  if (tree) table.adjacency_norm_infinite = 2.0 * std::sqrt(family.k - 1.0);

  for (double p : p_grid) {
    TwoPointMatrix t = tree ? exact_tree_tmatrix(w, p) : mc_tmatrix(w, p, n_samples, seed, options.exec);
    CriterionRow row;
    row.p = p;
    row.window_vertices = t.size();
    const auto rows = t.apply(std::vector<double>(t.size(), 1.0));
    const auto arg = std::max_element(rows.begin(), rows.end()) - rows.begin();
    row.chi_bar = rows[arg];
    row.chi_bar_std_error = t.row_sum_std_error()[arg];
    const auto io = iota(t);
    row.iota_upper = io.value;
    row.iota_exact = io.exact;
    row.escape_factor = std::sqrt(std::max(0.0, 1.0 - io.value * io.value));
    row.adjacency_norm = table.adjacency_norm;
    row.pc_hat = table.pc_hat;
    row.product = (table.pc_hat - p) / (1.0 - p) * row.chi_bar * row.escape_factor * row.adjacency_norm;
    row.product_std_error = row.chi_bar > 0.0 ? std::abs(row.product) * row.chi_bar_std_error / row.chi_bar : 0.0;
    row.below_one = row.product < 1.0;
    table.rows.push_back(row);
  }
  return table;
}

ExpansionReport expansion_inequality_check(int k, double p1, double p2, int d_max) {
  require(k >= 3, "tree degree must be at least 3");
  require(p1 >= 0.0 && p1 <= p2 && p2 < 1.0, "need 0 <= p1 <= p2 < 1");
  require(d_max >= 0, "d_max must be non-negative");
  ExpansionReport r;
  r.k = k;
  r.p1 = p1;
  r.p2 = p2;
  r.alpha = (p2 - p1) / (1.0 - p1);
  const double edge = 2.0 * std::sqrt(k - 1.0);
  const double denom = 1.0 - p1 * edge + (k - 1.0) * p1 * p1;
  const double symbol = denom > 0.0 ? (1.0 - p1 * p1) / denom : oracles::kInfinity;
  r.growth_ratio = r.alpha > 0.0 ? r.alpha * edge * symbol : 0.0;
  r.divergent = r.growth_ratio >= 1.0;

  for (int d = 0; d <= d_max; ++d) {
    r.lower.push_back(std::pow(p1, d));
    r.middle.push_back(std::pow(p2, d));
  }
  r.lower_holds = true;
  for (int d = 0; d <= d_max; ++d) r.lower_holds = r.lower_holds && r.lower[d] <= r.middle[d];
  if (r.divergent) {
    r.upper_holds = true;
    return r;
  }

  // Radial series sum_m (alpha T A)^m T, truncated at distance D.
  const int D = d_max + 150;
  oracles::Radial f(D + 1);
  for (int d = 0; d <= D; ++d) f[d] = std::pow(p1, d);
  oracles::Radial term = f, sum = f;
  r.terms = 1;
  const double tail_factor = r.growth_ratio > 0.0 ? r.growth_ratio / (1.0 - r.growth_ratio) : 0.0;
  while (r.alpha > 0.0 && r.terms < 20'000) {
    oracles::Radial a(D + 1, 0.0);
    for (int d = 0; d <= D; ++d) {
      const double out = d + 1 <= D ? term[d + 1] : 0.0;
      a[d] = d == 0 ? k * out : term[d - 1] + (k - 1.0) * out;
    }
    term = oracles::radial_convolve(k, f, a, D);
    for (double& v : term) v *= r.alpha;
    for (int d = 0; d <= D; ++d) sum[d] += term[d];
    ++r.terms;
    double head = 0.0;
    for (int d = 0; d <= d_max; ++d) head = std::max(head, term[d]);
    if (head * tail_factor < 1e-12 && head < 1e-12) break;
  }
  r.upper.assign(sum.begin(), sum.begin() + d_max + 1);
  r.upper_holds = true;
  for (int d = 0; d <= d_max; ++d) r.upper_holds = r.upper_holds && r.middle[d] <= r.upper[d] * (1.0 + 1e-12);
  return r;
}

}  // namespace hyperperc::operators
