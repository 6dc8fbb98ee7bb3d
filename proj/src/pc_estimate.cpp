#include <cmath>
#include <limits>
#include <optional>

#include "percolation_internal.hpp"

namespace hyperperc::percolation {

using namespace detail;

namespace {

struct ReachCounts {
  std::uint64_t inner = 0;  // reached depth r
  std::uint64_t outer = 0;  // reached depth 2r
  ReachCounts& operator+=(const ReachCounts& o) {
    inner += o.inner;
    outer += o.outer;
    return *this;
  }
};

// Ratio P(0 <-> depth 2r) / P(0 <-> depth r) at p with its binomial error.
class ReachRatio {
 public:
  ReachRatio(const graphs::Family& family, std::uint64_t r, std::uint64_t n, std::uint64_t seed, unsigned threads)
      : r_(r), n_(n), seed_(seed), threads_(threads) {
    if (family.kind == graphs::FamilyKind::tree) {
      tree_.emplace(family.k, 2 * r);
    } else {
      require(2 * r <= static_cast<std::uint64_t>(std::numeric_limits<int>::max()), "radius too large");
      window_.emplace(graphs::build_window(family, static_cast<int>(2 * r)));
    }
  }

  std::pair<double, double> operator()(double p) const {
    auto parts = run_chunks(n_, threads_, ReachCounts{}, [&](std::uint64_t b, std::uint64_t e, ReachCounts& acc) {
      if (tree_) {
        TreeExplorer ex(*tree_);
        for (std::uint64_t s = b; s < e; ++s) tally(acc, [&](auto visit) { ex.explore(p, seed_, s, visit); });
      } else {
        WindowExplorer ex(*window_);
        for (std::uint64_t s = b; s < e; ++s)
          tally(acc, [&](auto visit) {
            ex.explore(p, seed_, s, window_->root(),
                       [&](Vertex v) { return visit(static_cast<std::uint64_t>(window_->depth(v))); });
          });
      }
    });
    ReachCounts c = reduce(parts);
    if (c.inner == 0) return {0.0, 0.5};
    const double ratio = static_cast<double>(c.outer) / static_cast<double>(c.inner);
    const double se = std::sqrt(std::max(ratio * (1.0 - ratio), 0.25 / static_cast<double>(c.inner)) /
                                static_cast<double>(c.inner));
    return {ratio, se};
  }

 private:
  template <class Run>
  void tally(ReachCounts& acc, Run run) const {
    std::uint64_t deepest = 0;
    run([&](std::uint64_t depth) {
      deepest = std::max(deepest, depth);
      return deepest < 2 * r_;
    });
    if (deepest >= r_) ++acc.inner;
    if (deepest >= 2 * r_) ++acc.outer;
  }

  std::uint64_t r_, n_, seed_;
  unsigned threads_;
  std::optional<TreeLattice> tree_;
  std::optional<GraphWindow> window_;
};

}  // namespace

PcEstimate pc_estimate(const graphs::Family& family, const std::vector<std::uint64_t>& radii,
                       std::uint64_t n_samples, std::uint64_t seed, Exec exec, int bisection_steps) {
  check_samples(n_samples);
  require(!radii.empty(), "at least one radius is required");
  require(bisection_steps >= 1, "bisection_steps must be positive");
  for (auto r : radii) require(r >= 1, "radii must be positive");

  PcEstimate out;
  out.radii = radii;
  out.n_samples = n_samples;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    ReachRatio f(family, radii[i], n_samples, seed + i, exec.threads);
    double lo = 0.0, hi = 1.0;
    for (int step = 0; step < bisection_steps; ++step) {
      const double mid = 0.5 * (lo + hi);
      (f(mid).first < 0.5 ? lo : hi) = mid;
    }
    const double crossing = 0.5 * (lo + hi);
    // Delta method: SE(p*) = SE(ratio) / slope, slope from a symmetric difference.
    const double h = 0.02;
    const double p_hi = std::min(1.0, crossing + h), p_lo = std::max(0.0, crossing - h);
    const double slope = (f(p_hi).first - f(p_lo).first) / (p_hi - p_lo);
    out.crossing.push_back(crossing);
    out.crossing_std_error.push_back(slope > 0.0 ? f(crossing).second / slope : 0.5);
  }

  for (std::size_t i = 1; i < out.crossing.size(); ++i) {
    const double step = out.crossing[i] - out.crossing[i - 1];
    const double first = out.crossing[1] - out.crossing[0];
    if (step * first < 0.0) out.monotone = false;
  }

  if (radii.size() == 1) {
    out.value = out.crossing[0];
    out.ci_half_width = 1.96 * out.crossing_std_error[0];
    return out;
  }
  // Weighted least squares of p*(r) = a + b / r.
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double x = 1.0 / static_cast<double>(radii[i]);
    const double se = std::max(out.crossing_std_error[i], 1e-6);
    const double w = 1.0 / (se * se);
    s0 += w;
    s1 += w * x;
    s2 += w * x * x;
    t0 += w * out.crossing[i];
    t1 += w * x * out.crossing[i];
  }
  const double det = s0 * s2 - s1 * s1;
  require(det > 0.0, "radii must be distinct");
  out.value = (s2 * t0 - s1 * t1) / det;
  out.ci_half_width = 1.96 * std::sqrt(s2 / det);
  return out;
}

}  // namespace hyperperc::percolation
