#include "hyperperc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "hyperperc/errors.hpp"
#include "hyperperc/gromov.hpp"
#include "hyperperc/hypgeom.hpp"
#include "hyperperc/operators.hpp"
#include "hyperperc/oracles.hpp"
#include "hyperperc/percolation.hpp"

namespace hyperperc::verify {

namespace {

using hypgeom::Point;

class Recorder {
 public:
  explicit Recorder(SuiteReport& r) : r_(r) {}
  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    r_.checks.push_back({r_.suite + "." + name, ok, detail});
  }
  // Runs body; any exception fails the check with its message.
  void guarded(const std::string& name, const std::function<std::string()>& body) {
    try {
      const auto msg = body();
      check(name, msg.empty(), msg);
    } catch (const std::exception& e) {
      check(name, false, std::string("exception: ") + e.what());
    }
  }

 private:
  SuiteReport& r_;
};

std::string worst(const char* what, double err, double tol) {
  if (err <= tol) return {};
  std::ostringstream s;
  s << what << " " << err << " exceeds " << tol;
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> p_grid(int k) {
  // 20 points strictly inside (0, 1/(k-1)).
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(i / 21.0 / (k - 1.0));
  return g;
}

void oracles_suite(Recorder& rec, const Options& opt) {
  const bool fault = opt.fault == "oracle-constant";
  rec.guarded("two_point_closed_vs_product", [] {
    double err = 0.0;
    for (int k : {3, 4, 5})
      for (double p : p_grid(k))
        for (int d = 0; d <= 60; ++d)
          err = std::max(err, rel(oracles::tree_two_point(k, p, d), oracles::tree_two_point_product(k, p, d)));
    return worst("max relative error", err, 1e-9);
  });
  rec.guarded("susceptibility_closed_vs_series", [fault] {
    double err = 0.0;
    for (int k : {3, 4, 5})
      for (double p : p_grid(k)) {
        double closed = oracles::tree_susceptibility(k, p);
        if (fault) closed *= 1.0 + 1e-6;
        err = std::max(err, rel(closed, oracles::tree_susceptibility_series(k, p)));
      }
    return worst("max relative error", err, 1e-9);
  });
  rec.guarded("branching_sum_closed_vs_product", [] {
    double err = 0.0;
    for (int k : {3, 4, 5})
      for (double p : p_grid(k))
        for (int n = 1; n <= 50; ++n)
          err = std::max(err, rel(oracles::tree_branching_sum(k, p, n), oracles::tree_branching_sum_product(k, p, n)));
    return worst("max relative error", err, 1e-9);
  });
  rec.guarded("branching_sum_at_most_one", [] {
    double over = 0.0;
    for (int k : {3, 4, 5}) {
      for (double p : p_grid(k))
        for (int n = 1; n <= 50; ++n) over = std::max(over, oracles::tree_branching_sum(k, p, n) - 1.0);
      for (int n = 1; n <= 50; ++n)
        over = std::max(over, std::abs(oracles::tree_branching_sum(k, 1.0 / (k - 1), n) - 1.0));
    }
    return worst("excess over one", over, 1e-12);
  });
  rec.guarded("walk_dp_vs_spectral", [] {
    double err = 0.0;
    for (int k : {3, 4, 5})
      for (double f : {0.2, 0.6, 0.9}) {
        const double p = f / std::sqrt(k - 1.0);
        for (int n = 0; n <= 40; ++n)
          err = std::max(err, std::abs(oracles::tree_walk_two_point(k, p, n) - oracles::tree_walk_two_point_spectral(k, p, n)));
      }
    return worst("max absolute error", err, 1e-9);
  });
  rec.guarded("polygon_convolution_vs_spectral", [] {
    double err = 0.0;
    for (int k : {3, 4, 5}) {
      const double p = 0.5 / std::sqrt(k - 1.0);
      for (int n = 1; n <= 6; ++n)
        err = std::max(err, rel(oracles::tree_polygon(k, p, n, 120).value, oracles::tree_polygon_spectral(k, p, n)));
    }
    return worst("max relative error", err, 1e-7);
  });
  rec.guarded("cluster_pmf_dwass_vs_dp", [] {
    double err = 0.0;
    for (int k : {3, 4})
      for (double p : {0.3, 0.5}) {
        const auto a = oracles::tree_cluster_size_pmf(k, p, 200);
        const auto b = oracles::tree_cluster_size_pmf_dp(k, p, 200);
        for (std::size_t n = 1; n < std::min(a.size(), b.size()); ++n)
          if (b[n] > 1e-200) err = std::max(err, rel(a[n], b[n]));
      }
    return worst("max relative error", err, 1e-9);
  });
  rec.guarded("qq_threshold_attainment", [] {
    double err = 0.0;
    for (int k : {3, 4, 5})
      for (double q : {2.0, 3.0, oracles::kInfinity}) {
        const double p = oracles::tree_thresholds(k, q).p_qq;
        const double e = std::isinf(q) ? 1.0 : (q - 1.0) / q;
        for (int n = 1; n <= 50; ++n)
          err = std::max(err, rel(oracles::tree_two_point(k, p, n), std::pow(k - 1.0, -e * n)));
      }
    return worst("max relative error", err, 1e-12);
  });
}

Point random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> c(dim);
  for (int i = 0; i + 1 < dim; ++i) c[i] = u(rng);
  c.back() = std::exp(u(rng));
  return Point(c);
}

hypgeom::Isometry random_isometry(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> shift(dim - 1), center(dim - 1);
  for (auto& s : shift) s = u(rng);
  for (auto& c : center) c = 3.0 * u(rng);
  return hypgeom::Isometry({hypgeom::Translation{shift}, hypgeom::Dilation{std::vector<double>(dim - 1, 0.0), std::exp(u(rng))},
                            hypgeom::Inversion{center, std::exp(u(rng))}});
}

void geometry_suite(Recorder& rec, const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  rec.guarded("distance_formulas_agree", [&] {
    double err = 0.0;
    for (int dim : {2, 3})
      for (int i = 0; i < 500; ++i) {
        const auto a = random_point(rng, dim), b = random_point(rng, dim);
        err = std::max(err, std::abs(hypgeom::distance(a, b) - hypgeom::distance_arcosh(a, b)));
      }
    return worst("max difference", err, 1e-7);
  });
  rec.guarded("triangle_inequality", [&] {
    double over = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const auto a = random_point(rng, 3), b = random_point(rng, 3), c = random_point(rng, 3);
      over = std::max(over, hypgeom::distance(a, c) - hypgeom::distance(a, b) - hypgeom::distance(b, c));
    }
    return worst("violation", over, 1e-9);
  });
  rec.guarded("isometry_invariance", [&] {
    double err = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const auto g = random_isometry(rng, 3);
      const auto a = random_point(rng, 3), b = random_point(rng, 3);
      const double d = hypgeom::distance(a, b);
      err = std::max(err, std::abs(hypgeom::distance(g(a), g(b)) - d) / std::max(1.0, d));
    }
    return worst("max distortion", err, 1e-7);
  });
  rec.guarded("halfspace_separates_pair", [&] {
    for (int i = 0; i < 1000; ++i) {
      const auto a = random_point(rng, 2), b = random_point(rng, 2);
      if (hypgeom::distance(a, b) < 1e-3) continue;
      const auto h = hypgeom::halfspace(a, b);
      if (!h.contains(a, 1e-9) || h.contains(b, -1e-9)) return std::string("H(a,b) misplaces a or b");
      const auto r = h.reflect(a);
      if (hypgeom::distance(r, b) > 1e-6 * std::max(1.0, hypgeom::distance(a, b)))
        return std::string("reflection does not swap a and b");
    }
    return std::string();
  });
  rec.guarded("normalize_pair", [&] {
    double err = 0.0;
    for (int i = 0; i < 500; ++i) {
      const auto x = random_point(rng, 3), y = random_point(rng, 3);
      const auto g = hypgeom::normalize_pair(x, y);
      err = std::max(err, hypgeom::distance(g(x), Point{0.0, 0.0, 1.0}));
      err = std::max(err, hypgeom::distance(g(y), Point{0.0, 0.0, std::exp(hypgeom::distance(x, y))}));
    }
    return worst("max image error", err, 1e-7);
  });
  rec.guarded("enlarge_toward_contains", [&] {
    for (int i = 0; i < 500; ++i) {
      const auto x = random_point(rng, 2);
      const auto far = geodesic_point(x, hypgeom::IdealPoint({std::sin(i * 1.0)}), 6.0);
      const auto h = hypgeom::halfspace(far, geodesic_point(x, hypgeom::IdealPoint({std::sin(i * 1.0)}), 5.0)).complement();
      const double dx = hypgeom::distance_to_halfspace(x, h);
      if (dx < 3.0) continue;
      const auto big = hypgeom::enlarge_toward(h, x, 2.0);
      if (std::abs(hypgeom::distance_to_halfspace(x, big) - (dx - 2.0)) > 1e-7) return std::string("distance did not drop by 2");
      for (int j = 0; j < 20; ++j) {
        const auto y = random_point(rng, 2);
        if (h.contains(y) && !big.contains(y, 1e-9)) return std::string("H not inside the enlargement");
      }
    }
    return std::string();
  });
}

void magic_suite(Recorder& rec, const Options& opt) {
  rec.guarded("vertical_geodesic_contracts", [] {
    std::vector<Point> v;
    for (int i = 0; i <= 20; ++i) v.push_back(Point{0.0, std::exp(-4.0 * i)});
    gromov::magic_hyperbolic(v, 1.0, 0.25);
    return std::string();
  });
  rec.guarded("singleton_contracts", [] {
    auto r = gromov::magic_hyperbolic({Point{0.3, 2.0}}, 1.0, 0.1);
    return r.selected.size() == 1 ? std::string() : std::string("singleton not selected");
  });
  rec.guarded("random_cloud_contracts", [&] {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> a;
    while (a.size() < 120) {
      Point p{3.0 * u(rng), std::exp(3.0 * u(rng))};
      if (std::all_of(a.begin(), a.end(), [&](const Point& q) { return hypgeom::distance(p, q) >= 0.5; })) a.push_back(p);
    }
    auto r = gromov::magic_hyperbolic(a, 0.5, 0.25);
    for (std::size_t i = 0; i < r.selected.size(); ++i) {
      auto again = gromov::evaluate_witness(a, a[r.selected[i]], r.witnesses[i].halfspaces);
      if (again.leftover != r.witnesses[i].leftover) return std::string("witness leftover not reproducible");
    }
    return std::string();
  });
  rec.guarded("tiling_graph_contracts", [] {
    auto w = graphs::build_tiling(3, 7, 3);
    graphs::VertexSet all(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) all[i] = static_cast<graphs::Vertex>(i);
    gromov::magic_graph(w, all, 0.3);
    return std::string();
  });
}

void percolation_suite(Recorder& rec, const Options& opt) {
  rec.guarded("tree_two_point_vs_exact", [&] {
    const auto w = graphs::build_tree(3, 6);
    std::vector<std::pair<graphs::Vertex, graphs::Vertex>> pairs;
    std::vector<int> dist;
    const auto bfs = graphs::bfs_distances(w, 0);
    for (int d = 1; d <= 3; ++d)
      for (std::size_t v = 0; v < w.size(); ++v)
        if (bfs[v] == d) {
          pairs.push_back({0, static_cast<graphs::Vertex>(v)});
          dist.push_back(d);
          break;
        }
    const auto est = percolation::two_point_estimate(w, 0.6, pairs, 20'000, opt.seed);
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double exact = std::pow(0.6, dist[i]);
      if (std::abs(est[i].value - exact) > 4.0 * est[i].std_error + 1e-12) return std::string("estimate off by > 4 SE");
    }
    return std::string();
  });
  rec.guarded("tree_susceptibility_vs_exact", [&] {
    const percolation::TreeLattice t(3, 200);
    const auto e = percolation::susceptibility_estimate(t, 0.3, 20'000, opt.seed);
    const double exact = oracles::tree_susceptibility(3, 0.3);
    return worst("deviation in SE units", std::abs(e.value - exact) / e.std_error, 4.0);
  });
  rec.guarded("thread_count_invariance", [&] {
    const auto w = graphs::build_tiling(3, 7, 4);
    const auto a = percolation::susceptibility_estimate(w, 0.3, 0, 5'000, opt.seed, {1});
    const auto b = percolation::susceptibility_estimate(w, 0.3, 0, 5'000, opt.seed, {4});
    return a.value == b.value && a.std_error == b.std_error ? std::string() : std::string("results differ by thread count");
  });
}

void operators_suite(Recorder& rec, const Options& opt) {
  rec.guarded("cheeger_sandwich", [] {
    auto w = std::make_shared<const graphs::GraphWindow>(graphs::build_tree(3, 2));
    for (double p : {0.2, 0.4, 0.6})
      if (!operators::cheeger_sandwich_check(operators::exact_tree_tmatrix(w, p)).holds())
        return std::string("sandwich fails at some p");
    return std::string();
  });
  rec.guarded("norm_duality", [] {
    auto w = std::make_shared<const graphs::GraphWindow>(graphs::build_tree(3, 4));
    const auto t = operators::exact_tree_tmatrix(w, 0.4);
    const double a = operators::norm_q(t, 1.5).value, b = operators::norm_q(t, 3.0).value;
    return worst("relative gap", std::abs(a - b) / a, 1e-6);
  });
  rec.guarded("riesz_thorin", [&] {
    auto w = std::make_shared<const graphs::GraphWindow>(graphs::build_tiling(3, 7, 2));
    const auto t = operators::mc_tmatrix(w, 0.3, 2'000, opt.seed);
    for (double q : {1.25, 1.5, 2.0})
      if (!operators::riesz_thorin_check(t, q).holds) return std::string("bound fails");
    return std::string();
  });
  rec.guarded("exact_tree_norm_vs_symbol_bound", [] {
    // The windowed norm is below the infinite-tree value T^(2 sqrt(k-1)).
    auto w = std::make_shared<const graphs::GraphWindow>(graphs::build_tree(3, 8));
    const double n2 = operators::norm_2(operators::exact_tree_tmatrix(w, 0.4)).value;
    const double inf = oracles::tree_tp_symbol(3, 0.4, 2.0 * std::sqrt(2.0));
    return n2 <= inf * (1.0 + 1e-9) && n2 > 0.8 * inf ? std::string() : std::string("windowed norm out of range");
  });
}

using SuiteFn = void (*)(Recorder&, const Options&);
struct Entry {
  const char* name;
  SuiteFn fn;
};
constexpr Entry kSuites[] = {{"oracles", oracles_suite},
                             {"geometry", geometry_suite},
                             {"magic", magic_suite},
                             {"percolation", percolation_suite},
                             {"operators", operators_suite}};

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : kSuites) n.emplace_back(e.name);
    return n;
  }();
  return names;
}

std::vector<SuiteReport> run(const std::string& suite, const Options& options) {
  if (options.fault && *options.fault != "oracle-constant")
    throw InvalidArgument("unknown fault '" + *options.fault + "'");
  std::vector<SuiteReport> out;
  bool found = false;
  for (const auto& e : kSuites) {
    if (suite != "all" && suite != e.name) continue;
    found = true;
    SuiteReport r;
    r.suite = e.name;
    const auto t0 = std::chrono::steady_clock::now();
    Recorder rec(r);
    e.fn(rec, options);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  if (!found) throw InvalidArgument("unknown suite '" + suite + "'");
  return out;
}

nlohmann::json to_json(const std::vector<SuiteReport>& reports) {
  nlohmann::json suites = nlohmann::json::array();
  std::vector<std::string> failed;
  bool all = true;
  for (const auto& r : reports) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      if (!c.passed) failed.push_back(c.name);
    }
    all = all && r.passed();
    suites.push_back({{"suite", r.suite}, {"passed", r.passed()}, {"seconds", r.seconds}, {"checks", checks}});
  }
  return {{"passed", all}, {"failed", failed}, {"suites", suites}};
}

}  // namespace hyperperc::verify
