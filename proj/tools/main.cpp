// hyperperc: JSON config in, CSV (or JSON) out.
//
// Exit codes: 0 success, 1 verify failure, 2 bad input, 3 contract
// violation, 4 resource guard.

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "hyperperc/errors.hpp"
#include "hyperperc/graphs.hpp"
#include "hyperperc/gromov.hpp"
#include "hyperperc/operators.hpp"
#include "hyperperc/percolation.hpp"
#include "hyperperc/serialize.hpp"
#include "hyperperc/verify.hpp"

using namespace hyperperc;
using io::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, bool needs_config = true) {
  auto* opt = sub->add_option("--config", c.config, "JSON config file");
  if (needs_config) opt->required();
  sub->add_option("--out", c.out, "output file (default: the config's \"out\" field, else stdout)");
  sub->add_option("--threads", c.threads, "worker threads (0 = hardware concurrency)");
  sub->add_option("--seed", c.seed, "seed, overriding the config");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(cells);
  }
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  std::string str() const {
    std::ostringstream s;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
      s << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// Loaded config with the seed resolved.
struct Loaded {
  json cfg;
  std::uint64_t seed = 0;
  std::string out;
};

Loaded load(const Common& c, bool seed_required = true) {
  Loaded l;
  l.cfg = io::read_json_file(c.config);
  if (!l.cfg.is_object()) throw InvalidArgument("config must be a JSON object");
  if (c.seed) l.cfg["seed"] = *c.seed;
  if (seed_required || l.cfg.contains("seed")) l.seed = io::integer_field(l.cfg, "seed");
  l.out = c.out;
  if (l.out.empty() && l.cfg.contains("out")) {
    if (!l.cfg["out"].is_string()) throw InvalidArgument("field 'out' must be a string");
    l.out = l.cfg["out"].get<std::string>();
  }
  percolation::set_default_threads(c.threads);
  return l;
}

void emit(const Loaded& l, const std::string& experiment, const std::string& text, std::size_t rows) {
  if (l.out.empty()) {
    std::cout << text;
    return;
  }
  io::write_text_file(l.out, text);
  json record = {{"experiment", experiment}, {"config_hash", fnv1a(l.cfg.dump())}, {"seed", l.seed}, {"rows", rows}};
  io::write_text_file(l.out + ".record.json", record.dump(2) + "\n");
}

double check_p(double p, const std::string& name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("field '" + name + "' must lie in [0, 1], got " + fmt(p));
  return p;
}

std::vector<double> p_values(const json& cfg) {
  if (cfg.contains("p_grid")) {
    const json& g = cfg["p_grid"];
    if (!g.is_array() || g.empty()) throw InvalidArgument("field 'p_grid' must be a nonempty array");
    std::vector<double> out;
    for (const auto& v : g) {
      if (!v.is_number()) throw InvalidArgument("field 'p_grid' must hold numbers");
      out.push_back(check_p(v.get<double>(), "p_grid"));
    }
    return out;
  }
  return {check_p(io::number_field(cfg, "p"), "p")};
}

std::uint64_t samples(const json& cfg) {
  const auto n = io::integer_field(cfg, "n_samples");
  if (n == 0) throw InvalidArgument("field 'n_samples' must be at least 1");
  if (n > percolation::kMaxSamples) throw ResourceLimit("field 'n_samples' exceeds the 10^9 guard");
  return n;
}

int radius_of(const json& cfg) {
  const auto r = io::integer_field(cfg, "R");
  if (r > 100'000) throw ResourceLimit("field 'R' is beyond any window that fits the vertex guard");
  return static_cast<int>(r);
}

graphs::GraphWindow window_of(const json& cfg) {
  if (cfg.contains("window_file")) {
    if (!cfg["window_file"].is_string()) throw InvalidArgument("field 'window_file' must be a string");
    return io::window_from_json(io::read_json_file(cfg["window_file"].get<std::string>()));
  }
  return graphs::build_window(io::family_from_json(io::field(cfg, "family")), radius_of(cfg));
}

// Estimator entries are either "name" or {"name": ..., params...}.
std::pair<std::string, json> estimator_entry(const json& e) {
  if (e.is_string()) return {e.get<std::string>(), json::object()};
  if (e.is_object() && e.contains("name") && e["name"].is_string()) return {e["name"].get<std::string>(), e};
  throw InvalidArgument("field 'estimators' entries must be names or objects with a 'name'");
}

std::uint64_t opt_uint(const json& j, const std::string& name, std::uint64_t fallback) {
  return j.contains(name) ? io::integer_field(j, name) : fallback;
}
double opt_number(const json& j, const std::string& name, double fallback) {
  return j.contains(name) ? io::number_field(j, name) : fallback;
}

const json& estimators_of(const json& cfg) {
  const json& e = io::field(cfg, "estimators");
  if (!e.is_array() || e.empty()) throw InvalidArgument("field 'estimators' must be a nonempty array");
  return e;
}

// First vertex at each depth 1..max_d from the root.
std::vector<std::pair<graphs::Vertex, int>> depth_representatives(const graphs::GraphWindow& w, int max_d) {
  std::vector<std::pair<graphs::Vertex, int>> out;
  for (int d = 1; d <= max_d; ++d)
    for (std::size_t v = 0; v < w.size(); ++v)
      if (w.depth(static_cast<graphs::Vertex>(v)) == d) {
        out.push_back({static_cast<graphs::Vertex>(v), d});
        break;
      }
  return out;
}

int cmd_generate(const Common& c) {
  auto l = load(c, false);
  auto w = window_of(l.cfg);
  emit(l, "generate", io::to_json(w).dump() + "\n", 1);
  return 0;
}

int cmd_percolate(const Common& c) {
  auto l = load(c);
  const auto ps = p_values(l.cfg);
  const auto n = samples(l.cfg);
  const auto& ests = estimators_of(l.cfg);
  auto w = window_of(l.cfg);
  const std::string R = std::to_string(w.radius());
  const std::string seed = std::to_string(l.seed);
  Csv csv({"estimator", "params", "p", "value", "std_error", "boundary_touch_fraction", "n_samples", "seed", "window_R"});
  auto put = [&](const std::string& name, const std::string& params, double p, const percolation::Estimate& e) {
    csv.row({name, params, fmt(p), fmt(e.value), fmt(e.std_error), fmt(e.boundary_touch_fraction),
             std::to_string(e.n_samples ? e.n_samples : n), seed, R});
  };
  for (double p : ps) {
    for (const auto& entry : ests) {
      const auto [name, par] = estimator_entry(entry);
      if (name == "two_point") {
        const int max_d = static_cast<int>(opt_uint(par, "max_distance", std::min(3, w.radius())));
        std::vector<std::pair<graphs::Vertex, graphs::Vertex>> pairs;
        const auto reps = depth_representatives(w, max_d);
        for (auto [v, d] : reps) pairs.push_back({w.root(), v});
        const auto est = percolation::two_point_estimate(w, p, pairs, n, l.seed);
        for (std::size_t i = 0; i < est.size(); ++i) put(name, "d=" + std::to_string(reps[i].second), p, est[i]);
      } else if (name == "susceptibility") {
        const auto v = static_cast<graphs::Vertex>(opt_uint(par, "vertex", 0));
        put(name, "v=" + std::to_string(v), p, percolation::susceptibility_estimate(w, p, v, n, l.seed));
      } else if (name == "kappa") {
        const int nd = static_cast<int>(opt_uint(par, "n_dist", std::min(3, w.radius())));
        const auto k = percolation::kappa_estimate(w, p, nd, n, l.seed);
        put(name, "n_dist=" + std::to_string(nd) + ";argmin=" + std::to_string(k.argmin_distance), p, k.estimate);
      } else if (name == "cluster_tail") {
        const auto n_max = opt_uint(par, "n_max", 1000);
        const auto v = static_cast<graphs::Vertex>(opt_uint(par, "vertex", 0));
        const auto tc = percolation::cluster_tail(w, p, v, n_max, n, l.seed);
        for (const auto& pt : tc.points)
          put(name, "n=" + std::to_string(pt.n), p, {pt.probability, pt.std_error, tc.n_samples, tc.boundary_touch_fraction});
      } else if (name == "walk_two_point") {
        const int steps = static_cast<int>(opt_uint(par, "steps", 4));
        put(name, "steps=" + std::to_string(steps), p, percolation::walk_two_point_estimate(w, p, steps, n, l.seed));
      } else if (name == "susceptibility_derivative") {
        const double h = opt_number(par, "h", 0.02);
        const auto d = percolation::susceptibility_derivative_check(w, p, h, n, l.seed);
        const std::string hp = "h=" + fmt(h);
        const double touch = d.susceptibility.boundary_touch_fraction;
        put(name, hp + ";quantity=derivative", p, {d.derivative, d.derivative_std_error, n, touch});
        put(name, hp + ";quantity=chi", p, d.susceptibility);
        put(name, hp + ";quantity=ratio", p, {d.ratio, d.chi_squared > 0 ? d.derivative_std_error / d.chi_squared : 0.0, n, touch});
      } else if (name == "halfspace_mass") {
        const auto v = static_cast<graphs::Vertex>(opt_uint(par, "vertex", 0));
        const auto h = io::halfspace_from_json(io::field(par, "halfspace"));
        const auto m = percolation::halfspace_cluster_mass(w, p, v, h, n, l.seed);
        put(name, "v=" + std::to_string(v) + ";dist=" + fmt(m.distance), p, m.mass);
      } else {
        throw InvalidArgument("field 'estimators' has unknown estimator '" + name + "'");
      }
    }
  }
  // p_c is a property of the family, not of one p.
  for (const auto& entry : ests) {
    const auto [name, par] = estimator_entry(entry);
    if (name != "pc") continue;
    std::vector<std::uint64_t> radii = {2, 3};
    if (par.contains("radii")) radii = par["radii"].get<std::vector<std::uint64_t>>();
    const auto est = percolation::pc_estimate(w.family(), radii, n, l.seed);
    std::string rs;
    for (auto r : radii) rs += (rs.empty() ? "" : "/") + std::to_string(r);
    put(name, "radii=" + rs + (est.monotone ? "" : ";nonmonotone"), std::nan(""), {est.value, est.ci_half_width / 1.96, n, 0.0});
  }
  emit(l, "percolate", csv.str(), csv.size());
  return 0;
}

int cmd_norms(const Common& c) {
  auto l = load(c);
  const auto& ests = estimators_of(l.cfg);
  auto w = std::make_shared<const graphs::GraphWindow>(window_of(l.cfg));
  const std::string R = std::to_string(w->radius()), seed = std::to_string(l.seed);
  std::vector<double> q_list = {2.0};
  if (l.cfg.contains("q_list")) {
    q_list = l.cfg["q_list"].get<std::vector<double>>();
    for (double q : q_list)
      if (!(q > 1.0 && std::isfinite(q))) throw InvalidArgument("field 'q_list' entries must lie in (1, inf)");
  }
  std::string source = w->family().kind == graphs::FamilyKind::tree ? "exact" : "mc";
  if (l.cfg.contains("matrix")) source = l.cfg["matrix"].get<std::string>();
  if (source != "exact" && source != "mc") throw InvalidArgument("field 'matrix' must be \"exact\" or \"mc\"");
  const std::uint64_t n = source == "mc" ? samples(l.cfg) : 0;

  std::vector<std::pair<double, operators::TwoPointMatrix>> mats;
  if (l.cfg.contains("matrix_file")) {
    const json m = io::read_json_file(l.cfg["matrix_file"].get<std::string>());
    const auto size = io::integer_field(m, "n");
    mats.emplace_back(opt_number(m, "p", 0.0),
                      operators::TwoPointMatrix::from_dense(io::field(m, "entries").get<std::vector<double>>(), size));
  } else {
    for (double p : p_values(l.cfg))
      mats.emplace_back(p, source == "exact" ? operators::exact_tree_tmatrix(w, p) : operators::mc_tmatrix(w, p, n, l.seed));
  }

  Csv csv({"quantity", "q", "p", "value", "residual", "converged", "n_samples", "seed", "window_R"});
  auto put = [&](const std::string& q_name, double q, double p, double value, double residual, bool conv) {
    csv.row({q_name, fmt(q), fmt(p), fmt(value), fmt(residual), conv ? "1" : "0", std::to_string(n), seed, R});
  };
  const double nan = std::nan("");
  for (const auto& [p, t] : mats) {
    for (const auto& entry : ests) {
      const auto [name, par] = estimator_entry(entry);
      if (name == "norm_1") {
        put(name, 1.0, p, operators::norm_1(t), 0.0, true);
      } else if (name == "norm_2") {
        const auto r = operators::norm_2(t);
        put(name, 2.0, p, r.value, r.residual, r.converged);
      } else if (name == "norm_q") {
        for (double q : q_list) {
          const auto r = operators::norm_q(t, q);
          put(name, q, p, r.value, r.residual, r.converged);
        }
      } else if (name == "triangle") {
        put(name, nan, p, operators::triangle(t), 0.0, true);
      } else if (name == "polygon") {
        const int len = static_cast<int>(opt_uint(par, "n", 4));
        put("polygon(n=" + std::to_string(len) + ")", nan, p, operators::polygon(t, 0, len), 0.0, true);
      } else if (name == "growth_rate") {
        const int len = static_cast<int>(opt_uint(par, "n_max", 200));
        put("growth_rate(n=" + std::to_string(len) + ")", nan, p, operators::growth_rate(t, {0}, len), 0.0, true);
      } else if (name == "iota") {
        const auto r = operators::iota(t);
        put(r.exact ? "iota" : "iota_upper", nan, p, r.value, 0.0, r.exact);
      } else if (name == "adjacency_norm") {
        const auto r = operators::adjacency_norm(*w);
        put(name, 2.0, p, r.value, r.residual, r.converged);
      } else if (name == "riesz_thorin") {
        for (double q : q_list) {
          if (q > 2.0) continue;
          const auto r = operators::riesz_thorin_check(t, q);
          put("riesz_thorin_bound", q, p, r.bound, r.bound - r.norm_q, r.holds && r.converged);
        }
      } else {
        throw InvalidArgument("field 'estimators' has unknown estimator '" + name + "'");
      }
    }
  }
  emit(l, "norms", csv.str(), csv.size());
  return 0;
}

int cmd_sweep(const Common& c) {
  auto l = load(c);
  const auto family = io::family_from_json(io::field(l.cfg, "family"));
  const int radius = radius_of(l.cfg);
  const auto ps = p_values(l.cfg);
  for (double p : ps)
    if (p >= 1.0) throw InvalidArgument("field 'p_grid' entries must be below 1");
  const std::uint64_t n = family.kind == graphs::FamilyKind::tree ? opt_uint(l.cfg, "n_samples", 0) : samples(l.cfg);
  operators::CriterionOptions opt;
  if (l.cfg.contains("pc")) opt.pc = check_p(io::number_field(l.cfg, "pc"), "pc");
  if (l.cfg.contains("pc_radii")) opt.pc_radii = l.cfg["pc_radii"].get<std::vector<std::uint64_t>>();
  opt.pc_samples = opt_uint(l.cfg, "pc_samples", opt.pc_samples);
  const auto table = operators::criterion_evaluate(family, ps, radius, n, l.seed, opt);
  Csv csv({"family", "p", "chi_bar", "chi_bar_std_error", "iota", "iota_exact", "escape_factor", "adjacency_norm",
           "pc_hat", "pc_ci_half_width", "pc_source", "product", "product_std_error", "below_one", "window_vertices",
           "n_samples", "seed", "window_R"});
  for (const auto& r : table.rows)
    csv.row({table.family, fmt(r.p), fmt(r.chi_bar), fmt(r.chi_bar_std_error), fmt(r.iota_upper), r.iota_exact ? "1" : "0",
             fmt(r.escape_factor), fmt(r.adjacency_norm), fmt(r.pc_hat), fmt(table.pc_ci_half_width), table.pc_source,
             fmt(r.product), fmt(r.product_std_error), r.below_one ? "1" : "0", std::to_string(r.window_vertices),
             std::to_string(table.n_samples), std::to_string(l.seed), std::to_string(radius)});
  emit(l, "sweep", csv.str(), csv.size());
  return 0;
}

int cmd_magic(const Common& c) {
  auto l = load(c, false);
  const double eps = io::number_field(l.cfg, "epsilon");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("field 'epsilon' must lie in (0, 1)");
  json out;
  json wit = json::array();
  if (l.cfg.contains("points")) {
    std::vector<hypgeom::Point> pts;
    for (const auto& p : l.cfg["points"]) pts.push_back(io::point_from_json(p));
    const double sep = io::number_field(l.cfg, "c");
    const auto r = gromov::magic_hyperbolic(pts, sep, eps);
    for (const auto& w : r.witnesses) wit.push_back(io::to_json(w));
    out = {{"selected", r.selected}, {"witnesses", wit}, {"delta", r.params.delta}, {"s", r.params.s},
           {"n_bound", r.params.n_bound}};
  } else {
    const auto w = window_of(l.cfg);
    graphs::VertexSet a;
    if (l.cfg.contains("vertices")) {
      a = l.cfg["vertices"].get<graphs::VertexSet>();
      std::sort(a.begin(), a.end());
    } else {
      for (std::size_t v = 0; v < w.size(); ++v) a.push_back(static_cast<graphs::Vertex>(v));
    }
    const auto r = gromov::magic_graph(w, a, eps);
    for (const auto& x : r.witnesses) wit.push_back(io::to_json(x));
    out = {{"selected", r.selected}, {"witnesses", wit}, {"delta", r.delta}, {"n_bound", r.n_bound},
           {"unit_ball_count", r.unit_ball_count}};
  }
  emit(l, "magic", out.dump(2) + "\n", out["selected"].size());
  return 0;
}

int cmd_verify(const Common& c, const std::string& suite, const std::optional<std::string>& fault) {
  percolation::set_default_threads(c.threads);
  verify::Options opt;
  if (c.seed) opt.seed = *c.seed;
  opt.fault = fault;
  const auto reports = verify::run(suite, opt);
  const json j = verify::to_json(reports);
  const std::string text = j.dump(2) + "\n";
  if (c.out.empty()) std::cout << text;
  else io::write_text_file(c.out, text);
  for (const auto& name : j["failed"]) std::cerr << "FAILED " << name.get<std::string>() << "\n";
  return j["passed"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Percolation on hyperbolic graphs: experiments and checks"};
  app.require_subcommand(1);
  Common c;
  std::string suite;
  std::optional<std::string> fault;

  auto* gen = app.add_subcommand("generate", "write a graph window as JSON");
  auto* perc = app.add_subcommand("percolate", "Monte Carlo estimators to CSV");
  auto* norms = app.add_subcommand("norms", "two-point matrix norms to CSV");
  auto* magic = app.add_subcommand("magic", "Magic Lemma witnesses to JSON");
  auto* sweep = app.add_subcommand("sweep", "criterion table over a p-grid to CSV");
  auto* ver = app.add_subcommand("verify", "run a self-check suite, JSON report");
  for (auto* s : {gen, perc, norms, magic, sweep}) add_common(s, c);
  add_common(ver, c, false);
  ver->add_option("suite", suite, "oracles, geometry, magic, percolation, operators or all")->required();
  ver->add_option("--fault", fault, "inject a named fault (oracle-constant)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(c);
    if (*perc) return cmd_percolate(c);
    if (*norms) return cmd_norms(c);
    if (*magic) return cmd_magic(c);
    if (*sweep) return cmd_sweep(c);
    if (*ver) return cmd_verify(c, suite, fault);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: config schema: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
