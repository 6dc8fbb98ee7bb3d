#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "hyperperc/errors.hpp"
#include "hyperperc/gromov.hpp"

namespace hyperperc::gromov {

using hypgeom::HalfSpace;
using hypgeom::Point;

namespace {

// Volume of a hyperbolic ball of radius r in H^d, up to the area of S^{d-1}.
double ball_volume(int d, double r) {
  if (d == 1) return r;
  if (d == 2) return std::cosh(r) - 1.0;
  const int steps = 4000;  // Simpson
  const double h = r / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::pow(std::sinh(i * h), d - 1);
  }
  return sum * h / 3.0;
}

std::vector<double> default_s_values(std::size_t n_points) {
  std::vector<double> s;
  for (std::size_t v = 4; v <= n_points / 2; v *= 2) s.push_back(static_cast<double>(v));
  return s;
}

double fitted_constant(int d, double delta) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(d, delta);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  double c = fit_magic_constant(d, delta, default_s_values(200), 200, 4, 7).c_hat;
  cache.emplace(key, c);
  return c;
}

EuclideanCloud model_coordinates(const std::vector<Point>& a) {
  EuclideanCloud out;
  out.reserve(a.size());
  for (const auto& p : a) out.emplace_back(p.coords().begin(), p.coords().end());
  return out;
}

}  // namespace

double volume_ratio_c2(int d, double c) {
  require(d >= 1, "dimension must be at least 1");
  require(c > 0.0, "separation must be positive");
  // B(x, x_d/2) is the hyperbolic ball of radius log sqrt(3) about (x', x_d sqrt(3)/2).
  const double core = 0.5 * std::log(3.0);
  return ball_volume(d, core + 0.5 * c) / ball_volume(d, 0.5 * c);
}

MagicParameters delta_for_epsilon(double epsilon, double c, int d) {
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  require(c > 0.0 && std::isfinite(c), "c must be positive");
  MagicParameters mp;
  mp.epsilon = epsilon;
  mp.c = c;
  mp.d = d;
  const double inv = 1.0 / epsilon;
  const double cp = -std::expm1(-c);  // c' = 1 - e^{-c}
  // Largest delta with each constraint >= 1/epsilon, in log space.
  const double log_d1 = -4.0 * inv - std::log(9.0);
  const double log_d2 = std::log(cp) - inv - 0.5 * std::log1p(std::exp(-2.0 * inv));
  const double log_delta = std::min(log_d1, log_d2);
  if (log_delta < std::log(1e-300)) throw ResourceLimit("delta underflows for this epsilon");
  mp.delta = std::exp(log_delta);
  mp.horizon_constraint = -0.5 * std::log(3.0) - 0.25 * log_delta;
  mp.isolation_constraint = std::log(cp) - log_delta + 0.5 * std::log1p(-std::exp(2.0 * (log_delta - std::log(cp))));
  mp.c_hat = fitted_constant(d, mp.delta);
  mp.s = std::max(2.0, std::ceil(mp.c_hat * inv));
  mp.c2 = volume_ratio_c2(d, c);
  mp.n_bound = mp.s + 1.0 + mp.c2;
  return mp;
}

MagicWitness evaluate_witness(const std::vector<Point>& a, const Point& x,
                              std::vector<HalfSpace> halfspaces) {
  require(!halfspaces.empty(), "a witness needs at least one half-space");
  MagicWitness w;
  w.distance = std::numeric_limits<double>::infinity();
  for (const auto& h : halfspaces) w.distance = std::min(w.distance, hypgeom::distance_to_halfspace(x, h));
  for (const auto& p : a) {
    bool covered = std::any_of(halfspaces.begin(), halfspaces.end(),
                               [&](const HalfSpace& h) { return h.contains(p); });
    if (!covered) ++w.leftover;
  }
  w.halfspaces = std::move(halfspaces);
  return w;
}

HyperbolicMagic magic_hyperbolic(const std::vector<Point>& a, double c, double epsilon) {
  require(!a.empty(), "point set must be nonempty");
  const std::size_t dim = a.front().dim();
  for (const auto& p : a) require(p.dim() == dim, "dimension mismatch in point set");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      require(hypgeom::distance(a[i], a[j]) >= c * (1.0 - 1e-12), "point set is not c-separated");

  HyperbolicMagic out;
  out.params = delta_for_epsilon(epsilon, c, static_cast<int>(dim));
  const auto& mp = out.params;
  const double target = 1.0 / epsilon;
  const auto cloud = model_coordinates(a);

  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point& x = a[i];
    const double xd = x.height();
    std::vector<HalfSpace> hs;
    if (a.size() == 1) {
      // rho_x is infinite: any far enough exterior half-space leaves only x.
      const double r = std::sqrt(std::exp(2.0 * (target + 1.0)) + 1.0);
      hs.push_back(hypgeom::ball_exterior_halfspace(x, r));
    } else {
      auto sup = is_supported(cloud, i, mp.delta, mp.s);
      if (sup.supported) continue;
      const auto& det = sup.detail;
      if (det.rho >= xd / std::sqrt(mp.delta)) {
        hs.push_back(hypgeom::ball_exterior_halfspace(x, det.rho / xd));
      } else {
        hs.push_back(hypgeom::ball_exterior_halfspace(x, det.outer / xd));
        if (det.center.back() <= 2.0 * det.inner)
          hs.push_back(hypgeom::ball_covering_halfspace(det.center, det.inner));
      }
    }
    auto w = evaluate_witness(a, x, std::move(hs));
    if (!(w.distance >= target))
      throw ContractViolation("magic witness for point " + std::to_string(i) + " is at distance " +
                              std::to_string(w.distance) + " < 1/epsilon");
    if (!(static_cast<double>(w.leftover) <= mp.n_bound))
      throw ContractViolation("magic witness for point " + std::to_string(i) + " leaves " +
                              std::to_string(w.leftover) + " points outside, above N");
    out.selected.push_back(i);
    out.witnesses.push_back(std::move(w));
  }
  if (static_cast<double>(out.selected.size()) < (1.0 - epsilon) * static_cast<double>(a.size()))
    throw ContractViolation("magic selection keeps fewer than (1 - epsilon)|A| points");
  return out;
}

GraphMagic magic_graph(const GraphWindow& g, const VertexSet& a, double epsilon) {
  require(g.has_embedding(), "magic_graph needs an embedded window");
  require(!a.empty(), "vertex set must be nonempty");
  require(epsilon > 0.0, "epsilon must be positive");
  for (Vertex v : a) require(g.contains(v), "invalid vertex id");
  const auto& phi = g.embedding().coords;
  GraphMagic out;

  // Any unit ball meeting the image lies in the radius-2 ball about one of its
  // points, so the largest such count bounds the points per unit ball.
  std::size_t c_count = 1;
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::size_t n = 0;
    for (std::size_t u = 0; u < g.size(); ++u) n += hypgeom::distance(phi[v], phi[u]) <= 2.0 ? 1 : 0;
    c_count = std::max(c_count, n);
  }
  out.unit_ball_count = static_cast<double>(c_count);
  out.delta = std::min(epsilon / (3.0 + epsilon), epsilon / out.unit_ball_count);

  // Greedy maximal 1-separated net of the image, and a net point for each vertex.
  std::vector<std::size_t> owner(a.size());
  std::vector<Point> net_points;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Point& p = phi[a[i]];
    std::size_t found = out.net.size();
    for (std::size_t k = 0; k < out.net.size(); ++k)
      if (hypgeom::distance(p, net_points[k]) < 1.0) {
        found = k;
        break;
      }
    if (found == out.net.size()) {
      out.net.push_back(a[i]);
      net_points.push_back(p);
    }
    owner[i] = found;
  }

  auto inner = magic_hyperbolic(net_points, 1.0, out.delta);
  out.n_bound = out.unit_ball_count * inner.params.n_bound;

  std::vector<const MagicWitness*> by_net(out.net.size(), nullptr);
  std::vector<std::vector<HalfSpace>> enlarged(out.net.size());
  for (std::size_t j = 0; j < inner.selected.size(); ++j) {
    const std::size_t k = inner.selected[j];
    by_net[k] = &inner.witnesses[j];
    for (const auto& h : inner.witnesses[j].halfspaces)
      enlarged[k].push_back(hypgeom::enlarge_toward(h, net_points[k], 2.0));
  }

  std::vector<Point> image;
  image.reserve(a.size());
  for (Vertex v : a) image.push_back(phi[v]);
  const double target = 1.0 / epsilon;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t k = owner[i];
    if (by_net[k] == nullptr) continue;
    auto w = evaluate_witness(image, phi[a[i]], enlarged[k]);
    if (!(w.distance >= target))
      throw ContractViolation("graph magic witness for vertex " + std::to_string(a[i]) +
                              " is closer than 1/epsilon");
    if (!(static_cast<double>(w.leftover) <= out.n_bound))
      throw ContractViolation("graph magic witness for vertex " + std::to_string(a[i]) +
                              " leaves more than N vertices outside");
    (w.halfspaces.size() == 1 ? out.single_halfspace : out.two_halfspaces) += 1;
    out.selected.push_back(a[i]);
    out.witnesses.push_back(std::move(w));
  }
  if (static_cast<double>(out.selected.size()) < (1.0 - epsilon) * static_cast<double>(a.size()))
    throw ContractViolation("graph magic keeps fewer than (1 - epsilon)|A| vertices");
  return out;
}

}  // namespace hyperperc::gromov
