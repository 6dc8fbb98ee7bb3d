#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hyperperc/errors.hpp"
#include "hyperperc/operators.hpp"

namespace hyperperc::operators {

namespace {

double norm_of(const std::vector<double>& x, double q) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / m, q);
  return m * std::pow(s, 1.0 / q);
}

// Power iteration for the top eigenvalue of a symmetric nonnegative operator.
// Stops when the Rayleigh quotient's remaining change, extrapolated
// geometrically from its last two increments, is below tol.
template <class Apply>
NormReport power_iteration(std::size_t n, Apply apply, double tol, std::size_t max_iter) {
  NormReport r;
  r.q = 2.0;
  if (n == 0) return r;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0, prev_change = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::vector<double> y = apply(x);
    const double next = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    const double ny = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    r.iterations = it;
    if (ny == 0.0) {
      r.value = 0.0;
      r.residual = 0.0;
      r.converged = true;
      return r;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    const double change = std::abs(next - lambda) / std::abs(next);
    lambda = next;
    r.value = lambda;
    if (it >= 3) {
      const double ratio = prev_change > 0.0 ? change / prev_change : 0.0;
      r.residual = ratio < 1.0 ? change / (1.0 - ratio) : change;
      if (r.residual < tol && ratio < 1.0) {
        r.converged = true;
        return r;
      }
    }
    prev_change = change;
  }
  return r;
}

}  // namespace

double norm_1(const TwoPointMatrix& t) {
  if (t.size() == 0) return 0.0;
  auto rows = t.apply(std::vector<double>(t.size(), 1.0));
  return *std::max_element(rows.begin(), rows.end());
}

NormReport norm_2(const TwoPointMatrix& t, double tol, std::size_t max_iter) {
  return power_iteration(t.size(), [&](const std::vector<double>& x) { return t.apply(x); }, tol, max_iter);
}

NormReport norm_q(const TwoPointMatrix& t, double q, double tol, std::size_t max_iter) {
  require(q > 1.0 && std::isfinite(q), "q must lie in (1, infinity)");
  NormReport r;
  r.q = q;
  const std::size_t n = t.size();
  if (n == 0) return r;
  std::vector<double> x(n, 1.0);
  double nx = norm_of(x, q);
  for (double& v : x) v /= nx;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    r.iterations = it;
    const std::vector<double> y = t.apply(x);
    const double lower = norm_of(y, q);  // ||x||_q = 1
    std::vector<double> z(n);
    const double ymax = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(y[i] / ymax, q - 1.0);
    const std::vector<double> w = t.apply(z);
    // ||T||_q^q <= max_i (T^T (Tx)^{q-1})_i / x_i^{q-1}; z carries the factor ymax^{1-q}.
    double upper_q = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] <= 0.0) {
        positive = false;
        break;
      }
      upper_q = std::max(upper_q, w[i] / std::pow(x[i], q - 1.0));
    }
    const double upper = positive ? std::pow(ymax, (q - 1.0) / q) * std::pow(upper_q, 1.0 / q)
                                  : std::numeric_limits<double>::infinity();
    r.value = lower;
    r.residual = (upper - lower) / lower;
    if (r.residual < tol) {
      r.converged = true;
      return r;
    }
    // x <- w^{1/(q-1)}, normalised in l^q.
    const double wmax = *std::max_element(w.begin(), w.end());
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(w[i] / wmax, 1.0 / (q - 1.0));
    nx = norm_of(x, q);
    for (double& v : x) v /= nx;
  }
  return r;
}

double log_polygon(const TwoPointMatrix& t, Vertex v, int n) {
  require(n >= 1, "n must be at least 1");
  require(v >= 0 && static_cast<std::size_t>(v) < t.size(), "vertex out of range");
  std::vector<double> x(t.size(), 0.0);
  x[v] = 1.0;
  double log_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    x = t.apply(x);
    const double m = *std::max_element(x.begin(), x.end());
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    for (double& e : x) e /= m;
    log_scale += std::log(m);
  }
  return log_scale + std::log(x[v]);
}

double polygon(const TwoPointMatrix& t, Vertex v, int n) { return std::exp(log_polygon(t, v, n)); }

double growth_rate(const TwoPointMatrix& t, const std::vector<Vertex>& vertices, int n_max) {
  require(!vertices.empty(), "at least one vertex is required");
  double best = 0.0;
  for (Vertex v : vertices) best = std::max(best, std::exp(log_polygon(t, v, n_max) / n_max));
  return best;
}

double triangle_at(const TwoPointMatrix& t, Vertex v) {
  const auto y = t.column(v);
  const auto z = t.apply(y);
  return std::inner_product(y.begin(), y.end(), z.begin(), 0.0);
}

double triangle(const TwoPointMatrix& t) {
  if (t.is_dense() && t.size() > 3000) throw ResourceLimit("triangle over all vertices of a dense matrix above 3000");
  if (t.size() > 50'000) throw ResourceLimit("triangle over all vertices above 50000; use triangle_at");
  double best = 0.0;
  for (std::size_t v = 0; v < t.size(); ++v) best = std::max(best, triangle_at(t, static_cast<Vertex>(v)));
  return best;
}

NormReport adjacency_norm(const GraphWindow& w, double tol, std::size_t max_iter) {
  auto r = power_iteration(
      w.size(),
      [&](const std::vector<double>& x) {
        std::vector<double> y(x);
        for (std::size_t v = 0; v < w.size(); ++v)
          for (Vertex u : w.neighbors(static_cast<Vertex>(v))) y[v] += x[u];
        return y;
      },
      tol, max_iter);
  r.value -= 1.0;
  return r;
}

RieszThorinReport riesz_thorin_check(const TwoPointMatrix& t, double q, double tol) {
  require(q > 1.0 && q <= 2.0, "q must lie in (1, 2]");
  RieszThorinReport r;
  r.q = q;
  r.theta = 2.0 * (1.0 - 1.0 / q);
  auto nq = norm_q(t, q);
  auto n2 = norm_2(t);
  r.norm_q = nq.value;
  r.norm_1 = norm_1(t);
  r.norm_2 = n2.value;
  r.converged = nq.converged && n2.converged;
  r.bound = std::pow(r.norm_1, 1.0 - r.theta) * std::pow(r.norm_2, r.theta);
  r.holds = r.norm_q <= r.bound * (1.0 + tol);
  return r;
}

}  // namespace hyperperc::operators
