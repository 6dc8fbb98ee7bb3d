#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hyperperc/hypgeom.hpp"

namespace testing {

inline hyperperc::hypgeom::Point random_point(std::mt19937_64& rng, int dim, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> c(dim);
  for (int i = 0; i + 1 < dim; ++i) c[i] = u(rng);
  c.back() = std::exp(u(rng));
  return hyperperc::hypgeom::Point(c);
}

// Hyperbolic length of the geodesic between a and b, integrated numerically
// along the Euclidean circle (or vertical segment) that carries it. Works in
// the vertical plane through both points, so any dimension is fine.
inline double length_by_integration(const hyperperc::hypgeom::Point& a, const hyperperc::hypgeom::Point& b,
                                    int nodes = 4000) {
  double h2 = 0.0;
  for (std::size_t i = 0; i + 1 < a.dim(); ++i) h2 += (a[i] - b[i]) * (a[i] - b[i]);
  const double u1 = 0.0, u2 = std::sqrt(h2), y1 = a.height(), y2 = b.height();
  auto simpson = [nodes](auto f, double lo, double hi) {
    const double h = (hi - lo) / nodes;
    double s = f(lo) + f(hi);
    for (int i = 1; i < nodes; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  if (u2 < 1e-12 * std::max(y1, y2)) {
    // ds = dy / y, integrated in log y to keep the integrand flat.
    return simpson([](double) { return 1.0; }, std::log(std::min(y1, y2)), std::log(std::max(y1, y2)));
  }
  // Circle centred at (c, 0) through both points.
  const double c = (u2 * u2 + y2 * y2 - y1 * y1) / (2.0 * u2);
  const double r = std::hypot(u1 - c, y1);
  const double t1 = std::atan2(y1, u1 - c), t2 = std::atan2(y2, u2 - c);
  // Point (c + r cos t, r sin t): |d/dt| = r, height r sin t.
  return simpson([](double t) { return 1.0 / std::sin(t); }, std::min(t1, t2), std::max(t1, t2));
}

}  // namespace testing
