#pragma once

// Exact values on the k-regular tree and on Z. Most quantities have a closed
// form and a second, independent evaluation (direct summation, dynamic
// programming or a spectral integral) so the two can be checked against each
// other.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace hyperperc::oracles {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TreeFamily {
  int k = 3;
  explicit TreeFamily(int degree);
};

double tree_two_point(int k, double p, int d);
double tree_two_point_product(int k, double p, int d);  // repeated multiplication

// (1+p)/(1-(k-1)p); +infinity at or above p_c.
double tree_susceptibility(int k, double p);
double tree_susceptibility_series(int k, double p, double tol = 1e-15);

// Number of vertices at distance d from a fixed vertex.
double tree_sphere_size(int k, int d);

struct TreeThresholds {
  double p_c = 0.0;
  double p_qq = 0.0;
  double rho = 0.0;          // spectral radius of simple random walk
  double growth = 0.0;       // k - 1
};
// q in [2, inf]; q = +infinity is accepted. Throws for q < 2.
TreeThresholds tree_thresholds(int k, double q = 2.0);

// Radial functions on the tree: f[d] is the value at distance d.
using Radial = std::vector<double>;

// (f * g)(d) = sum_w f(d(u,w)) g(d(w,v)) with d(u,v) = d, for d <= d_out.
// Terms with distances beyond the lengths of f and g are dropped.
Radial radial_convolve(int k, const Radial& f, const Radial& g, int d_out);
// Spherical transform of T_p at adjacency eigenvalue lambda:
// (1 - p^2) / (1 - p lambda + (k-1) p^2).
double tree_tp_symbol(int k, double p, double lambda);
// Integral of phi against the Kesten-McKay spectral measure of the tree at a
// vertex (Gauss-Chebyshev quadrature with `nodes` points).
template <class Phi>
double kesten_mckay_integral(int k, Phi phi, int nodes = 4000);

struct PolygonValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the mass beyond distance d_max
  bool tail_ok = true;      // tail_bound <= 1e-9
};
// T^n(v,v) on the infinite tree by radial convolution truncated at d_max.
PolygonValue tree_polygon(int k, double p, int n, int d_max);
// Same quantity as the spectral integral of the symbol to the n-th power;
// requires p < 1/sqrt(k-1).
double tree_polygon_spectral(int k, double p, int n);
// sum_x T(v,x) T(x,y) T(y,v) at a vertex of the infinite tree.
double tree_triangle(int k, double p, int d_max);

// E[p^{d(X_0, X_n)}] for simple random walk.
double tree_walk_two_point(int k, double p, int n);
double tree_walk_two_point_spectral(int k, double p, int n);
std::vector<double> tree_walk_distance_distribution(int k, int n);

double tree_branching_sum(int k, double p, int n_gen);
double tree_branching_sum_product(int k, double p, int n_gen);

struct ExactTail {
  std::vector<std::uint64_t> n;
  std::vector<double> probability;  // P(|K| >= n)
};
// Root-cluster size via the hitting-time (Dwass) formula in log space.
std::vector<double> tree_cluster_size_pmf(int k, double p, std::uint64_t n_max);
ExactTail tree_cluster_tail_exact(int k, double p, const std::vector<std::uint64_t>& grid);
// Same distribution by iterating the offspring generating function, for small n.
std::vector<double> tree_cluster_size_pmf_dp(int k, double p, std::size_t n_max);

double line_two_point(double p, int d);

// ---- template definitions ----

template <class Phi>
double kesten_mckay_integral(int k, Phi phi, int nodes) {
  // lambda = 2 sqrt(k-1) cos(theta); the density in theta is
  // (2/pi) sin^2(theta) * k (k-1) / (k^2 - lambda^2).
  const double s = 2.0 * std::sqrt(static_cast<double>(k - 1));
  const double pi = 3.14159265358979323846;
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double theta = pi * (i + 0.5) / nodes;
    const double lambda = s * std::cos(theta);
    const double sin2 = std::sin(theta) * std::sin(theta);
    const double w = (2.0 / pi) * sin2 * k * (k - 1.0) / (k * k - lambda * lambda);
    sum += w * phi(lambda);
  }
  return sum * pi / nodes;
}

}  // namespace hyperperc::oracles
