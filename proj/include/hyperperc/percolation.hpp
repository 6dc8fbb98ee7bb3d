#pragma once

// Bernoulli bond percolation on graph windows and on an implicit k-regular
// tree. Every edge owns one uniform per sample, drawn from a counter-based
// generator keyed by (seed, sample index, edge key); the edge is open at p iff
// its uniform is below p. Results therefore do not depend on the thread count,
// and every estimate is coupled across p (Harris coupling).

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hyperperc/graphs.hpp"

namespace hyperperc::percolation {

using graphs::GraphWindow;
using graphs::Vertex;

inline constexpr std::uint64_t kMaxSamples = 1'000'000'000;

// Philox4x32-10.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;
  static Block generate(Block counter, std::array<std::uint32_t, 2> key);
};

// Uniform in [0, 1) with 53 random bits.
double uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t key, std::uint32_t stream = 0);

// Threads used when an estimator is given threads == 0.
void set_default_threads(unsigned n);
unsigned default_threads();

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double boundary_touch_fraction = 0.0;
};

class Configuration {
 public:
  Configuration(const GraphWindow& w, std::vector<std::uint8_t> open);

  bool is_open(std::size_t edge) const { return open_[edge] != 0; }
  const std::vector<std::uint8_t>& open_edges() const { return open_; }
  Vertex find(Vertex v) const;
  bool connected(Vertex u, Vertex v) const { return find(u) == find(v); }
  std::size_t cluster_size(Vertex v) const { return size_[find(v)]; }
  std::size_t cluster_count() const { return clusters_; }

 private:
  std::vector<std::uint8_t> open_;
  mutable std::vector<Vertex> parent_;
  std::vector<std::size_t> size_;
  std::size_t clusters_ = 0;
};

Configuration sample(const GraphWindow& w, double p, std::uint64_t seed, std::uint64_t index = 0);

// The k-regular tree truncated at depth `radius`, generated on demand. Vertex
// keys are 64-bit path hashes; the edge above a vertex shares its key.
class TreeLattice {
 public:
  TreeLattice(int k, std::uint64_t radius);
  int degree() const { return k_; }
  std::uint64_t radius() const { return radius_; }
  static constexpr std::uint64_t root_key() { return 0x5EED5EED5EED5EEDULL; }
  static std::uint64_t child_key(std::uint64_t parent, int index);

 private:
  int k_;
  std::uint64_t radius_;
};

struct Exec {
  unsigned threads = 0;
};

std::vector<Estimate> two_point_estimate(const GraphWindow& w, double p,
                                         const std::vector<std::pair<Vertex, Vertex>>& pairs,
                                         std::uint64_t n_samples, std::uint64_t seed, Exec exec = {});

Estimate susceptibility_estimate(const GraphWindow& w, double p, Vertex v, std::uint64_t n_samples,
                                 std::uint64_t seed, Exec exec = {});
Estimate susceptibility_estimate(const TreeLattice& t, double p, std::uint64_t n_samples,
                                 std::uint64_t seed, Exec exec = {});

struct KappaEstimate {
  Estimate estimate;  // the minimum over distance classes
  int argmin_distance = 0;
  std::vector<Estimate> per_distance;
};
// One representative pair per distance: the root and the first vertex of
// each depth (exact for vertex-transitive families).
KappaEstimate kappa_estimate(const GraphWindow& w, double p, int n_dist, std::uint64_t n_samples,
                             std::uint64_t seed, Exec exec = {});

struct TailPoint {
  std::uint64_t n = 0;
  double probability = 0.0;
  double std_error = 0.0;
};
struct TailCurve {
  std::vector<TailPoint> points;
  std::uint64_t n_samples = 0;
  double boundary_touch_fraction = 0.0;
};
// P(|K_v| >= n) on a log-spaced grid of n up to n_max. Exploration stops once
// n_max is reached.
TailCurve cluster_tail(const GraphWindow& w, double p, Vertex v, std::uint64_t n_max,
                       std::uint64_t n_samples, std::uint64_t seed, Exec exec = {});
TailCurve cluster_tail(const TreeLattice& t, double p, std::uint64_t n_max, std::uint64_t n_samples,
                       std::uint64_t seed, Exec exec = {});
std::vector<std::uint64_t> tail_grid(std::uint64_t n_max);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  // Quadratic coefficient of log P against log n; large values mean the
  // curve is not a power law on the range.
  double curvature = 0.0;
  double curvature_std_error = 0.0;
  bool power_law_rejected = false;
  std::size_t points_used = 0;
};
SlopeFit fit_tail_slope(const TailCurve& c, double n_lo, double n_hi);

struct PcEstimate {
  double value = 0.0;
  double ci_half_width = 0.0;
  std::vector<std::uint64_t> radii;
  std::vector<double> crossing;  // per radius
  std::vector<double> crossing_std_error;
  bool monotone = true;
  std::uint64_t n_samples = 0;
};
// For each radius r, bisects on p for P(0 <-> depth 2r) / P(0 <-> depth r) = 1/2,
// then extrapolates the crossings linearly in 1/r.
PcEstimate pc_estimate(const graphs::Family& family, const std::vector<std::uint64_t>& radii,
                       std::uint64_t n_samples, std::uint64_t seed, Exec exec = {},
                       int bisection_steps = 14);

struct HalfspaceMass {
  Estimate mass;
  Estimate susceptibility;
  double distance = 0.0;  // d(Phi(v), H)
};
HalfspaceMass halfspace_cluster_mass(const GraphWindow& w, double p, Vertex v,
                                     const hypgeom::HalfSpace& h, std::uint64_t n_samples,
                                     std::uint64_t seed, Exec exec = {});

// Root X_0, n-step simple random walk, independent configuration.
Estimate walk_two_point_estimate(const GraphWindow& w, double p, int n_steps, std::uint64_t n_samples,
                                 std::uint64_t seed, Exec exec = {});

struct DerivativeCheck {
  double derivative = 0.0;  // central difference of chi
  double derivative_std_error = 0.0;
  Estimate susceptibility;
  double chi_squared = 0.0;
  double ratio = 0.0;       // derivative / chi^2
  bool too_noisy = false;   // SE of the difference exceeds the difference
};
DerivativeCheck susceptibility_derivative_check(const TreeLattice& t, double p, double h,
                                                std::uint64_t n_samples, std::uint64_t seed,
                                                Exec exec = {});
DerivativeCheck susceptibility_derivative_check(const GraphWindow& w, double p, double h,
                                                std::uint64_t n_samples, std::uint64_t seed,
                                                Exec exec = {});

}  // namespace hyperperc::percolation
