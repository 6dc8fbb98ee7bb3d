#pragma once

// Gromov products and four-point hyperbolicity on graph windows, plus the
// Magic Lemma decompositions: Euclidean support counts, the hyperbolic-space
// version built from them, and the graph version built on an embedding.

#include <cstdint>
#include <optional>
#include <vector>

#include "hyperperc/graphs.hpp"
#include "hyperperc/hypgeom.hpp"

namespace hyperperc::gromov {

using graphs::GraphWindow;
using graphs::Vertex;
using graphs::VertexSet;

// (x|y)_w = (d(w,x) + d(w,y) - d(x,y)) / 2, always a multiple of 1/2.
double gromov_product(const GraphWindow& g, Vertex x, Vertex y, Vertex w);

struct DeltaEstimate {
  double value = 0.0;
  bool lower_bound = false;  // sampled quadruples only
  std::uint64_t quadruples = 0;
};

struct FourPointOptions {
  // 0 selects exhaustive mode when the vertex set has at most 60 vertices and
  // 10^6 sampled quadruples otherwise.
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::optional<VertexSet> subset;  // restrict x, y, z, w to these vertices
};
DeltaEstimate four_point_delta(const GraphWindow& g, const FourPointOptions& opt = {});

using EPoint = std::vector<double>;
using EuclideanCloud = std::vector<EPoint>;

// Distance to the nearest other member; +infinity for a singleton.
double isolation_radius(const EuclideanCloud& a, std::size_t x);

// inf over y of |A cap (B(x, R) minus B(y, r))| with R = rho_x / delta and
// r = delta rho_x (closed balls), together with a minimising centre.
struct SupportCount {
  std::size_t count = 0;
  EPoint center;
  double rho = 0.0;
  double outer = 0.0;  // R
  double inner = 0.0;  // r
};
SupportCount support_count(const EuclideanCloud& a, std::size_t x, double delta);

struct Support {
  bool supported = false;
  SupportCount detail;
};
Support is_supported(const EuclideanCloud& a, std::size_t x, double delta, double s);

struct UnsupportedPoint {
  std::size_t index = 0;
  EPoint center;
  double outer = 0.0;
  double inner = 0.0;
};
struct EuclideanMagic {
  std::vector<std::size_t> supported;
  std::vector<UnsupportedPoint> unsupported;
};
EuclideanMagic magic_euclidean(const EuclideanCloud& a, double delta, double s);

struct MagicConstantFit {
  double c_hat = 0.0;       // 2 x the largest observed s * (supported fraction)
  double raw = 0.0;         // the largest observed value itself
  std::vector<double> s_values;
  std::vector<double> worst_fraction;  // per s, over all clouds
};
// Uniform clouds in [0,1]^d.
MagicConstantFit fit_magic_constant(int d, double delta, const std::vector<double>& s_values,
                                    std::size_t n_points = 200, std::size_t n_clouds = 4,
                                    std::uint64_t seed = 7);

// Volume of the hyperbolic (c/2)-neighbourhood of the Euclidean ball
// B(x, x_d / 2) divided by the volume of a hyperbolic ball of radius c/2.
double volume_ratio_c2(int d, double c);

struct MagicParameters {
  double epsilon = 0.0;
  double c = 0.0;
  int d = 2;
  double delta = 0.0;
  double c_hat = 0.0;
  double s = 0.0;
  double c2 = 0.0;
  double n_bound = 0.0;  // N = s + 1 + C_2
  // The two constraint values; both are >= 1/epsilon.
  double horizon_constraint = 0.0;   // log(3^{-1/2} delta^{-1/4})
  double isolation_constraint = 0.0; // log sqrt(c'^2 delta^{-2} - 1)
};
MagicParameters delta_for_epsilon(double epsilon, double c, int d = 2);

struct MagicWitness {
  std::vector<hypgeom::HalfSpace> halfspaces;
  std::size_t leftover = 0;
  double distance = 0.0;
};

struct HyperbolicMagic {
  std::vector<std::size_t> selected;
  std::vector<MagicWitness> witnesses;  // parallel to selected
  MagicParameters params;
};
// A must be c-separated. Throws ContractViolation if any returned witness or
// the size of the selection fails its bound.
HyperbolicMagic magic_hyperbolic(const std::vector<hypgeom::Point>& a, double c, double epsilon);

// Re-checks one witness for x against A; returns the recomputed witness.
MagicWitness evaluate_witness(const std::vector<hypgeom::Point>& a, const hypgeom::Point& x,
                              std::vector<hypgeom::HalfSpace> halfspaces);

struct GraphMagic {
  VertexSet selected;
  std::vector<MagicWitness> witnesses;  // parallel to selected
  VertexSet net;
  double unit_ball_count = 0.0;  // C
  double delta = 0.0;
  double n_bound = 0.0;
  std::size_t single_halfspace = 0;
  std::size_t two_halfspaces = 0;
};
GraphMagic magic_graph(const GraphWindow& g, const VertexSet& a, double epsilon);

}  // namespace hyperperc::gromov
