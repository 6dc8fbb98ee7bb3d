#pragma once

// Two-point matrices T_p(u, v) = P_p(u <-> v) on graph windows, their q->q
// norms, polygon and triangle diagrams, the escape constant iota, and the
// criterion table combining them.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperperc/graphs.hpp"
#include "hyperperc/percolation.hpp"

namespace hyperperc::operators {

using graphs::GraphWindow;
using graphs::Vertex;

enum class MatrixSource { exact_tree, monte_carlo, explicit_entries };

// Symmetric nonnegative matrix with unit diagonal. Exact tree matrices are
// stored implicitly (entries p^{d(u,v)}, products in O(n) by a two-pass sweep
// over the tree); other matrices are dense.
class TwoPointMatrix {
 public:
  // Row-major n x n entries; checked for symmetry, range and unit diagonal.
  static TwoPointMatrix from_dense(std::vector<double> entries, std::size_t n, double p = 0.0);

  std::size_t size() const { return n_; }
  double p() const { return p_; }
  MatrixSource source() const { return source_; }
  bool is_dense() const { return !dense_.empty() || n_ == 0; }
  const GraphWindow* window() const { return window_.get(); }
  std::uint64_t n_samples() const { return n_samples_; }

  double operator()(Vertex u, Vertex v) const;
  // Binomial standard error of a Monte Carlo entry; 0 for exact matrices.
  double std_error(Vertex u, Vertex v) const;
  // Standard error of each row sum (Monte Carlo only; zeros otherwise).
  const std::vector<double>& row_sum_std_error() const { return row_sum_se_; }

  // y = T x; rows are processed in fixed blocks, so results do not depend on
  // the thread count.
  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> column(Vertex v) const;
  std::vector<double> to_dense() const;

 private:
  friend TwoPointMatrix exact_tree_tmatrix(std::shared_ptr<const GraphWindow> w, double p);
  friend TwoPointMatrix mc_tmatrix(std::shared_ptr<const GraphWindow> w, double p, std::uint64_t n_samples,
                                   std::uint64_t seed, percolation::Exec exec);
  std::vector<double> apply_tree(const std::vector<double>& x) const;

  std::size_t n_ = 0;
  double p_ = 0.0;
  MatrixSource source_ = MatrixSource::explicit_entries;
  std::shared_ptr<const GraphWindow> window_;
  std::vector<double> dense_;
  std::vector<double> row_sum_se_;
  std::uint64_t n_samples_ = 0;
  // Tree sweep data: vertices in BFS order and their parents.
  std::vector<Vertex> order_;
  std::vector<Vertex> parent_;
};

inline constexpr std::size_t kMaxMcVertices = 6'000;
inline constexpr std::size_t kMaxMcEdges = 100'000;
inline constexpr std::size_t kMaxDenseVertices = 6'000;

TwoPointMatrix exact_tree_tmatrix(std::shared_ptr<const GraphWindow> w, double p);
// Connection frequencies over full configurations. Both orders of a pair come
// from the same count, so the matrix is exactly symmetric.
TwoPointMatrix mc_tmatrix(std::shared_ptr<const GraphWindow> w, double p, std::uint64_t n_samples,
                          std::uint64_t seed, percolation::Exec exec = {});

struct NormReport {
  double q = 2.0;
  double value = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Maximum row sum.
double norm_1(const TwoPointMatrix& t);
// Largest eigenvalue by power iteration from the all-ones vector. The residual
// is the remaining relative change of the Rayleigh quotient, extrapolated
// geometrically from its last two increments.
NormReport norm_2(const TwoPointMatrix& t, double tol = 1e-10, std::size_t max_iter = 100'000);
// q->q norm of a nonnegative matrix by Boyd's iteration. The residual is the
// relative gap between the achieved ratio ||Tx||_q/||x||_q and the upper bound
// max_i [T^T (Tx)^{q-1}]_i / x_i^{q-1} (to the power 1/q), so a converged
// report brackets the norm.
NormReport norm_q(const TwoPointMatrix& t, double q, double tol = 1e-8, std::size_t max_iter = 100'000);

// log T^n(v,v), computed with rescaling so large n cannot overflow.
double log_polygon(const TwoPointMatrix& t, Vertex v, int n);
double polygon(const TwoPointMatrix& t, Vertex v, int n);
// max over the given vertices of T^n(v,v)^{1/n} at n = n_max.
double growth_rate(const TwoPointMatrix& t, const std::vector<Vertex>& vertices, int n_max);

double triangle_at(const TwoPointMatrix& t, Vertex v);
// max_v T^3(v,v). Every vertex costs one matrix product.
double triangle(const TwoPointMatrix& t);

struct IotaResult {
  double value = 0.0;          // 1 - best ratio
  double best_ratio = 0.0;     // sum_{u,v in K} T(u,v) / (chi |K|)
  std::vector<Vertex> certificate;
  bool exact = false;          // false: value is an upper bound on iota
  double chi_bar = 0.0;
};
inline constexpr std::size_t kExactIotaMax = 20;
// Exhaustive over nonempty subsets when n <= 20, heuristic otherwise.
IotaResult iota(const TwoPointMatrix& t);
IotaResult iota_exact(const TwoPointMatrix& t);
IotaResult iota_heuristic(const TwoPointMatrix& t);

struct SandwichReport {
  double chi_bar = 0.0;
  double iota = 0.0;
  double norm_2 = 0.0;
  double lower = 0.0;  // chi (1 - iota)
  double upper = 0.0;  // chi sqrt(1 - iota^2)
  bool lower_holds = false;
  bool upper_holds = false;
  bool holds() const { return lower_holds && upper_holds; }
};
SandwichReport cheeger_sandwich_check(const TwoPointMatrix& t, double tol = 1e-9);

// Largest adjacency eigenvalue of the window, by power iteration on A + I.
NormReport adjacency_norm(const GraphWindow& w, double tol = 1e-10, std::size_t max_iter = 200'000);

struct RieszThorinReport {
  double q = 0.0;
  double theta = 0.0;
  double norm_q = 0.0;
  double norm_1 = 0.0;
  double norm_2 = 0.0;
  double bound = 0.0;  // norm_1^{1-theta} norm_2^theta
  bool holds = false;
  bool converged = false;
};
RieszThorinReport riesz_thorin_check(const TwoPointMatrix& t, double q, double tol = 1e-6);

struct CriterionRow {
  double p = 0.0;
  double chi_bar = 0.0;
  double chi_bar_std_error = 0.0;
  double iota_upper = 0.0;
  bool iota_exact = false;
  double escape_factor = 0.0;  // sqrt(1 - iota^2), a lower bound when iota is heuristic
  double adjacency_norm = 0.0;
  double pc_hat = 0.0;
  double product = 0.0;
  double product_std_error = 0.0;
  bool below_one = false;
  std::size_t window_vertices = 0;
};
struct CriterionTable {
  std::string family;
  int window_radius = 0;
  double pc_hat = 0.0;
  double pc_ci_half_width = 0.0;
  std::string pc_source;  // "exact" or "estimated"
  double adjacency_norm = 0.0;
  double adjacency_norm_infinite = 0.0;  // trees only, 0 otherwise
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<CriterionRow> rows;
};
struct CriterionOptions {
  std::optional<double> pc;  // skips estimation when set
  std::vector<std::uint64_t> pc_radii = {2, 3};
  std::uint64_t pc_samples = 20'000;
  percolation::Exec exec;
};
// Rows of (p_c - p)/(1 - p) * chi * sqrt(1 - iota^2) * ||A||_2. Tree windows
// use exact matrices and p_c = 1/(k-1); other families use Monte Carlo
// matrices and an estimated p_c.
CriterionTable criterion_evaluate(const graphs::Family& family, const std::vector<double>& p_grid,
                                  int window_radius, std::uint64_t n_samples, std::uint64_t seed,
                                  const CriterionOptions& options = {});

struct ExpansionReport {
  int k = 0;
  double p1 = 0.0, p2 = 0.0;
  double alpha = 0.0;         // (p2 - p1)/(1 - p1)
  double growth_ratio = 0.0;  // alpha * 2 sqrt(k-1) * symbol of T_{p1} at the spectral edge
  bool divergent = false;     // series diverges entrywise; the upper bound is vacuous
  std::vector<double> lower, middle, upper;  // by distance 0..d_max; upper empty if divergent
  std::size_t terms = 0;
  bool lower_holds = false;
  bool upper_holds = false;   // true when divergent (the bound is +infinity)
};
// T_{p1} <= T_{p2} <= sum_m [alpha T_{p1} A]^m T_{p1}, entrywise on the
// infinite k-regular tree, by radial convolution.
ExpansionReport expansion_inequality_check(int k, double p1, double p2, int d_max);

}  // namespace hyperperc::operators
