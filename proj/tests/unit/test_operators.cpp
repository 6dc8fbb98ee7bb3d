#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "hyperperc/errors.hpp"
#include "hyperperc/operators.hpp"
#include "hyperperc/oracles.hpp"

using namespace hyperperc;
using namespace hyperperc::operators;

namespace {

std::shared_ptr<const graphs::GraphWindow> shared(graphs::GraphWindow w) {
  return std::make_shared<const graphs::GraphWindow>(std::move(w));
}

Eigen::MatrixXd dense(const TwoPointMatrix& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  const auto d = t.to_dense();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = d[i * n + j];
  return m;
}

double top_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double q_norm_of(const Eigen::VectorXd& x, double q) { return std::pow(x.array().abs().pow(q).sum(), 1.0 / q); }

// Sup of |Tx|_q / |x|_q over positive x by random search plus coordinate refinement.
double brute_q_norm(const Eigen::MatrixXd& m, double q) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const auto n = m.rows();
  Eigen::VectorXd best(n);
  double best_ratio = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = u(rng);
    const double r = q_norm_of(m * x, q) / q_norm_of(x, q);
    if (r > best_ratio) {
      best_ratio = r;
      best = x;
    }
  }
  for (double step = 0.1; step > 1e-9; step *= 0.5)
    for (int sweep = 0; sweep < 20; ++sweep)
      for (Eigen::Index i = 0; i < n; ++i)
        for (double s : {1.0 + step, 1.0 / (1.0 + step)}) {
          Eigen::VectorXd x = best;
          x(i) *= s;
          const double r = q_norm_of(m * x, q) / q_norm_of(x, q);
          if (r > best_ratio) {
            best_ratio = r;
            best = x;
          }
        }
  return best_ratio;
}

double brute_iota(const Eigen::MatrixXd& m) {
  const auto n = static_cast<int>(m.rows());
  const double chi = m.rowwise().sum().maxCoeff();
  double best = 0.0;
  for (int mask = 1; mask < (1 << n); ++mask) {
    double s = 0.0;
    int size = 0;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      ++size;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1) s += m(i, j);
    }
    best = std::max(best, s / (chi * size));
  }
  return 1.0 - best;
}

// Exact two-point function of the 4-cycle.
TwoPointMatrix four_cycle(double p) {
  const double one = p + p * p * p * (1.0 - p);  // direct edge, or the other three
  const double two = 1.0 - (1.0 - p * p) * (1.0 - p * p);
  std::vector<double> e(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int d = std::min((i - j + 4) % 4, (j - i + 4) % 4);
      e[i * 4 + j] = d == 0 ? 1.0 : d == 1 ? one : two;
    }
  return TwoPointMatrix::from_dense(e, 4, p);
}

}  // namespace

TEST_CASE("exact tree matrix") {
  const auto w = shared(graphs::build_tree(3, 4));
  const double p = 0.55;
  const auto t = exact_tree_tmatrix(w, p);
  const auto m = dense(t);
  for (std::size_t u = 0; u < w->size(); u += 5) {
    const auto d = graphs::bfs_distances(*w, static_cast<Vertex>(u));
    for (std::size_t v = 0; v < w->size(); ++v) CHECK(m(u, v) == doctest::Approx(std::pow(p, d[v])).epsilon(1e-14));
  }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  std::vector<double> x(w->size());
  Eigen::VectorXd ex(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ex(i) = x[i] = un(rng);
  const auto y = t.apply(x);
  const Eigen::VectorXd ey = m * ex;
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(ey(i)).epsilon(1e-12).scale(1e-12));
  CHECK(norm_1(t) == doctest::Approx(m.rowwise().sum().maxCoeff()).epsilon(1e-14));
}

TEST_CASE("norm_2 against a dense eigensolve") {
  for (double p : {0.3, 0.5, 0.65}) {
    const auto t = exact_tree_tmatrix(shared(graphs::build_tree(3, 6)), p);
    const auto r = norm_2(t);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(top_eigenvalue(dense(t))).epsilon(1e-9));
  }
  const auto mc = mc_tmatrix(shared(graphs::build_tiling(3, 7, 3)), 0.3, 2000, 4);
  CHECK(norm_2(mc).value == doctest::Approx(top_eigenvalue(dense(mc))).epsilon(1e-8));
  const auto c = four_cycle(0.4);
  CHECK(norm_2(c).value == doctest::Approx(top_eigenvalue(dense(c))).epsilon(1e-10));
}

TEST_CASE("q-norms") {
  const auto c = four_cycle(0.4);
  CHECK(norm_q(c, 2.0).value == doctest::Approx(norm_2(c).value).epsilon(1e-8));
  // Non-regular small matrix: a path of three vertices.
  const double p = 0.5;
  const auto path = TwoPointMatrix::from_dense({1, p, p * p, p, 1, p, p * p, p, 1}, 3, p);
  const auto m = dense(path);
  for (double q : {1.25, 1.5, 2.0, 3.0, 5.0}) {
    const auto r = norm_q(path, q);
    CHECK(r.converged);
    const double brute = brute_q_norm(m, q);
    CHECK(r.value >= brute * (1.0 - 1e-9));
    CHECK(r.value <= brute * (1.0 + 1e-6));
    // Symmetric matrices have equal q and q' norms.
    CHECK(norm_q(path, q / (q - 1.0)).value == doctest::Approx(r.value).epsilon(1e-6));
  }
  CHECK_THROWS_AS(norm_q(path, 1.0), InvalidArgument);
}

TEST_CASE("polygons, growth and triangle") {
  const auto t = exact_tree_tmatrix(shared(graphs::build_tree(3, 5)), 0.4);
  const auto m = dense(t);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  const double lambda = top_eigenvalue(m);
  for (int n = 1; n <= 12; ++n) {
    power = power * m;
    for (Vertex v : {0, 7, 40}) {
      CHECK(polygon(t, v, n) == doctest::Approx(power(v, v)).epsilon(1e-10));
      CHECK(log_polygon(t, v, n) == doctest::Approx(std::log(power(v, v))).epsilon(1e-10));
      CHECK(power(v, v) <= std::pow(lambda, n) * (1.0 + 1e-12));
    }
  }
  CHECK(growth_rate(t, {0}, 12) == doctest::Approx(std::pow(power(0, 0), 1.0 / 12.0)).epsilon(1e-10));
  const Eigen::MatrixXd cube = m * m * m;
  CHECK(triangle_at(t, 3) == doctest::Approx(cube(3, 3)).epsilon(1e-10));
  CHECK(triangle(t) == doctest::Approx(cube.diagonal().maxCoeff()).epsilon(1e-10));
  // Deep powers stay finite in log space.
  CHECK(std::isfinite(log_polygon(t, 0, 5000)));
}

TEST_CASE("iota") {
  const auto t = exact_tree_tmatrix(shared(graphs::build_tree(3, 2)), 0.4);
  const auto io = iota_exact(t);
  CHECK(io.exact);
  CHECK(io.value == doctest::Approx(brute_iota(dense(t))).epsilon(1e-12));
  const auto c = four_cycle(0.3);
  CHECK(iota(c).value == doctest::Approx(brute_iota(dense(c))).epsilon(1e-12));
  // On a vertex-transitive matrix the whole set attains the best ratio, so iota is 0.
  CHECK(iota(c).value == doctest::Approx(0.0).scale(1.0));
  // The heuristic returns an upper bound certified by its own subset.
  const auto h = iota_heuristic(t);
  CHECK_FALSE(h.exact);
  CHECK(h.value >= io.value - 1e-12);
  CHECK_THROWS_AS(iota_exact(exact_tree_tmatrix(shared(graphs::build_tree(3, 3)), 0.4)), InvalidArgument);
}

TEST_CASE("cheeger sandwich and adjacency norm") {
  for (double p : {0.2, 0.4, 0.6}) {
    CHECK(cheeger_sandwich_check(exact_tree_tmatrix(shared(graphs::build_tree(3, 2)), p)).holds());
    CHECK(cheeger_sandwich_check(four_cycle(p)).holds());
  }
  const auto line = graphs::build_grid(1, 5);
  CHECK(adjacency_norm(line).value == doctest::Approx(2.0 * std::cos(std::numbers::pi / 12.0)).epsilon(1e-9));
  const auto tree = graphs::build_tree(3, 5);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(tree.size(), tree.size());
  for (auto [u, v] : tree.edges()) a(u, v) = a(v, u) = 1.0;
  CHECK(adjacency_norm(tree).value == doctest::Approx(top_eigenvalue(a)).epsilon(1e-9));
}

TEST_CASE("riesz-thorin") {
  const auto t = exact_tree_tmatrix(shared(graphs::build_tree(3, 5)), 0.5);
  for (double q : {1.25, 1.5, 2.0}) {
    const auto r = riesz_thorin_check(t, q);
    CHECK(r.holds);
    CHECK(r.norm_q <= r.bound * (1.0 + 1e-6));
  }
}

TEST_CASE("matrix validation") {
  CHECK_THROWS_AS(TwoPointMatrix::from_dense({1, 0.5, 0.4, 1}, 2), InvalidArgument);
  CHECK_THROWS_AS(TwoPointMatrix::from_dense({0.9, 0.5, 0.5, 1}, 2), InvalidArgument);
  CHECK_THROWS_AS(TwoPointMatrix::from_dense({1, 1.5, 1.5, 1}, 2), InvalidArgument);
  CHECK_THROWS_AS(TwoPointMatrix::from_dense({1, 0.5, 0.5}, 2), InvalidArgument);
  CHECK_THROWS_AS(exact_tree_tmatrix(shared(graphs::build_grid(2, 2)), 0.3), InvalidArgument);
}

TEST_CASE("criterion table on the tree") {
  const auto table = criterion_evaluate(graphs::Family::tree(3), {0.1, 0.3, 0.45}, 3, 0, 1);
  CHECK(table.pc_source == "exact");
  CHECK(table.pc_hat == 0.5);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    CHECK(row.iota_exact == false);
    CHECK(row.escape_factor == doctest::Approx(std::sqrt(1.0 - row.iota_upper * row.iota_upper)));
    CHECK(row.product == doctest::Approx((0.5 - row.p) / (1.0 - row.p) * row.chi_bar * row.escape_factor *
                                         row.adjacency_norm));
    CHECK(row.below_one == (row.product < 1.0));
  }
}

TEST_CASE("expansion inequality") {
  const auto ok = expansion_inequality_check(3, 0.2, 0.3, 30);
  CHECK_FALSE(ok.divergent);
  CHECK(ok.lower_holds);
  CHECK(ok.upper_holds);
  for (int d = 0; d <= 30; ++d) CHECK(ok.middle[d] == doctest::Approx(std::pow(0.3, d)));
  const auto div = expansion_inequality_check(3, 0.3, 0.4, 30);
  CHECK(div.divergent);
  CHECK(div.upper.empty());
  CHECK(div.lower_holds);
}
