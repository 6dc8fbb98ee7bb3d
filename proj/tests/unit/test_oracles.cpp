#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hyperperc/errors.hpp"
#include "hyperperc/graphs.hpp"
#include "hyperperc/oracles.hpp"

using namespace hyperperc;
using namespace hyperperc::oracles;

TEST_CASE("two-point, susceptibility and spheres") {
  for (int k : {3, 4, 5})
    for (int i = 1; i < 20; ++i) {
      const double p = i / 20.0 / (k - 1);
      for (int d : {0, 1, 7, 30}) CHECK(tree_two_point(k, p, d) == doctest::Approx(tree_two_point_product(k, p, d)).epsilon(1e-12));
      CHECK(tree_susceptibility(k, p) == doctest::Approx(tree_susceptibility_series(k, p)).epsilon(1e-9));
      // Direct sum over spheres, |S_d| = k (k-1)^{d-1}.
      double chi = 1.0;
      for (int d = 1; d < 4000; ++d) chi += std::exp(std::log(k) + (d - 1) * std::log(k - 1.0) + d * std::log(p));
      CHECK(tree_susceptibility(k, p) == doctest::Approx(chi).epsilon(1e-9));
    }
  CHECK(std::isinf(tree_susceptibility(3, 0.5)));
  CHECK(std::isinf(tree_susceptibility(3, 0.7)));
  const auto w = graphs::build_tree(4, 5);
  const auto s = graphs::sphere_sizes(w);
  for (int d = 0; d <= 5; ++d) CHECK(tree_sphere_size(4, d) == s[d]);
  CHECK(line_two_point(0.3, -2) == doctest::Approx(0.09));
}

TEST_CASE("thresholds") {
  const auto t = tree_thresholds(3);
  CHECK(t.p_c == 0.5);
  CHECK(t.p_qq == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(t.rho == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0));
  CHECK(tree_thresholds(4, kInfinity).p_qq == doctest::Approx(1.0 / 3.0));
  CHECK(tree_thresholds(5, 3.0).p_qq == doctest::Approx(std::pow(4.0, -2.0 / 3.0)));
  CHECK_THROWS_AS(tree_thresholds(3, 1.5), InvalidArgument);
  CHECK_THROWS_AS(tree_thresholds(2), InvalidArgument);
}

TEST_CASE("spectral measure moments") {
  // Closed walks on the tree: 1, k, k(2k-1) for lengths 0, 2, 4.
  for (int k : {3, 4, 6}) {
    CHECK(kesten_mckay_integral(k, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(kesten_mckay_integral(k, [](double l) { return l; }) == doctest::Approx(0.0).scale(1.0));
    CHECK(kesten_mckay_integral(k, [](double l) { return l * l; }) == doctest::Approx(k).epsilon(1e-10));
    CHECK(kesten_mckay_integral(k, [](double l) { return l * l * l * l; }) == doctest::Approx(k * (2.0 * k - 1.0)).epsilon(1e-10));
  }
  // The symbol at the trivial eigenvalue is the susceptibility.
  CHECK(tree_tp_symbol(3, 0.3, 3.0) == doctest::Approx(tree_susceptibility(3, 0.3)));
}

TEST_CASE("radial convolution against a window sum") {
  const int k = 3, len = 4;
  Radial f(len), g(len);
  for (int d = 0; d < len; ++d) {
    f[d] = 1.0 + 0.5 * d;
    g[d] = std::pow(0.4, d) + 0.1 * d * d;
  }
  const auto w = graphs::build_tree(k, 2 * len);
  const auto du = graphs::bfs_distances(w, 0);
  const auto conv = radial_convolve(k, f, g, 5);
  for (int d = 0; d <= 5; ++d) {
    graphs::Vertex v = 0;
    while (du[v] != d) ++v;
    const auto dv = graphs::bfs_distances(w, v);
    double sum = 0.0;
    for (std::size_t x = 0; x < w.size(); ++x)
      if (du[x] < len && dv[x] < len) sum += f[du[x]] * g[dv[x]];
    CHECK(conv[d] == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("polygons and triangle") {
  for (int k : {3, 4}) {
    const double p = 0.6 / std::sqrt(k - 1.0);
    // T^2(v,v) = sum_d |S_d| p^{2d}.
    const double two = (1.0 + p * p) / (1.0 - (k - 1) * p * p);
    CHECK(tree_polygon(k, p, 2, 200).value == doctest::Approx(two).epsilon(1e-10));
    CHECK(tree_polygon_spectral(k, p, 2) == doctest::Approx(two).epsilon(1e-8));
    for (int n : {3, 5, 8}) {
      const auto pv = tree_polygon(k, p, n, 200);
      CHECK(pv.tail_ok);
      CHECK(pv.value == doctest::Approx(tree_polygon_spectral(k, p, n)).epsilon(1e-8));
    }
    CHECK(tree_triangle(k, p, 200) == doctest::Approx(tree_polygon(k, p, 3, 200).value).epsilon(1e-10));
  }
  CHECK_THROWS_AS(tree_polygon_spectral(3, 0.8, 2), InvalidArgument);
}

TEST_CASE("walks") {
  for (int k : {3, 4}) {
    const auto one = tree_walk_distance_distribution(k, 1);
    CHECK(one[1] == 1.0);
    const auto two = tree_walk_distance_distribution(k, 2);
    CHECK(two[0] == doctest::Approx(1.0 / k));
    CHECK(two[2] == doctest::Approx((k - 1.0) / k));
    const auto many = tree_walk_distance_distribution(k, 40);
    CHECK(std::accumulate(many.begin(), many.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double p = 0.5 / std::sqrt(k - 1.0);
    for (int n : {1, 6, 25})
      CHECK(tree_walk_two_point(k, p, n) == doctest::Approx(tree_walk_two_point_spectral(k, p, n)).epsilon(1e-9));
  }
}

TEST_CASE("branching sums") {
  for (int k : {3, 4, 5}) {
    for (int n = 1; n <= 50; n += 7) {
      const double p = 0.7 / (k - 1);
      CHECK(tree_branching_sum(k, p, n) == doctest::Approx(tree_branching_sum_product(k, p, n)).epsilon(1e-12));
      CHECK(tree_branching_sum(k, p, n) <= 1.0 + 1e-12);
      CHECK(tree_branching_sum(k, 1.0 / (k - 1), n) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("cluster size distribution") {
  for (int k : {3, 4}) {
    for (double p : {0.2, 1.0 / (k - 1), 0.6}) {
      const auto a = tree_cluster_size_pmf(k, p, 60);
      const auto b = tree_cluster_size_pmf_dp(k, p, 60);
      for (std::size_t n = 1; n <= 60; ++n) CHECK(a[n] == doctest::Approx(b[n]).epsilon(1e-9).scale(1e-300));
      CHECK(a[1] == doctest::Approx(std::pow(1.0 - p, k)));
    }
    // Subcritical: the masses sum to one.
    const auto sub = tree_cluster_size_pmf(k, 0.5 / (k - 1), 4000);
    CHECK(std::accumulate(sub.begin(), sub.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Critical tail decays like n^{-1/2}.
  const auto t = tree_cluster_tail_exact(3, 0.5, {1000, 100000});
  CHECK(std::sqrt(1000.0) * t.probability[0] == doctest::Approx(std::sqrt(100000.0) * t.probability[1]).epsilon(0.1));
}
