#include "hyperperc/gromov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hyperperc/errors.hpp"

namespace hyperperc::gromov {

double gromov_product(const GraphWindow& g, Vertex x, Vertex y, Vertex w) {
  require(g.contains(x) && g.contains(y) && g.contains(w), "invalid vertex id");
  auto dw = graphs::bfs_distances(g, w);
  int dxy = graphs::bfs_distances(g, x)[y];
  return 0.5 * (dw[x] + dw[y] - dxy);
}

DeltaEstimate four_point_delta(const GraphWindow& g, const FourPointOptions& opt) {
  VertexSet pool;
  if (opt.subset) {
    pool = *opt.subset;
    for (Vertex v : pool) require(g.contains(v), "invalid vertex id in subset");
  } else {
    pool.resize(g.size());
    std::iota(pool.begin(), pool.end(), 0);
  }
  DeltaEstimate est;
  if (pool.size() <= 1) return est;

  const bool exhaustive = opt.samples == 0 && pool.size() <= 60;
  std::mt19937_64 rng(opt.seed);
  if (!exhaustive && pool.size() > 100) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(100);
  }
  const std::size_t m = pool.size();
  // Distances restricted to the pool.
  std::vector<int> d(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    auto row = graphs::bfs_distances(g, pool[i]);
    for (std::size_t j = 0; j < m; ++j) d[i * m + j] = row[pool[j]];
  }
  // Twice the defect, in integers: 2 min((x|y),(y|z)) - 2 (x|z) for base w.
  auto twice = [&](std::size_t x, std::size_t y, std::size_t z, std::size_t w) {
    int xy = d[w * m + x] + d[w * m + y] - d[x * m + y];
    int yz = d[w * m + y] + d[w * m + z] - d[y * m + z];
    int xz = d[w * m + x] + d[w * m + z] - d[x * m + z];
    return std::min(xy, yz) - xz;
  };

  int best = 0;
  if (exhaustive) {
    for (std::size_t w = 0; w < m; ++w)
      for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y)
          for (std::size_t z = 0; z < m; ++z) best = std::max(best, twice(x, y, z, w));
    est.quadruples = static_cast<std::uint64_t>(m) * m * m * m;
  } else {
    const std::uint64_t n = opt.samples == 0 ? 1'000'000 : opt.samples;
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    for (std::uint64_t i = 0; i < n; ++i)
      best = std::max(best, twice(pick(rng), pick(rng), pick(rng), pick(rng)));
    est.quadruples = n;
    est.lower_bound = true;
  }
  est.value = 0.5 * best;
  return est;
}

double isolation_radius(const EuclideanCloud& a, std::size_t x) {
  require(x < a.size(), "point index out of range");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == x) continue;
    require(a[i].size() == a[x].size(), "dimension mismatch in point cloud");
    double s = 0.0;
    for (std::size_t k = 0; k < a[x].size(); ++k) s += (a[i][k] - a[x][k]) * (a[i][k] - a[x][k]);
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

namespace {

double euclid(const EPoint& a, const EPoint& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Largest number of points of s that one closed ball of radius r can hold,
// with a centre attaining it. Exact in dimensions 1 and 2: some optimal ball
// has a point at its left end (d = 1) or two points on its boundary (d = 2).
std::pair<std::size_t, EPoint> densest_ball(const EuclideanCloud& s, double r) {
  const std::size_t n = s.size();
  const std::size_t dim = s.front().size();
  const double slack = 1.0 + 1e-12;
  std::size_t best = 0;
  EPoint best_center = s.front();

  // Neighbour lists within 2r, via a sweep on the first coordinate.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return s[i][0] < s[j][0]; });
  std::vector<std::vector<std::size_t>> near(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n && s[order[b]][0] - s[order[a]][0] <= 2.0 * r * slack; ++b) {
      if (euclid(s[order[a]], s[order[b]]) <= 2.0 * r * slack) {
        near[order[a]].push_back(order[b]);
        near[order[b]].push_back(order[a]);
      }
    }

  auto consider = [&](const EPoint& y, std::size_t anchor) {
    std::size_t count = euclid(s[anchor], y) <= r * slack ? 1 : 0;
    for (std::size_t j : near[anchor]) count += euclid(s[j], y) <= r * slack ? 1 : 0;
    if (count > best) {
      best = count;
      best_center = y;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    consider(s[i], i);
    if (dim == 1) {
      consider({s[i][0] + r}, i);
      consider({s[i][0] - r}, i);
      continue;
    }
    for (std::size_t j : near[i]) {
      if (j < i) continue;
      EPoint mid(dim);
      for (std::size_t k = 0; k < dim; ++k) mid[k] = 0.5 * (s[i][k] + s[j][k]);
      consider(mid, i);
      if (dim != 2) continue;
      const double half = 0.5 * euclid(s[i], s[j]);
      if (half == 0.0) continue;
      const double h = std::sqrt(std::max(0.0, (r - half) * (r + half)));
      const double ux = -(s[j][1] - s[i][1]) / (2.0 * half);
      const double uy = (s[j][0] - s[i][0]) / (2.0 * half);
      consider({mid[0] + h * ux, mid[1] + h * uy}, i);
      consider({mid[0] - h * ux, mid[1] - h * uy}, i);
    }
  }
  return {best, best_center};
}

}  // namespace

SupportCount support_count(const EuclideanCloud& a, std::size_t x, double delta) {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(a.size() >= 2, "support is undefined for a single point");
  SupportCount out;
  out.rho = isolation_radius(a, x);
  out.outer = out.rho / delta;
  out.inner = out.rho * delta;
  require(std::isfinite(out.outer) && out.inner > 0.0, "delta out of floating-point range");

  EuclideanCloud inside;
  for (const auto& p : a)
    if (euclid(p, a[x]) <= out.outer) inside.push_back(p);
  auto [covered, center] = densest_ball(inside, out.inner);
  out.count = inside.size() - covered;
  out.center = std::move(center);
  return out;
}

Support is_supported(const EuclideanCloud& a, std::size_t x, double delta, double s) {
  require(s >= 0.0, "s must be non-negative");
  Support out;
  out.detail = support_count(a, x, delta);
  out.supported = static_cast<double>(out.detail.count) >= s;
  return out;
}

EuclideanMagic magic_euclidean(const EuclideanCloud& a, double delta, double s) {
  require(a.size() >= 2, "magic_euclidean needs at least two points");
  EuclideanMagic out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto sup = is_supported(a, i, delta, s);
    if (sup.supported) {
      out.supported.push_back(i);
    } else {
      out.unsupported.push_back({i, sup.detail.center, sup.detail.outer, sup.detail.inner});
    }
  }
  return out;
}

MagicConstantFit fit_magic_constant(int d, double delta, const std::vector<double>& s_values,
                                    std::size_t n_points, std::size_t n_clouds, std::uint64_t seed) {
  require(d >= 1, "dimension must be at least 1");
  require(n_points >= 2 && n_clouds >= 1, "need at least one cloud of two points");
  MagicConstantFit fit;
  fit.s_values = s_values;
  fit.worst_fraction.assign(s_values.size(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t c = 0; c < n_clouds; ++c) {
    EuclideanCloud cloud(n_points, EPoint(d));
    for (auto& p : cloud)
      for (auto& v : p) v = u(rng);
    std::vector<std::size_t> counts(n_points);
    for (std::size_t i = 0; i < n_points; ++i) counts[i] = support_count(cloud, i, delta).count;
    for (std::size_t k = 0; k < s_values.size(); ++k) {
      auto supported = std::count_if(counts.begin(), counts.end(),
                                     [&](std::size_t n) { return static_cast<double>(n) >= s_values[k]; });
      double frac = static_cast<double>(supported) / static_cast<double>(n_points);
      fit.worst_fraction[k] = std::max(fit.worst_fraction[k], frac);
      fit.raw = std::max(fit.raw, s_values[k] * frac);
    }
  }
  fit.c_hat = 2.0 * fit.raw;
  return fit;
}

}  // namespace hyperperc::gromov
