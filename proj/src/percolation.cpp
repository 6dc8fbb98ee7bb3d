#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "percolation_internal.hpp"

namespace hyperperc::percolation {

using namespace detail;

Philox::Block Philox::generate(Block c, std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::atomic<unsigned> g_threads{0};

}  // namespace

double uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t key, std::uint32_t stream) {
  const std::uint64_t k = splitmix(seed ^ splitmix(stream));
  auto out = Philox::generate({static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32),
                               static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
                              {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)});
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void set_default_threads(unsigned n) { g_threads = n; }

unsigned default_threads() {
  unsigned n = g_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

Configuration::Configuration(const GraphWindow& w, std::vector<std::uint8_t> open)
    : open_(std::move(open)), parent_(w.size()), size_(w.size(), 1), clusters_(w.size()) {
  require(open_.size() == w.edge_count(), "one bit per edge required");
  std::iota(parent_.begin(), parent_.end(), 0);
  const auto& edges = w.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!open_[e]) continue;
    Vertex a = find(edges[e].first), b = find(edges[e].second);
    if (a == b) continue;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --clusters_;
  }
}

Vertex Configuration::find(Vertex v) const {
  Vertex root = v;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[v] != root) {
    Vertex next = parent_[v];
    parent_[v] = root;
    v = next;
  }
  return root;
}

Configuration sample(const GraphWindow& w, double p, std::uint64_t seed, std::uint64_t index) {
  check_p(p);
  std::vector<std::uint8_t> open(w.edge_count());
  for (std::size_t e = 0; e < open.size(); ++e) open[e] = uniform(seed, index, e, kEdgeStream) < p;
  return Configuration(w, std::move(open));
}

namespace {

struct PairCounts {
  std::vector<std::uint64_t> hits;
  std::vector<std::uint64_t> touched;
  PairCounts& operator+=(const PairCounts& o) {
    if (hits.empty()) {
      hits.assign(o.hits.size(), 0);
      touched.assign(o.touched.size(), 0);
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      hits[i] += o.hits[i];
      touched[i] += o.touched[i];
    }
    return *this;
  }
};

Estimate binomial(std::uint64_t hits, std::uint64_t touched, std::uint64_t n) {
  Estimate e;
  e.n_samples = n;
  e.value = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
  e.boundary_touch_fraction = static_cast<double>(touched) / static_cast<double>(n);
  return e;
}

}  // namespace

std::vector<Estimate> two_point_estimate(const GraphWindow& w, double p,
                                         const std::vector<std::pair<Vertex, Vertex>>& pairs,
                                         std::uint64_t n_samples, std::uint64_t seed, Exec exec) {
  check_p(p);
  check_samples(n_samples);
  for (auto [u, v] : pairs) require(w.contains(u) && w.contains(v), "invalid pair id");

  // Group pairs by source so each source cluster is explored once per sample.
  std::vector<Vertex> sources;
  for (auto [u, v] : pairs) sources.push_back(u);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  std::vector<std::vector<std::size_t>> by_source(sources.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto s = std::lower_bound(sources.begin(), sources.end(), pairs[i].first) - sources.begin();
    by_source[s].push_back(i);
  }

  PairCounts init{std::vector<std::uint64_t>(pairs.size(), 0), std::vector<std::uint64_t>(pairs.size(), 0)};
  auto parts = run_chunks(n_samples, exec.threads, init,
                          [&](std::uint64_t b, std::uint64_t e, PairCounts& acc) {
    WindowExplorer ex(w);
    std::vector<std::uint8_t> want(w.size(), 0);
    for (std::uint64_t s = b; s < e; ++s) {
      for (std::size_t si = 0; si < sources.size(); ++si) {
        std::size_t remaining = 0;
        for (std::size_t i : by_source[si])
          if (!want[pairs[i].second]) {
            want[pairs[i].second] = 1;
            ++remaining;
          }
        bool touched = ex.explore(p, seed, s, sources[si], [&](Vertex v) {
          if (want[v]) {
            want[v] = 0;
            --remaining;
          }
          return remaining > 0;
        });
        for (std::size_t i : by_source[si]) {
          want[pairs[i].second] = 0;
          if (ex.visited(pairs[i].second)) ++acc.hits[i];
          if (touched) ++acc.touched[i];
        }
      }
    }
  });
  PairCounts total = reduce(parts);
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out.push_back(binomial(total.hits[i], total.touched[i], n_samples));
  return out;
}

Estimate susceptibility_estimate(const GraphWindow& w, double p, Vertex v, std::uint64_t n_samples,
                                 std::uint64_t seed, Exec exec) {
  check_p(p);
  check_samples(n_samples);
  require(w.contains(v), "invalid vertex id");
  auto parts = run_chunks(n_samples, exec.threads, Moments{},
                          [&](std::uint64_t b, std::uint64_t e, Moments& acc) {
    WindowExplorer ex(w);
    for (std::uint64_t s = b; s < e; ++s) {
      std::uint64_t size = 0;
      if (ex.explore(p, seed, s, v, [&](Vertex) { return ++size, true; })) ++acc.touched;
      acc.add(static_cast<double>(size));
    }
  });
  return finish(reduce(parts), n_samples);
}

KappaEstimate kappa_estimate(const GraphWindow& w, double p, int n_dist, std::uint64_t n_samples,
                             std::uint64_t seed, Exec exec) {
  require(n_dist >= 0, "n_dist must be non-negative");
  require(n_dist <= w.radius(), "n_dist exceeds the window radius");
  std::vector<Vertex> rep(n_dist + 1, graphs::kUnreachable);
  for (std::size_t v = 0; v < w.size(); ++v) {
    int d = w.depth(static_cast<Vertex>(v));
    if (d <= n_dist && rep[d] == graphs::kUnreachable) rep[d] = static_cast<Vertex>(v);
  }
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex r : rep) pairs.emplace_back(w.root(), r);
  KappaEstimate out;
  out.per_distance = two_point_estimate(w, p, pairs, n_samples, seed, exec);
  for (int d = 0; d <= n_dist; ++d)
    if (out.per_distance[d].value < out.per_distance[out.argmin_distance].value) out.argmin_distance = d;
  out.estimate = out.per_distance[out.argmin_distance];
  return out;
}

std::vector<std::uint64_t> tail_grid(std::uint64_t n_max) {
  require(n_max >= 1, "n_max must be at least 1");
  std::vector<std::uint64_t> g;
  for (std::uint64_t n = 1; n <= std::min<std::uint64_t>(n_max, 10); ++n) g.push_back(n);
  for (int i = 21;; ++i) {
    auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, i / 20.0)));
    if (n > n_max) break;
    if (n > g.back()) g.push_back(n);
  }
  if (g.back() != n_max) g.push_back(n_max);
  return g;
}

TailCurve detail::finish_tail(const std::vector<std::uint64_t>& grid, const TailCounts& total, std::uint64_t n) {
  TailCurve c;
  c.n_samples = n;
  c.boundary_touch_fraction = static_cast<double>(total.touched) / static_cast<double>(n);
  std::uint64_t running = 0;
  std::vector<std::uint64_t> ge(grid.size());
  for (std::size_t i = grid.size(); i-- > 0;) ge[i] = running += total.at_least[i];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double q = static_cast<double>(ge[i]) / static_cast<double>(n);
    c.points.push_back({grid[i], q, std::sqrt(q * (1.0 - q) / static_cast<double>(n))});
  }
  return c;
}


TailCurve cluster_tail(const GraphWindow& w, double p, Vertex v, std::uint64_t n_max,
                       std::uint64_t n_samples, std::uint64_t seed, Exec exec) {
  check_p(p);
  check_samples(n_samples);
  require(w.contains(v), "invalid vertex id");
  const auto grid = tail_grid(n_max);
  TailCounts init{std::vector<std::uint64_t>(grid.size(), 0), 0};
  auto parts = run_chunks(n_samples, exec.threads, init,
                          [&](std::uint64_t b, std::uint64_t e, TailCounts& acc) {
    WindowExplorer ex(w);
    for (std::uint64_t s = b; s < e; ++s) {
      std::uint64_t size = 0;
      if (ex.explore(p, seed, s, v, [&](Vertex) { return ++size < n_max; })) ++acc.touched;
      acc.record(grid, size);
    }
  });
  return finish_tail(grid, reduce(parts), n_samples);
}

SlopeFit fit_tail_slope(const TailCurve& c, double n_lo, double n_hi) {
  std::vector<double> x, y;
  for (const auto& pt : c.points) {
    const double n = static_cast<double>(pt.n);
    if (n < n_lo || n > n_hi || pt.probability <= 0.0) continue;
    x.push_back(std::log(n));
    y.push_back(std::log(pt.probability));
  }
  SlopeFit fit;
  fit.points_used = x.size();
  require(x.size() >= 3, "slope fit needs at least three positive points in range");
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.slope_std_error = x.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;

  // Quadratic term on centred x; orthogonalise x^2 against {1, x}.
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mx) * (x[i] - mx);
  const double mz = std::accumulate(z.begin(), z.end(), 0.0) / m;
  double sxz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxz += (x[i] - mx) * (z[i] - mz);
  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double zr = (z[i] - mz) - sxz / sxx * (x[i] - mx);
    szz += zr * zr;
    szy += zr * (y[i] - my);
  }
  if (x.size() > 3 && szz > 0.0) {
    fit.curvature = szy / szz;
    double rss2 = 0.0;
    const double b = (sxy - fit.curvature * sxz) / sxx;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = (y[i] - my) - b * (x[i] - mx) - fit.curvature * (z[i] - mz);
      rss2 += r * r;
    }
    fit.curvature_std_error = std::sqrt(rss2 / (m - 3.0) / szz);
    fit.power_law_rejected =
        std::abs(fit.curvature) > 0.05 && std::abs(fit.curvature) > 3.0 * fit.curvature_std_error;
  }
  return fit;
}

HalfspaceMass halfspace_cluster_mass(const GraphWindow& w, double p, Vertex v, const hypgeom::HalfSpace& h,
                                     std::uint64_t n_samples, std::uint64_t seed, Exec exec) {
  check_p(p);
  check_samples(n_samples);
  require(w.has_embedding(), "halfspace_cluster_mass needs an embedded window");
  require(w.contains(v), "invalid vertex id");
  const auto& phi = w.embedding().coords;
  std::vector<std::uint8_t> in_h(w.size());
  for (std::size_t u = 0; u < w.size(); ++u) in_h[u] = h.contains(phi[u]);

  struct Pair {
    Moments mass, chi;
    Pair& operator+=(const Pair& o) {
      mass += o.mass;
      chi += o.chi;
      return *this;
    }
  };
  auto parts = run_chunks(n_samples, exec.threads, Pair{},
                          [&](std::uint64_t b, std::uint64_t e, Pair& acc) {
    WindowExplorer ex(w);
    for (std::uint64_t s = b; s < e; ++s) {
      std::uint64_t size = 0, inside = 0;
      bool touched = ex.explore(p, seed, s, v, [&](Vertex u) {
        ++size;
        inside += in_h[u];
        return true;
      });
      acc.mass.add(static_cast<double>(inside));
      acc.chi.add(static_cast<double>(size));
      if (touched) {
        ++acc.mass.touched;
        ++acc.chi.touched;
      }
    }
  });
  Pair total = reduce(parts);
  HalfspaceMass out;
  out.mass = finish(total.mass, n_samples);
  out.susceptibility = finish(total.chi, n_samples);
  out.distance = hypgeom::distance_to_halfspace(phi[v], h);
  return out;
}

Estimate walk_two_point_estimate(const GraphWindow& w, double p, int n_steps, std::uint64_t n_samples,
                                 std::uint64_t seed, Exec exec) {
  check_p(p);
  check_samples(n_samples);
  require(n_steps >= 0, "n_steps must be non-negative");
  require(w.radius() >= n_steps, "window radius must be at least n_steps");
  auto parts = run_chunks(n_samples, exec.threads, Moments{},
                          [&](std::uint64_t b, std::uint64_t e, Moments& acc) {
    WindowExplorer ex(w);
    for (std::uint64_t s = b; s < e; ++s) {
      Vertex x = w.root();
      for (int step = 0; step < n_steps; ++step) {
        auto nb = w.neighbors(x);
        const double u = uniform(seed, s, static_cast<std::uint64_t>(step), kWalkStream);
        x = nb[std::min<std::size_t>(nb.size() - 1, static_cast<std::size_t>(u * static_cast<double>(nb.size())))];
      }
      if (x == w.root()) {
        acc.add(1.0);
        continue;
      }
      bool found = false;
      const Vertex target = x;
      if (ex.explore(p, seed, s, w.root(), [&](Vertex v) { return !(found = (v == target)); })) ++acc.touched;
      acc.add(found ? 1.0 : 0.0);
    }
  });
  return finish(reduce(parts), n_samples);
}

DerivativeCheck susceptibility_derivative_check(const GraphWindow& w, double p, double h,
                                                std::uint64_t n_samples, std::uint64_t seed, Exec exec) {
  check_samples(n_samples);
  return derivative_from(p, h, n_samples, exec.threads, [&] {
    return [&w, seed, ex = std::make_shared<WindowExplorer>(w)](double q, std::uint64_t s) {
      std::uint64_t size = 0;
      bool touched = ex->explore(q, seed, s, w.root(), [&](Vertex) { return ++size, true; });
      return std::pair{size, touched};
    };
  });
}

}  // namespace hyperperc::percolation
