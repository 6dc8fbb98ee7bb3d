#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "hyperperc/errors.hpp"
#include "hyperperc/graphs.hpp"

// Vertices are generated in the hyperboloid model {t^2 - x^2 - y^2 = 1}. Each
// vertex carries a Lorentz frame whose first spatial axis points back along the
// edge it was discovered from; its q neighbours sit at angles 2*pi*j/q from that
// axis at distance equal to the edge length.

namespace hyperperc::graphs {

namespace {

using Mat3 = std::array<double, 9>;  // row-major, acting on (t, x, y)
using Vec3 = std::array<double, 3>;

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[3 * i + k] * b[3 * k + j];
      c[3 * i + j] = s;
    }
  return c;
}

Mat3 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {1, 0, 0, 0, c, -s, 0, s, c};
}

Mat3 boost(double ell) {
  const double c = std::cosh(ell), s = std::sinh(ell);
  return {c, s, 0, s, c, 0, 0, 0, 1};
}

struct CellKey {
  std::int64_t i, j;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    return std::hash<std::int64_t>()(k.i * 0x9E3779B97F4A7C15LL ^ (k.j + 0x632BE59BD9B4E019LL));
  }
};

class PointIndex {
 public:
  PointIndex(double cell, double match) : cell_(cell), match2_(match * match) {}

  Vertex find(const Vec3& p, const std::vector<Vec3>& pts) const {
    auto base = key(p);
    for (std::int64_t di = -1; di <= 1; ++di)
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = cells_.find({base.i + di, base.j + dj});
        if (it == cells_.end()) continue;
        for (Vertex v : it->second) {
          const double dx = pts[v][1] - p[1], dy = pts[v][2] - p[2];
          if (dx * dx + dy * dy < match2_) return v;
        }
      }
    return kUnreachable;
  }

  void insert(Vertex v, const Vec3& p) { cells_[key(p)].push_back(v); }

 private:
  CellKey key(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p[1] / cell_)),
            static_cast<std::int64_t>(std::floor(p[2] / cell_))};
  }

  double cell_, match2_;
  std::unordered_map<CellKey, std::vector<Vertex>, CellHash> cells_;
};

}  // namespace

double tiling_edge_length(int p, int q) {
  require((p - 2) * (q - 2) > 4, "{p,q} must be hyperbolic: (p-2)(q-2) > 4");
  return 2.0 * std::acosh(std::cos(std::numbers::pi / p) / std::sin(std::numbers::pi / q));
}

GraphWindow build_tiling(int p, int q, int layers) {
  require(p >= 3 && q >= 3, "tiling needs p, q >= 3");
  const double ell = tiling_edge_length(p, q);
  require(layers >= 0, "layers must be non-negative");

  // Distinct vertices are at hyperbolic distance >= ell, hence their (x, y)
  // projections are at Euclidean distance >= sqrt(2) sinh(ell / 2).
  const double sep = std::sqrt(2.0) * std::sinh(ell / 2.0);
  PointIndex index(sep, 0.3 * sep);

  const Mat3 step = boost(ell);
  const Mat3 turn = rotation(std::numbers::pi);
  std::vector<Mat3> frames{rotation(0.0)};
  std::vector<Vec3> pts{{1.0, 0.0, 0.0}};
  std::vector<int> depth{0};
  std::vector<std::vector<Vertex>> adj(1);
  index.insert(0, pts[0]);

  for (std::size_t head = 0; head < pts.size(); ++head) {
    const auto v = static_cast<Vertex>(head);
    for (int j = 0; j < q; ++j) {
      const Mat3 f = mul(mul(frames[v], rotation(2.0 * std::numbers::pi * j / q)), step);
      const Vec3 w{f[0], f[3], f[6]};  // f applied to the origin (1, 0, 0)
      Vertex u = index.find(w, pts);
      if (u == kUnreachable) {
        if (depth[v] >= layers) continue;
        if (pts.size() >= kMaxVertices) throw ResourceLimit("tiling window too large");
        u = static_cast<Vertex>(pts.size());
        pts.push_back(w);
        frames.push_back(mul(f, turn));
        depth.push_back(depth[v] + 1);
        adj.emplace_back();
        index.insert(u, w);
      }
      if (u == v) continue;
      auto& nb = adj[v];
      if (std::find(nb.begin(), nb.end(), u) == nb.end()) {
        nb.push_back(u);
        adj[u].push_back(v);
      }
    }
  }

  GraphWindow w(Family::tiling(p, q), layers, adj);
  Embedding e;
  e.coords.reserve(pts.size());
  for (const auto& x : pts) {
    const double denom = x[0] - x[1];
    e.coords.emplace_back(std::vector<double>{x[2] / denom, 1.0 / denom});
  }
  w.set_embedding(std::move(e));
  if (w.size() >= 2) embedding_defect(w, w.size() <= 4000 ? 0 : 2'000'000);
  return w;
}

}  // namespace hyperperc::graphs
