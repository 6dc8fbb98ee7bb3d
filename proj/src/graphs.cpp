#include "hyperperc/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>

#include "hyperperc/errors.hpp"

namespace hyperperc::graphs {

int Family::degree() const {
  switch (kind) {
    case FamilyKind::tree: return k;
    case FamilyKind::grid: return 2 * d;
    case FamilyKind::tiling: return q;
  }
  return 0;
}

std::string Family::name() const {
  switch (kind) {
    case FamilyKind::tree: return "tree(k=" + std::to_string(k) + ")";
    case FamilyKind::grid: return "grid(d=" + std::to_string(d) + ")";
    case FamilyKind::tiling: return "tiling{" + std::to_string(p) + "," + std::to_string(q) + "}";
  }
  return "?";
}

GraphWindow::GraphWindow(Family family, int radius, const std::vector<std::vector<Vertex>>& adjacency)
    : family_(family), radius_(radius) {
  require(!adjacency.empty(), "window must contain the root");
  offsets_.assign(adjacency.size() + 1, 0);
  for (std::size_t v = 0; v < adjacency.size(); ++v)
    offsets_[v + 1] = offsets_[v] + static_cast<std::int64_t>(adjacency[v].size());
  targets_.reserve(offsets_.back());
  for (const auto& nb : adjacency) targets_.insert(targets_.end(), nb.begin(), nb.end());
  finish();
}

GraphWindow::GraphWindow(Family family, int radius, std::vector<std::int64_t> offsets,
                         std::vector<Vertex> targets)
    : family_(family), radius_(radius), offsets_(std::move(offsets)), targets_(std::move(targets)) {
  require(offsets_.size() >= 2 && offsets_.front() == 0, "CSR offsets must start at 0");
  require(offsets_.back() == static_cast<std::int64_t>(targets_.size()), "CSR arrays inconsistent");
  finish();
}

void GraphWindow::finish() {
  require(radius_ >= 0, "window radius must be non-negative");
  const auto n = static_cast<Vertex>(offsets_.size() - 1);
  for (Vertex v = 0; v < n; ++v) {
    require(offsets_[v] <= offsets_[v + 1], "CSR offsets must be non-decreasing");
    auto nb = neighbors(v);
    for (Vertex u : nb) require(u >= 0 && u < n && u != v, "invalid adjacency entry");
    std::vector<Vertex> sorted(nb.begin(), nb.end());
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "adjacency must be simple");
  }
  // Edge ids: one per undirected edge, numbered in order of (smaller endpoint, slot).
  slot_edge_.assign(targets_.size(), -1);
  for (Vertex v = 0; v < n; ++v) {
    for (std::int64_t s = offsets_[v]; s < offsets_[v + 1]; ++s) {
      const Vertex u = targets_[s];
      if (v < u) {
        slot_edge_[s] = static_cast<std::int32_t>(edges_.size());
        edges_.emplace_back(v, u);
        continue;
      }
      auto nb = neighbors(u);
      auto it = std::find(nb.begin(), nb.end(), v);
      require(it != nb.end(), "adjacency must be symmetric");
      slot_edge_[s] = slot_edge_[offsets_[u] + (it - nb.begin())];
    }
  }

  depth_.assign(n, kUnreachable);
  depth_[0] = 0;
  std::deque<Vertex> queue{0};
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    for (Vertex u : neighbors(v))
      if (depth_[u] == kUnreachable) {
        depth_[u] = depth_[v] + 1;
        queue.push_back(u);
      }
  }
  for (int d : depth_) {
    require(d != kUnreachable, "window must be connected");
    require(d <= radius_, "window contains a vertex beyond its radius");
  }
}

const Embedding& GraphWindow::embedding() const {
  require(embedding_.has_value(), "window has no embedding");
  return *embedding_;
}

void GraphWindow::set_embedding(Embedding e) {
  require(e.coords.size() == size(), "embedding must give one point per vertex");
  embedding_ = std::move(e);
}

void GraphWindow::set_rough_similarity(double lambda, double defect) {
  require(embedding_.has_value(), "window has no embedding");
  embedding_->lambda = lambda;
  embedding_->defect = defect;
}

GraphWindow build_tree(int k, int radius) {
  require(k >= 3, "tree degree must be at least 3");
  require(radius >= 0, "radius must be non-negative");
  double expected = 1.0;
  for (int r = 1; r <= radius; ++r) expected += k * std::pow(k - 1.0, r - 1);
  if (expected > static_cast<double>(kMaxVertices)) throw ResourceLimit("tree window too large");

  std::vector<std::vector<Vertex>> adj(1);
  std::vector<Vertex> frontier{0};
  for (int r = 0; r < radius; ++r) {
    std::vector<Vertex> next;
    for (Vertex v : frontier) {
      int children = v == 0 ? k : k - 1;
      for (int c = 0; c < children; ++c) {
        auto u = static_cast<Vertex>(adj.size());
        adj.push_back({v});
        adj[v].push_back(u);
        next.push_back(u);
      }
    }
    frontier = std::move(next);
  }
  return GraphWindow(Family::tree(k), radius, adj);
}

namespace {

std::vector<std::vector<int>> l1_ball_bfs(int d, int radius, std::map<std::vector<int>, Vertex>& index) {
  std::vector<std::vector<int>> pts{std::vector<int>(d, 0)};
  index.emplace(pts[0], 0);
  for (std::size_t head = 0; head < pts.size(); ++head) {
    auto base = pts[head];
    int norm = 0;
    for (int c : base) norm += std::abs(c);
    if (norm == radius) continue;
    for (int i = 0; i < d; ++i)
      for (int s : {1, -1}) {
        auto x = base;
        x[i] += s;
        if (index.emplace(x, static_cast<Vertex>(pts.size())).second) pts.push_back(x);
      }
  }
  return pts;
}

}  // namespace

GraphWindow build_grid(int d, int radius) {
  require(d >= 1, "grid dimension must be at least 1");
  require(radius >= 0, "radius must be non-negative");
  // |L1 ball| <= (2R+1)^d
  if (std::pow(2.0 * radius + 1.0, d) > 4.0 * static_cast<double>(kMaxVertices) &&
      std::pow(2.0 * radius + 1.0, d) / std::tgamma(d + 1.0) > static_cast<double>(kMaxVertices))
    throw ResourceLimit("grid window too large");
  std::map<std::vector<int>, Vertex> index;
  auto pts = l1_ball_bfs(d, radius, index);
  if (pts.size() > kMaxVertices) throw ResourceLimit("grid window too large");
  std::vector<std::vector<Vertex>> adj(pts.size());
  for (std::size_t v = 0; v < pts.size(); ++v)
    for (int i = 0; i < d; ++i)
      for (int s : {1, -1}) {
        auto x = pts[v];
        x[i] += s;
        auto it = index.find(x);
        if (it != index.end()) adj[v].push_back(it->second);
      }
  return GraphWindow(Family::grid(d), radius, adj);
}

GraphWindow build_window(const Family& family, int radius) {
  switch (family.kind) {
    case FamilyKind::tree: return build_tree(family.k, radius);
    case FamilyKind::grid: return build_grid(family.d, radius);
    case FamilyKind::tiling: return build_tiling(family.p, family.q, radius);
  }
  throw InvalidArgument("unknown family");
}

std::vector<std::vector<int>> grid_coordinates(const GraphWindow& w) {
  require(w.family().kind == FamilyKind::grid, "grid_coordinates needs a grid window");
  std::map<std::vector<int>, Vertex> index;
  auto pts = l1_ball_bfs(w.family().d, w.radius(), index);
  require(pts.size() == w.size(), "window does not match its grid family");
  return pts;
}

std::vector<int> bfs_distances(const GraphWindow& w, Vertex source) {
  require(w.contains(source), "invalid vertex id");
  std::vector<int> dist(w.size(), kUnreachable);
  std::vector<Vertex> queue;
  queue.reserve(w.size());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex v = queue[head];
    for (Vertex u : w.neighbors(v))
      if (dist[u] == kUnreachable) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  return dist;
}

std::vector<int> sphere_sizes(const GraphWindow& w) {
  std::vector<int> s(w.radius() + 1, 0);
  for (std::size_t v = 0; v < w.size(); ++v) ++s[w.depth(static_cast<Vertex>(v))];
  return s;
}

GraphDistance graph_distance(const GraphWindow& w, Vertex u, Vertex v) {
  require(w.contains(u) && w.contains(v), "invalid vertex id");
  GraphDistance g;
  g.value = u == v ? 0 : bfs_distances(w, u)[v];
  g.certified = 2 * w.depth(u) <= w.radius() && 2 * w.depth(v) <= w.radius();
  return g;
}

VertexSet discrete_halfspace(const GraphWindow& w, Vertex a, Vertex b) {
  require(w.contains(a) && w.contains(b), "invalid vertex id");
  require(a != b, "discrete half-space needs a != b");
  auto da = bfs_distances(w, a), db = bfs_distances(w, b);
  VertexSet out;
  for (std::size_t v = 0; v < w.size(); ++v)
    if (da[v] <= db[v]) out.push_back(static_cast<Vertex>(v));
  return out;
}

VertexSet halfspace_ties(const GraphWindow& w, Vertex a, Vertex b) {
  require(w.contains(a) && w.contains(b), "invalid vertex id");
  require(a != b, "discrete half-space needs a != b");
  auto da = bfs_distances(w, a), db = bfs_distances(w, b);
  VertexSet out;
  for (std::size_t v = 0; v < w.size(); ++v)
    if (da[v] == db[v]) out.push_back(static_cast<Vertex>(v));
  return out;
}

bool proper_halfspace_proxy(const GraphWindow& w, Vertex a, Vertex b) {
  require(w.contains(a) && w.contains(b) && a != b, "invalid half-space endpoints");
  auto da = bfs_distances(w, a), db = bfs_distances(w, b);
  const int dab = da[b];
  // Multi-source BFS from every vertex on some geodesic between a and b.
  std::vector<int> dist(w.size(), kUnreachable);
  std::vector<Vertex> queue;
  for (std::size_t v = 0; v < w.size(); ++v)
    if (da[v] + db[v] == dab) {
      dist[v] = 0;
      queue.push_back(static_cast<Vertex>(v));
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex v = queue[head];
    for (Vertex u : w.neighbors(v))
      if (dist[u] == kUnreachable) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  bool side_a = false, side_b = false;
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (!w.is_boundary(static_cast<Vertex>(v)) || 2 * dist[v] < w.radius()) continue;
    if (da[v] < db[v]) side_a = true;
    if (db[v] < da[v]) side_b = true;
  }
  return side_a && side_b;
}

RoughSimilarity embedding_defect(GraphWindow& w, std::size_t sample_pairs, std::uint64_t seed) {
  require(w.has_embedding(), "embedding_defect needs an embedded window");
  require(w.size() >= 2, "embedding_defect needs at least two vertices");
  const auto& pts = w.embedding().coords;
  const std::size_t n = w.size();
  std::vector<std::pair<int, double>> samples;  // (d_G, d_H)

  const std::size_t all = n * (n - 1) / 2;
  if (sample_pairs == 0 || sample_pairs >= all) {
    for (std::size_t u = 0; u < n; ++u) {
      auto du = bfs_distances(w, static_cast<Vertex>(u));
      for (std::size_t v = u + 1; v < n; ++v)
        samples.emplace_back(du[v], hypgeom::distance(pts[u], pts[v]));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::map<Vertex, std::vector<int>> cache;
    while (samples.size() < sample_pairs) {
      auto u = static_cast<Vertex>(pick(rng)), v = static_cast<Vertex>(pick(rng));
      if (u == v) continue;
      auto it = cache.find(u);
      if (it == cache.end()) it = cache.emplace(u, bfs_distances(w, u)).first;
      samples.emplace_back(it->second[v], hypgeom::distance(pts[u], pts[v]));
    }
  }

  double sgh = 0.0, sgg = 0.0;
  for (auto [g, h] : samples) {
    sgh += g * h;
    sgg += static_cast<double>(g) * g;
  }
  RoughSimilarity r;
  r.lambda = sgh / sgg;
  for (auto [g, h] : samples) r.defect = std::max(r.defect, std::abs(r.lambda * g - h));
  r.pairs = samples.size();
  w.set_rough_similarity(r.lambda, r.defect);
  return r;
}

}  // namespace hyperperc::graphs
