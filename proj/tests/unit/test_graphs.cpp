#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <queue>

#include "hyperperc/errors.hpp"
#include "hyperperc/graphs.hpp"

using namespace hyperperc;
using namespace hyperperc::graphs;

namespace {

using C = std::complex<double>;

// Sphere sizes of the {p,q} vertex graph around a vertex, from a tiling built
// in the Poincare disk by reflecting the central p-gon through its edges.
std::vector<int> reflected_tiling_spheres(int p, int q, int layers, double* edge_length) {
  const double pi = std::numbers::pi;
  // Circumradius: cosh R = cot(pi/p) cot(pi/q).
  const double circ = std::acosh(1.0 / (std::tan(pi / p) * std::tan(pi / q)));
  const double rd = std::tanh(circ / 2.0);
  std::vector<C> first;
  for (int i = 0; i < p; ++i) first.push_back(std::polar(rd, 2.0 * pi * i / p));
  auto disk_distance = [](C a, C b) {
    return 2.0 * std::atanh(std::abs(a - b) / std::abs(1.0 - std::conj(a) * b));
  };
  *edge_length = disk_distance(first[0], first[1]);
  // Reflection through the geodesic carrying a and b: move a to 0, reflect
  // across the diameter through the image of b, move back.
  auto reflect = [](C a, C b, C z) {
    auto to0 = [a](C w) { return (w - a) / (1.0 - std::conj(a) * w); };
    const C u = to0(b) / std::abs(to0(b));
    const C w = u * u * std::conj(to0(z));
    return (w + a) / (1.0 + std::conj(a) * w);
  };

  const C root = first[0];
  const double reach = 2.0 * circ + layers * *edge_length + 1e-6;
  std::vector<C> verts;
  auto vertex_id = [&](C z) {
    for (std::size_t i = 0; i < verts.size(); ++i)
      if (disk_distance(verts[i], z) < 1e-4) return static_cast<int>(i);
    verts.push_back(z);
    return static_cast<int>(verts.size() - 1);
  };
  std::vector<std::pair<int, int>> edges;
  std::vector<C> centers{C(0.0)};
  std::queue<std::vector<C>> todo;
  todo.push(first);
  while (!todo.empty()) {
    const auto face = todo.front();
    todo.pop();
    for (int i = 0; i < p; ++i) {
      const int u = vertex_id(face[i]), v = vertex_id(face[(i + 1) % p]);
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
    for (int i = 0; i < p; ++i) {
      const C a = face[i], b = face[(i + 1) % p];
      std::vector<C> next;
      C center(0.0);
      for (const C& z : face) {
        next.push_back(reflect(a, b, z));
        center += next.back();
      }
      center /= static_cast<double>(p);
      if (disk_distance(root, center) > reach) continue;
      if (std::any_of(centers.begin(), centers.end(), [&](C c) { return disk_distance(c, center) < 1e-4; })) continue;
      centers.push_back(center);
      todo.push(next);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<std::vector<int>> adj(verts.size());
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> dist(verts.size(), -1);
  dist[0] = 0;
  std::queue<int> bfs;
  bfs.push(0);
  std::vector<int> spheres(layers + 1, 0);
  while (!bfs.empty()) {
    const int v = bfs.front();
    bfs.pop();
    if (dist[v] > layers) break;
    ++spheres[dist[v]];
    for (int u : adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        bfs.push(u);
      }
  }
  return spheres;
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("tree windows") {
  CHECK(build_tree(3, 0).size() == 1);
  CHECK(build_tree(3, 2).size() == 10);
  CHECK(build_tree(4, 3).size() == 53);
  const auto w = build_tree(3, 6);
  const auto s = sphere_sizes(w);
  for (int n = 1; n <= 6; ++n) CHECK(s[n] == 3 * (1 << (n - 1)));
  for (std::size_t v = 0; v < w.size(); ++v)
    if (!w.is_boundary(static_cast<Vertex>(v))) CHECK(w.neighbors(static_cast<Vertex>(v)).size() == 3);
  CHECK(w.edge_count() + 1 == w.size());
  CHECK_THROWS_AS(build_tree(2, 3), InvalidArgument);
}

TEST_CASE("grid windows match the L1 sphere count") {
  CHECK(build_grid(1, 3).size() == 7);
  CHECK(build_grid(2, 1).size() == 5);
  CHECK(build_grid(2, 2).size() == 13);
  for (int d : {1, 2, 3}) {
    const auto w = build_grid(d, 5);
    const auto s = sphere_sizes(w);
    for (int r = 1; r <= 5; ++r) {
      long long expect = 0;
      for (int k = 1; k <= d; ++k) expect += (1LL << k) * binom(d, k) * binom(r - 1, k - 1);
      CHECK(s[r] == expect);
    }
    for (std::size_t v = 0; v < w.size(); ++v)
      if (!w.is_boundary(static_cast<Vertex>(v))) CHECK(w.neighbors(static_cast<Vertex>(v)).size() == 2u * d);
  }
  const auto w = build_grid(2, 3);
  const auto xy = grid_coordinates(w);
  Vertex a = -1, b = -1;
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (xy[v] == std::vector<int>{0, 0}) a = static_cast<Vertex>(v);
    if (xy[v] == std::vector<int>{1, 1}) b = static_cast<Vertex>(v);
  }
  CHECK(graph_distance(w, a, b).value == 2);
  CHECK(graph_distance(w, a, a).value == 0);
}

TEST_CASE("tilings match the face-reflection construction") {
  for (auto [p, q, layers] : std::vector<std::array<int, 3>>{{3, 7, 4}, {4, 5, 4}, {7, 3, 6}, {5, 4, 4}, {6, 4, 3}}) {
    CAPTURE(p);
    CAPTURE(q);
    double ell = 0.0;
    const auto expect = reflected_tiling_spheres(p, q, layers, &ell);
    const auto w = build_tiling(p, q, layers);
    const auto got = sphere_sizes(w);
    REQUIRE(got.size() == expect.size());
    for (int r = 0; r <= layers; ++r) CHECK(got[r] == expect[r]);
    CHECK(tiling_edge_length(p, q) == doctest::Approx(ell).epsilon(1e-10));
    const auto& phi = w.embedding().coords;
    for (auto [u, v] : w.edges()) CHECK(hypgeom::distance(phi[u], phi[v]) == doctest::Approx(ell).epsilon(1e-6));
    for (std::size_t v = 0; v < w.size(); ++v)
      if (!w.is_boundary(static_cast<Vertex>(v))) CHECK(w.neighbors(static_cast<Vertex>(v)).size() == static_cast<std::size_t>(q));
  }
  CHECK(build_tiling(4, 5, 0).size() == 1);
  CHECK(build_tiling(3, 7, 1).neighbors(0).size() == 7);
  CHECK_THROWS_AS(build_tiling(4, 4, 2), InvalidArgument);
  CHECK_THROWS_AS(build_tiling(3, 6, 2), InvalidArgument);
}

TEST_CASE("discrete half-spaces") {
  const auto w = build_tree(3, 4);
  const Vertex b = w.neighbors(0)[0];
  const auto h = discrete_halfspace(w, 0, b);
  // Root plus the two subtrees away from b: 1 + 2 * (1 + 2 + 4 + 8) = 31.
  CHECK(h.size() == 31);
  CHECK(std::find(h.begin(), h.end(), b) == h.end());
  CHECK(halfspace_ties(w, 0, b).empty());

  // Union is everything and the overlap is the tie set.
  const auto g = build_grid(2, 4);
  for (Vertex a = 0; a < 6; ++a)
    for (Vertex c = a + 1; c < 9; ++c) {
      const auto ab = discrete_halfspace(g, a, c), ba = discrete_halfspace(g, c, a);
      std::vector<Vertex> uni, inter;
      std::set_union(ab.begin(), ab.end(), ba.begin(), ba.end(), std::back_inserter(uni));
      std::set_intersection(ab.begin(), ab.end(), ba.begin(), ba.end(), std::back_inserter(inter));
      CHECK(uni.size() == g.size());
      CHECK(inter == halfspace_ties(g, a, c));
    }
  CHECK_THROWS_AS(discrete_halfspace(w, 1, 1), InvalidArgument);

  // Moving b away from a along a geodesic never grows H(a, b) on a tree.
  Vertex prev = 0, cur = b;
  std::size_t last = h.size();
  for (int step = 0; step < 3; ++step) {
    Vertex next = -1;
    for (Vertex u : w.neighbors(cur))
      if (u != prev) next = u;
    prev = cur;
    cur = next;
    const auto hs = discrete_halfspace(w, 0, cur);
    CHECK(hs.size() >= last);
    CHECK(std::includes(hs.begin(), hs.end(), h.begin(), h.end()));
    last = hs.size();
  }
}

TEST_CASE("embedding defect") {
  auto w = build_tiling(3, 7, 4);
  const auto r = embedding_defect(w);
  CHECK(r.lambda > 0.0);
  CHECK(std::isfinite(r.defect));
  CHECK(*w.embedding().lambda == r.lambda);

  // Exact similarity: Z^1 embedded on a vertical geodesic with spacing 2.
  auto line = build_grid(1, 4);
  const auto xy = grid_coordinates(line);
  Embedding e;
  for (const auto& c : xy) e.coords.push_back(hypgeom::Point{0.0, std::exp(2.0 * c[0])});
  line.set_embedding(e);
  const auto lr = embedding_defect(line);
  CHECK(lr.lambda == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lr.defect < 1e-9);

  auto single = build_tree(3, 0);
  single.set_embedding(Embedding{{hypgeom::Point{0.0, 1.0}}, std::nullopt, std::nullopt});
  CHECK_THROWS_AS(embedding_defect(single), InvalidArgument);
  auto bare = build_tree(3, 2);
  CHECK_THROWS_AS(embedding_defect(bare), InvalidArgument);
}

TEST_CASE("graph distance certification") {
  const auto w = build_tree(3, 6);
  const auto d = graph_distance(w, 0, w.neighbors(w.neighbors(0)[0])[1]);
  CHECK(d.value == 2);
  CHECK(d.certified);
  Vertex deep = static_cast<Vertex>(w.size() - 1);
  CHECK_FALSE(graph_distance(w, 0, deep).certified);
  CHECK_THROWS_AS(graph_distance(w, 0, static_cast<Vertex>(w.size())), InvalidArgument);
}
