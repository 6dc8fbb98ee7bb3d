#pragma once

// Finite windows (balls around a root) of infinite vertex-transitive graphs:
// k-regular trees, Z^d, and {p,q} tilings of H^2 with explicit coordinates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperperc/hypgeom.hpp"

namespace hyperperc::graphs {

using Vertex = std::int32_t;
using VertexSet = std::vector<Vertex>;  // sorted ids

inline constexpr std::size_t kMaxVertices = 10'000'000;

enum class FamilyKind { tree, grid, tiling };

struct Family {
  FamilyKind kind = FamilyKind::tree;
  int k = 0;  // tree degree
  int d = 0;  // grid dimension
  int p = 0;  // tiling face size
  int q = 0;  // tiling vertex degree

  static Family tree(int k) { return {FamilyKind::tree, k, 0, 0, 0}; }
  static Family grid(int d) { return {FamilyKind::grid, 0, d, 0, 0}; }
  static Family tiling(int p, int q) { return {FamilyKind::tiling, 0, 0, p, q}; }

  // Degree of every vertex of the infinite graph.
  int degree() const;
  std::string name() const;
  bool operator==(const Family&) const = default;
};

struct Embedding {
  std::vector<hypgeom::Point> coords;
  std::optional<double> lambda;  // rough-similarity scale
  std::optional<double> defect;  // additive defect
};

class GraphWindow {
 public:
  // Vertex 0 is the root. Depths are recomputed by BFS; vertices at depth
  // `radius` are the boundary.
  GraphWindow(Family family, int radius, const std::vector<std::vector<Vertex>>& adjacency);
  GraphWindow(Family family, int radius, std::vector<std::int64_t> offsets,
              std::vector<Vertex> targets);

  std::size_t size() const { return depth_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  int radius() const { return radius_; }
  Vertex root() const { return 0; }
  const Family& family() const { return family_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  // Edge ids parallel to neighbors(v).
  std::span<const std::int32_t> incident_edges(Vertex v) const {
    return {slot_edge_.data() + offsets_[v], slot_edge_.data() + offsets_[v + 1]};
  }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }
  const std::vector<std::int64_t>& offsets() const { return offsets_; }
  const std::vector<Vertex>& targets() const { return targets_; }

  int depth(Vertex v) const { return depth_[v]; }
  bool is_boundary(Vertex v) const { return depth_[v] == radius_; }
  bool contains(Vertex v) const { return v >= 0 && static_cast<std::size_t>(v) < size(); }

  bool has_embedding() const { return embedding_.has_value(); }
  const Embedding& embedding() const;
  void set_embedding(Embedding e);
  void set_rough_similarity(double lambda, double defect);

 private:
  void finish();

  Family family_;
  int radius_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<Vertex> targets_;
  std::vector<std::int32_t> slot_edge_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<int> depth_;
  std::optional<Embedding> embedding_;
};

GraphWindow build_tree(int k, int radius);
GraphWindow build_grid(int d, int radius);
// Graph-distance ball of radius `layers` in the vertex graph of the {p,q}
// tiling, with half-plane coordinates and a measured rough-similarity defect.
GraphWindow build_tiling(int p, int q, int layers);
GraphWindow build_window(const Family& family, int radius);

// Edge length of the {p,q} tiling: 2 arcosh(cos(pi/p) / sin(pi/q)).
double tiling_edge_length(int p, int q);

// Integer coordinates of each grid vertex (grid windows only).
std::vector<std::vector<int>> grid_coordinates(const GraphWindow& w);

inline constexpr int kUnreachable = -1;
std::vector<int> bfs_distances(const GraphWindow& w, Vertex source);
std::vector<int> sphere_sizes(const GraphWindow& w);

struct GraphDistance {
  int value = 0;
  // True when both endpoints lie within R/2 of the root, where window and
  // infinite-graph distances are guaranteed to agree.
  bool certified = false;
};
GraphDistance graph_distance(const GraphWindow& w, Vertex u, Vertex v);

// H_G(a, b) = {v : d(v,a) <= d(v,b)}; ties belong to both H_G(a,b) and H_G(b,a).
VertexSet discrete_halfspace(const GraphWindow& w, Vertex a, Vertex b);
VertexSet halfspace_ties(const GraphWindow& w, Vertex a, Vertex b);
// Proxy for properness: both sides contain boundary vertices at distance
// >= R/2 from the geodesic interval [a, b]. Not a decision procedure.
bool proper_halfspace_proxy(const GraphWindow& w, Vertex a, Vertex b);

struct RoughSimilarity {
  double lambda = 0.0;
  double defect = 0.0;
  std::size_t pairs = 0;
};
// Least-squares slope (through the origin) of d_H against d_G and the maximal
// residual. sample_pairs == 0 uses every pair. Writes both into the window.
RoughSimilarity embedding_defect(GraphWindow& w, std::size_t sample_pairs = 0,
                                 std::uint64_t seed = 1);

}  // namespace hyperperc::graphs
