#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sobocert/errors.hpp"

namespace sobocert {

using VertexId = std::uint32_t;

/// Unordered vertex pair, stored with a < b.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;

  Edge() = default;
  Edge(VertexId i, VertexId j) : a(i < j ? i : j), b(i < j ? j : i) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Weighted graph with positive vertex measures and the edge measure
/// m(i,j) = max(m(i), m(j)). Immutable after construction; all views into
/// its storage stay valid for the graph's lifetime and may be shared
/// across threads.
class WeightedGraph {
 public:
  WeightedGraph(std::vector<double> vertex_measures,
                const std::vector<std::pair<VertexId, VertexId>>& edges);

  std::size_t vertex_count() const { return measures_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  double vertex_measure(VertexId v) const { return measures_[v]; }
  const std::vector<double>& vertex_measures() const { return measures_; }

  const std::vector<Edge>& edges() const { return edges_; }
  double edge_measure(const Edge& e) const {
    return measures_[e.a] > measures_[e.b] ? measures_[e.a] : measures_[e.b];
  }

  /// Sorted neighbor list of v.
  const std::vector<VertexId>& neighbors(VertexId v) const {
    return adjacency_[v];
  }

  std::size_t degree(VertexId v) const { return adjacency_[v].size(); }
  bool has_edge(VertexId i, VertexId j) const;
  bool connected() const;

  double total_vertex_measure() const;

 private:
  std::vector<double> measures_;
  std::vector<Edge> edges_;                       // sorted
  std::vector<std::vector<VertexId>> adjacency_;  // sorted per vertex
};

/// Subset of a graph's vertices with O(1) membership tests.
class VertexSubset {
 public:
  VertexSubset(const WeightedGraph& graph, std::vector<VertexId> members);

  /// Subset from a bitmask over the first 64 vertices.
  static VertexSubset from_mask(const WeightedGraph& graph,
                                std::uint64_t mask);

  const std::vector<VertexId>& members() const { return members_; }
  bool contains(VertexId v) const { return flags_[v]; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  double measure(const WeightedGraph& graph) const;

 private:
  std::vector<VertexId> members_;  // sorted
  std::vector<char> flags_;
};

/// Edges with exactly one endpoint inside omega.
std::vector<Edge> boundary(const WeightedGraph& graph,
                           const VertexSubset& omega);

double boundary_measure(const WeightedGraph& graph, const VertexSubset& omega);

struct DegreeComparability {
  std::size_t max_degree = 0;
  /// Smallest C with C^-1 m(i) <= m(j) <= C m(i) over all edges (i,j).
  double comparability = 1.0;
};

DegreeComparability degree_and_comparability(const WeightedGraph& graph);

/// Edge-list text format: `graph <N>`, then `v <index> <measure>` lines,
/// then `e <i> <j>` lines.
void write_graph(std::ostream& out, const WeightedGraph& graph);
WeightedGraph read_graph(std::istream& in);
WeightedGraph read_graph_file(const std::string& path);
void write_graph_file(const std::string& path, const WeightedGraph& graph);

}  // namespace sobocert
