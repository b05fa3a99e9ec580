#include "sobocert/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sobocert {

WeightedGraph::WeightedGraph(
    std::vector<double> vertex_measures,
    const std::vector<std::pair<VertexId, VertexId>>& edges)
    : measures_(std::move(vertex_measures)) {
  const std::size_t n = measures_.size();
  for (std::size_t v = 0; v < n; ++v) {
    if (!(measures_[v] > 0.0) || !std::isfinite(measures_[v])) {
      throw Error(ErrorCode::NonPositiveMeasure,
                  "vertex " + std::to_string(v) + " has measure " +
                      std::to_string(measures_[v]));
    }
  }
  edges_.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) +
                      ") on " + std::to_string(n) + " vertices");
    }
    if (i == j) {
      throw Error(ErrorCode::SelfLoop, "vertex " + std::to_string(i));
    }
    edges_.emplace_back(i, j);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    auto it = std::adjacent_find(edges_.begin(), edges_.end());
    throw Error(ErrorCode::DuplicateEdge,
                "(" + std::to_string(it->a) + "," + std::to_string(it->b) +
                    ")");
  }
  adjacency_.assign(n, {});
  for (const Edge& e : edges_) {
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

bool WeightedGraph::has_edge(VertexId i, VertexId j) const {
  if (i >= vertex_count() || j >= vertex_count() || i == j) return false;
  const auto& list = adjacency_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

bool WeightedGraph::connected() const {
  const std::size_t n = vertex_count();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

double WeightedGraph::total_vertex_measure() const {
  double total = 0.0;
  for (double m : measures_) total += m;
  return total;
}

VertexSubset::VertexSubset(const WeightedGraph& graph,
                           std::vector<VertexId> members)
    : members_(std::move(members)), flags_(graph.vertex_count(), 0) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()),
                 members_.end());
  for (VertexId v : members_) {
    if (v >= graph.vertex_count()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "subset member " + std::to_string(v));
    }
    flags_[v] = 1;
  }
}

VertexSubset VertexSubset::from_mask(const WeightedGraph& graph,
                                     std::uint64_t mask) {
  std::vector<VertexId> members;
  for (std::size_t v = 0; v < graph.vertex_count() && v < 64; ++v) {
    if (mask & (1ULL << v)) members.push_back(static_cast<VertexId>(v));
  }
  return VertexSubset(graph, std::move(members));
}

double VertexSubset::measure(const WeightedGraph& graph) const {
  double total = 0.0;
  for (VertexId v : members_) total += graph.vertex_measure(v);
  return total;
}

std::vector<Edge> boundary(const WeightedGraph& graph,
                           const VertexSubset& omega) {
  std::vector<Edge> result;
  for (const Edge& e : graph.edges()) {
    if (omega.contains(e.a) != omega.contains(e.b)) result.push_back(e);
  }
  return result;
}

double boundary_measure(const WeightedGraph& graph,
                        const VertexSubset& omega) {
  double total = 0.0;
  for (const Edge& e : graph.edges()) {
    if (omega.contains(e.a) != omega.contains(e.b)) {
      total += graph.edge_measure(e);
    }
  }
  return total;
}

DegreeComparability degree_and_comparability(const WeightedGraph& graph) {
  if (graph.vertex_count() == 0) {
    throw Error(ErrorCode::EmptyGraph, "degree_and_comparability");
  }
  DegreeComparability result;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    result.max_degree = std::max(result.max_degree, graph.degree(v));
  }
  for (const Edge& e : graph.edges()) {
    const double mi = graph.vertex_measure(e.a);
    const double mj = graph.vertex_measure(e.b);
    result.comparability =
        std::max({result.comparability, mi / mj, mj / mi});
  }
  return result;
}

void write_graph(std::ostream& out, const WeightedGraph& graph) {
  out << "graph " << graph.vertex_count() << "\n";
  out.precision(17);
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    out << "v " << v << " " << graph.vertex_measure(v) << "\n";
  }
  for (const Edge& e : graph.edges()) {
    out << "e " << e.a << " " << e.b << "\n";
  }
}

WeightedGraph read_graph(std::istream& in) {
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "graph") {
    throw Error(ErrorCode::IoError, "expected `graph <N>` header");
  }
  std::vector<double> measures(n, 0.0);
  std::vector<char> have(n, 0);
  std::vector<std::pair<VertexId, VertexId>> edges;
  while (in >> tag) {
    if (tag == "v") {
      std::size_t idx;
      double m;
      if (!(in >> idx >> m)) throw Error(ErrorCode::IoError, "bad `v` line");
      if (idx >= n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "vertex index " + std::to_string(idx));
      }
      measures[idx] = m;
      have[idx] = 1;
    } else if (tag == "e") {
      VertexId i, j;
      if (!(in >> i >> j)) throw Error(ErrorCode::IoError, "bad `e` line");
      edges.emplace_back(i, j);
    } else {
      throw Error(ErrorCode::IoError, "unknown record `" + tag + "`");
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!have[v]) {
      throw Error(ErrorCode::IoError,
                  "missing measure for vertex " + std::to_string(v));
    }
  }
  return WeightedGraph(std::move(measures), edges);
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_graph(in);
}

void write_graph_file(const std::string& path, const WeightedGraph& graph) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  write_graph(out, graph);
}

}  // namespace sobocert
