#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "sobocert/graph.hpp"
#include "sobocert/rng.hpp"

using namespace sobocert;

namespace {

WeightedGraph path3() {
  return WeightedGraph({1.0, 1.0, 1.0}, {{0, 1}, {1, 2}});
}

}  // namespace

TEST_CASE("edge measures follow the max rule") {
  WeightedGraph equal({1.0, 1.0}, {{0, 1}});
  CHECK(equal.edge_measure(Edge(0, 1)) == 1.0);

  WeightedGraph mixed({1.0, 3.0}, {{0, 1}});
  CHECK(mixed.edge_measure(Edge(0, 1)) == 3.0);
}

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS_AS(WeightedGraph({1.0, 1.0}, {{0, 0}}), Error);
  try {
    WeightedGraph({1.0, 1.0}, {{0, 0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SelfLoop);
  }
  try {
    WeightedGraph({1.0, 1.0}, {{0, 1}, {1, 0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateEdge);
  }
  try {
    WeightedGraph({1.0, -2.0}, {{0, 1}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveMeasure);
  }
  try {
    WeightedGraph({1.0, 1.0}, {{0, 5}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("boundary picks the crossing edges") {
  WeightedGraph graph = path3();
  auto mid = boundary(graph, VertexSubset(graph, {1}));
  REQUIRE(mid.size() == 2);
  CHECK(mid[0] == Edge(0, 1));
  CHECK(mid[1] == Edge(1, 2));

  CHECK(boundary(graph, VertexSubset(graph, {})).empty());

  auto prefix = boundary(graph, VertexSubset(graph, {0, 1}));
  REQUIRE(prefix.size() == 1);
  CHECK(prefix[0] == Edge(1, 2));
}

TEST_CASE("boundary of a subset equals boundary of its complement") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.next_below(7);
    std::vector<double> measures(n);
    for (auto& m : measures) m = rng.next_double(0.1, 5.0);
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (std::size_t v = 1; v < n; ++v) {
      edges.push_back({static_cast<VertexId>(rng.next_below(v)),
                       static_cast<VertexId>(v)});
    }
    WeightedGraph graph(measures, edges);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      VertexSubset omega = VertexSubset::from_mask(graph, mask);
      VertexSubset complement =
          VertexSubset::from_mask(graph, ~mask & ((1ULL << n) - 1));
      CHECK(boundary(graph, omega) == boundary(graph, complement));
    }
  }
}

TEST_CASE("degree and comparability") {
  const auto path = degree_and_comparability(path3());
  CHECK(path.max_degree == 2);
  CHECK(path.comparability == 1.0);

  WeightedGraph edge({1.0, 3.0}, {{0, 1}});
  const auto single = degree_and_comparability(edge);
  CHECK(single.max_degree == 1);
  CHECK(single.comparability == 3.0);

  WeightedGraph star({1.0, 1.0, 1.0, 1.0, 1.0},
                     {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto hub = degree_and_comparability(star);
  CHECK(hub.max_degree == 4);
  CHECK(hub.comparability == 1.0);
  // Exhaustive oracle over the edges.
  double worst = 1.0;
  for (const Edge& e : star.edges()) {
    worst = std::max({worst,
                      star.vertex_measure(e.a) / star.vertex_measure(e.b),
                      star.vertex_measure(e.b) / star.vertex_measure(e.a)});
  }
  CHECK(hub.comparability == worst);

  CHECK_THROWS_AS(degree_and_comparability(WeightedGraph({}, {})), Error);
}

TEST_CASE("total edge measure is invariant under vertex relabeling") {
  SplitMix64 rng(12);
  std::vector<double> measures{0.7, 1.3, 2.9, 0.4, 1.1};
  std::vector<std::pair<VertexId, VertexId>> edges{
      {0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}};
  WeightedGraph graph(measures, edges);
  double total = 0.0;
  for (const Edge& e : graph.edges()) total += graph.edge_measure(e);

  std::vector<VertexId> perm{3, 0, 4, 1, 2};
  std::vector<double> relabeled(5);
  for (std::size_t v = 0; v < 5; ++v) relabeled[perm[v]] = measures[v];
  std::vector<std::pair<VertexId, VertexId>> relabeled_edges;
  for (const auto& [a, b] : edges) {
    relabeled_edges.push_back({perm[a], perm[b]});
  }
  WeightedGraph shuffled(relabeled, relabeled_edges);
  double shuffled_total = 0.0;
  for (const Edge& e : shuffled.edges()) {
    shuffled_total += shuffled.edge_measure(e);
  }
  CHECK(total == shuffled_total);
}

TEST_CASE("serialization round-trips bit for bit") {
  WeightedGraph graph({0.1234567890123456, 3.0e-7, 17.5},
                      {{0, 1}, {1, 2}});
  std::stringstream buffer;
  write_graph(buffer, graph);
  WeightedGraph copy = read_graph(buffer);
  REQUIRE(copy.vertex_count() == graph.vertex_count());
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    CHECK(copy.vertex_measure(static_cast<VertexId>(v)) ==
          graph.vertex_measure(static_cast<VertexId>(v)));
  }
  CHECK(copy.edges() == graph.edges());
}
