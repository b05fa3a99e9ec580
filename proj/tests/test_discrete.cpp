#include <cmath>
#include <set>

#include "doctest.h"
#include "sobocert/discrete.hpp"
#include "sobocert/graph.hpp"
#include "sobocert/rng.hpp"

using namespace sobocert;

namespace {

WeightedGraph path3() {
  return WeightedGraph({1.0, 1.0, 1.0}, {{0, 1}, {1, 2}});
}

WeightedGraph random_connected(SplitMix64& rng, std::size_t n, double lo,
                               double hi) {
  std::vector<double> measures(n);
  for (auto& m : measures) m = rng.next_double(lo, hi);
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::set<std::pair<VertexId, VertexId>> seen;
  for (std::size_t v = 1; v < n; ++v) {
    const VertexId u = static_cast<VertexId>(rng.next_below(v));
    edges.push_back({u, static_cast<VertexId>(v)});
    seen.insert({std::min<VertexId>(u, v), std::max<VertexId>(u, v)});
  }
  for (std::size_t t = 0; t < n / 2; ++t) {
    VertexId a = static_cast<VertexId>(rng.next_below(n));
    VertexId b = static_cast<VertexId>(rng.next_below(n));
    if (a == b) continue;
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (seen.insert(key).second) edges.push_back({a, b});
  }
  return WeightedGraph(measures, edges);
}

// Brute-force isoperimetric oracle, independent of the library path.
double isoperi_oracle(const WeightedGraph& graph, double k) {
  const std::size_t n = graph.vertex_count();
  const double exponent = order_is_inf(k) ? 1.0 : (k - 1.0) / k;
  double best = 0.0;
  for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
    double measure = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1ULL << v)) measure += graph.vertex_measure(v);
    }
    double cut = 0.0;
    for (const Edge& e : graph.edges()) {
      if (((mask >> e.a) & 1ULL) != ((mask >> e.b) & 1ULL)) {
        cut += graph.edge_measure(e);
      }
    }
    best = std::max(best, std::pow(measure, exponent) / cut);
  }
  return best;
}

}  // namespace

TEST_CASE("isoperimetric constants on small graphs") {
  WeightedGraph path = path3();
  auto inf_report = isoperimetric_constant(path, kOrderInf);
  CHECK(inf_report.constant == 2.0);
  CHECK(inf_report.method == Method::Exhaustive);
  REQUIRE(inf_report.witness_subset.has_value());
  CHECK(*inf_report.witness_subset == std::vector<VertexId>{0, 1});

  WeightedGraph edge({1.0, 1.0}, {{0, 1}});
  CHECK(isoperimetric_constant(edge, kOrderInf).constant == 1.0);

  auto k2_report = isoperimetric_constant(path, 2.0);
  CHECK(k2_report.constant == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(k2_report.constant == isoperi_oracle(path, 2.0));
}

TEST_CASE("isoperimetric preconditions") {
  WeightedGraph lonely({1.0}, {});
  CHECK_THROWS_AS(isoperimetric_constant(lonely, kOrderInf), Error);
  WeightedGraph split({1.0, 1.0, 1.0, 1.0}, {{0, 1}, {2, 3}});
  try {
    isoperimetric_constant(split, kOrderInf);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Disconnected);
  }
  try {
    isoperimetric_constant(path3(), 0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateOrder);
  }
}

TEST_CASE("two-vertex Sobolev constants have closed forms") {
  WeightedGraph edge({1.0, 1.0}, {{0, 1}});
  auto neumann =
      best_sobolev_constant(edge, 2.0, kOrderInf, SobolevKind::Neumann);
  CHECK(neumann.constant == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(neumann.method == Method::Eigen);

  auto dirichlet =
      best_sobolev_constant(edge, 1.0, kOrderInf, SobolevKind::Dirichlet);
  CHECK(dirichlet.constant == 1.0);
  CHECK(dirichlet.method == Method::Exhaustive);
}

TEST_CASE("constant functions never witness the Neumann supremum") {
  WeightedGraph graph = path3();
  QuotientProblem prob;
  prob.n = 3;
  prob.lhs_weights = graph.vertex_measures();
  prob.mean_weights = graph.vertex_measures();
  for (const Edge& e : graph.edges()) {
    prob.energy.push_back({e.a, e.b, graph.edge_measure(e)});
  }
  prob.q = 2.0;
  prob.s = 1.0;
  prob.p = 2.0;
  CHECK(evaluate_quotient(prob, {3.0, 3.0, 3.0}) == 0.0);
  auto report =
      best_sobolev_constant(graph, 2.0, kOrderInf, SobolevKind::Neumann);
  CHECK(report.constant > 0.0);
}

TEST_CASE("witness reproduction matches reported constants") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    WeightedGraph graph = random_connected(rng, 5 + trial % 3, 0.3, 3.0);
    for (auto kind : {SobolevKind::Dirichlet, SobolevKind::Neumann}) {
      for (double p : {1.0, 2.0, 2.5}) {
        auto report = best_sobolev_constant(graph, p, kOrderInf, kind,
                                            rng.next_u64());
        const double revalue = reevaluate_witness(graph, report);
        CHECK(revalue ==
              doctest::Approx(report.constant).epsilon(1e-9));
      }
    }
    auto iso = isoperimetric_constant(graph, 3.0);
    CHECK(reevaluate_witness(graph, iso) == iso.constant);
  }
}

TEST_CASE("l1_to_lp closed form") {
  CHECK(l1_to_lp_constant(1.0, 2.0, kOrderInf, 2.0, 1.0) == 8.0);
  CHECK(l1_to_lp_constant(1.0, 1.0, kOrderInf, 1.0, 7.0) == 2.0);
  CHECK(l1_to_lp_constant(1.0, 2.0, 4.0, 1.0, 1.0) == 6.0);
  CHECK_THROWS_AS(l1_to_lp_constant(1.0, 3.0, 2.0, 1.0, 1.0), Error);
}

TEST_CASE("tree Poincare bounds") {
  WeightedGraph two({1.0, 1.0}, {{0, 1}});
  auto b2 = tree_poincare_bounds(two, 2.0);
  CHECK(b2.sup_bound == 1.0);
  CHECK(b2.sum_bound == 2.0);

  WeightedGraph tree5({1.0, 1.0, 1.0, 1.0, 1.0},
                      {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
  auto b1 = tree_poincare_bounds(tree5, 1.0);
  CHECK(b1.sup_bound == 1.0);
  CHECK(b1.sum_bound == 5.0);

  WeightedGraph three({1.0, 1.0, 1.0}, {{0, 1}, {1, 2}});
  auto b3 = tree_poincare_bounds(three, 3.0);
  CHECK(b3.sup_bound == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-15));
  CHECK(b3.sum_bound == 12.0);

  WeightedGraph weighted({1.0, 2.0}, {{0, 1}});
  CHECK_THROWS_AS(tree_poincare_bounds(weighted, 2.0), Error);
}

TEST_CASE("bounds dominate the exact constants on sample trees") {
  SplitMix64 rng(22);
  const std::vector<std::vector<std::pair<VertexId, VertexId>>> trees{
      {{0, 1}},
      {{0, 1}, {1, 2}},
      {{0, 1}, {1, 2}, {1, 3}},
      {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}},
      {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}}};
  for (const auto& edges : trees) {
    std::size_t n = 0;
    for (const auto& [a, b] : edges) n = std::max<std::size_t>({n, a + 1ul, b + 1ul});
    WeightedGraph graph(std::vector<double>(n, 1.0), edges);
    for (double p : {1.0, 2.0, 3.0}) {
      auto bounds = tree_poincare_bounds(graph, p);
      auto neumann = best_sobolev_constant(graph, p, kOrderInf,
                                           SobolevKind::Neumann,
                                           rng.next_u64());
      CHECK(neumann.constant <= bounds.sum_bound * (1.0 + 1e-9));
      CHECK(sup_poincare_estimate(graph, p, rng.next_u64()) <=
            bounds.sup_bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("layer cake equivalence on the named fixtures") {
  auto path = verify_layer_cake(path3(), kOrderInf);
  CHECK(path.isoperimetric == 2.0);
  CHECK(path.relative_gap <= 1e-12);

  WeightedGraph edge({1.0, 1.0}, {{0, 1}});
  auto single = verify_layer_cake(edge, kOrderInf);
  CHECK(single.isoperimetric == 1.0);
  CHECK(single.relative_gap <= 1e-12);

  WeightedGraph cycle({1.0, 1.0, 1.0, 1.0},
                      {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto four = verify_layer_cake(cycle, kOrderInf);
  CHECK(four.isoperimetric == 1.5);
  CHECK(four.relative_gap <= 1e-12);
  CHECK(four.isoperimetric == isoperi_oracle(cycle, kOrderInf));
}

TEST_CASE("layer cake equivalence on random weighted graphs") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    WeightedGraph graph = random_connected(rng, 2 + trial % 6, 0.1, 10.0);
    for (double k : {kOrderInf, 2.0, 4.0}) {
      auto record = verify_layer_cake(graph, k, rng.next_u64());
      CHECK(record.relative_gap <= 1e-12);
    }
  }
}

TEST_CASE("measure scaling moves Dirichlet constants by t^{-p/k}") {
  SplitMix64 rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    WeightedGraph graph = random_connected(rng, 5, 0.5, 2.0);
    const double t = rng.next_double(0.2, 5.0);
    std::vector<double> scaled = graph.vertex_measures();
    for (auto& m : scaled) m *= t;
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (const Edge& e : graph.edges()) edges.push_back({e.a, e.b});
    WeightedGraph scaled_graph(scaled, edges);

    const double k = 4.0;
    const double base =
        best_sobolev_constant(graph, 1.0, k, SobolevKind::Dirichlet).constant;
    const double moved =
        best_sobolev_constant(scaled_graph, 1.0, k, SobolevKind::Dirichlet)
            .constant;
    CHECK(moved == doctest::Approx(base * std::pow(t, -1.0 / k))
                       .epsilon(1e-12));

    const double inf_base =
        best_sobolev_constant(graph, 2.0, kOrderInf, SobolevKind::Dirichlet)
            .constant;
    const double inf_moved =
        best_sobolev_constant(scaled_graph, 2.0, kOrderInf,
                              SobolevKind::Dirichlet)
            .constant;
    CHECK(inf_moved == doctest::Approx(inf_base).epsilon(1e-10));
  }
}

TEST_CASE("optimizer is invariant under start rescaling") {
  SplitMix64 rng(25);
  WeightedGraph graph = random_connected(rng, 6, 0.5, 2.0);
  QuotientProblem prob;
  prob.n = graph.vertex_count();
  prob.lhs_weights = graph.vertex_measures();
  prob.mean_weights = graph.vertex_measures();
  for (const Edge& e : graph.edges()) {
    prob.energy.push_back({e.a, e.b, graph.edge_measure(e)});
  }
  prob.q = 3.0;
  prob.s = 1.0;
  prob.p = 3.0;

  std::vector<double> seed_f{1.0, -0.5, 0.25, 2.0, -1.0, 0.75};
  MultistartOptions a;
  a.starts = 0;
  a.extra_seeds = {seed_f};
  std::vector<double> scaled = seed_f;
  for (auto& v : scaled) v *= -17.0;
  MultistartOptions b;
  b.starts = 0;
  b.extra_seeds = {scaled};
  CHECK(maximize_quotient(prob, a).value == maximize_quotient(prob, b).value);
}

TEST_CASE("adding an edge never increases a best constant") {
  SplitMix64 rng(26);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 5;
    WeightedGraph graph = random_connected(rng, n, 0.5, 2.0);
    // Find a missing pair.
    VertexId a = 0, b = 0;
    bool found = false;
    for (VertexId i = 0; i < n && !found; ++i) {
      for (VertexId j = i + 1; j < n && !found; ++j) {
        if (!graph.has_edge(i, j)) {
          a = i;
          b = j;
          found = true;
        }
      }
    }
    if (!found) continue;
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (const Edge& e : graph.edges()) edges.push_back({e.a, e.b});
    edges.push_back({a, b});
    WeightedGraph denser(graph.vertex_measures(), edges);

    CHECK(isoperimetric_constant(denser, kOrderInf).constant <=
          isoperimetric_constant(graph, kOrderInf).constant * (1 + 1e-12));
    CHECK(best_sobolev_constant(denser, 2.0, kOrderInf, SobolevKind::Neumann)
              .constant <=
          best_sobolev_constant(graph, 2.0, kOrderInf, SobolevKind::Neumann)
                  .constant *
              (1 + 1e-12));
  }
}

TEST_CASE("L1-to-Lp constant dominates optimized constants (sample)") {
  SplitMix64 rng(27);
  for (int trial = 0; trial < 8; ++trial) {
    WeightedGraph graph = random_connected(rng, 4 + trial % 4, 0.5, 2.0);
    auto dc = degree_and_comparability(graph);
    const double s1 =
        best_sobolev_constant(graph, 1.0, kOrderInf, SobolevKind::Dirichlet)
            .constant;
    for (double p : {1.5, 2.0, 3.0}) {
      const double s_prime = l1_to_lp_constant(
          s1, p, kOrderInf, static_cast<double>(dc.max_degree),
          dc.comparability);
      auto lp = best_sobolev_constant(graph, p, kOrderInf,
                                      SobolevKind::Dirichlet, rng.next_u64());
      CHECK(std::pow(lp.constant, 1.0 / p) <= s_prime * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("large graphs fall back to sweep-cut lower bounds") {
  SplitMix64 rng(28);
  WeightedGraph graph = random_connected(rng, 26, 0.5, 2.0);
  auto report = isoperimetric_constant(graph, kOrderInf, 5);
  CHECK(report.method == Method::Multistart);
  CHECK(report.constant > 0.0);
  REQUIRE(report.witness_subset.has_value());
  CHECK(reevaluate_witness(graph, report) ==
        doctest::Approx(report.constant).epsilon(1e-12));
}

TEST_CASE("iterative eigensolver matches the path closed form") {
  const std::size_t n = 600;
  std::vector<double> measures(n, 1.0);
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t v = 0; v + 1 < n; ++v) {
    edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v + 1)});
  }
  WeightedGraph path(measures, edges);
  auto report =
      best_sobolev_constant(path, 2.0, kOrderInf, SobolevKind::Neumann);
  const double lambda1 = 2.0 * (1.0 - std::cos(M_PI / n));
  CHECK(report.constant == doctest::Approx(1.0 / lambda1).epsilon(1e-8));
}

TEST_CASE("report JSON carries kind, method and witness") {
  auto report = isoperimetric_constant(path3(), kOrderInf);
  const std::string json = report.to_json_string();
  CHECK(json.find("isoperimetric") != std::string::npos);
  CHECK(json.find("exhaustive") != std::string::npos);
  CHECK(json.find("witness") != std::string::npos);
  CHECK(json.find("inf") != std::string::npos);
}
