#include "sobocert/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "sobocert/analysis.hpp"
#include "sobocert/covering.hpp"
#include "sobocert/discrete.hpp"
#include "sobocert/graph.hpp"
#include "sobocert/manifolds.hpp"
#include "sobocert/patching.hpp"
#include "sobocert/rng.hpp"
#include "sobocert/space.hpp"

namespace sobocert {

namespace {

WeightedGraph random_connected_graph(SplitMix64& rng, std::size_t n,
                                     double weight_lo, double weight_hi,
                                     std::size_t degree_cap = 0) {
  std::vector<double> measures(n);
  for (auto& m : measures) m = rng.next_double(weight_lo, weight_hi);
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::set<std::pair<VertexId, VertexId>> present;
  std::vector<std::size_t> degree(n, 0);
  // Random spanning tree first.
  for (std::size_t v = 1; v < n; ++v) {
    const VertexId u = static_cast<VertexId>(rng.next_below(v));
    edges.push_back({u, static_cast<VertexId>(v)});
    present.insert({std::min<VertexId>(u, v), std::max<VertexId>(u, v)});
    ++degree[u];
    ++degree[v];
  }
  const std::size_t extra = rng.next_below(n);
  for (std::size_t t = 0; t < extra; ++t) {
    const VertexId a = static_cast<VertexId>(rng.next_below(n));
    const VertexId b = static_cast<VertexId>(rng.next_below(n));
    if (a == b) continue;
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (present.count(key)) continue;
    if (degree_cap > 0 &&
        (degree[a] + 1 > degree_cap || degree[b] + 1 > degree_cap)) {
      continue;
    }
    present.insert(key);
    edges.push_back({a, b});
    ++degree[a];
    ++degree[b];
  }
  return WeightedGraph(std::move(measures), edges);
}

// -- free tree enumeration ----------------------------------------------------

std::vector<std::pair<int, int>> prufer_decode(const std::vector<int>& code,
                                               int n) {
  std::vector<int> degree(n, 1);
  for (int v : code) ++degree[v];
  std::vector<std::pair<int, int>> edges;
  std::set<int> leaves;
  for (int v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.insert(v);
  }
  std::vector<int> work = code;
  for (int v : work) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.push_back({leaf, v});
    if (--degree[v] == 1) leaves.insert(v);
  }
  const int a = *leaves.begin();
  const int b = *std::next(leaves.begin());
  edges.push_back({a, b});
  return edges;
}

std::string ahu_encode(int root, int parent,
                       const std::vector<std::vector<int>>& adj) {
  std::vector<std::string> parts;
  for (int w : adj[root]) {
    if (w != parent) parts.push_back(ahu_encode(w, root, adj));
  }
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (const auto& part : parts) out += part;
  out += ")";
  return out;
}

std::string tree_canonical(const std::vector<std::pair<int, int>>& edges,
                           int n) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // Centers by leaf stripping.
  std::vector<int> degree(n);
  std::vector<int> order;
  for (int v = 0; v < n; ++v) degree[v] = static_cast<int>(adj[v].size());
  std::vector<int> frontier;
  std::vector<char> removed(n, 0);
  for (int v = 0; v < n; ++v) {
    if (degree[v] <= 1) frontier.push_back(v);
  }
  int remaining = n;
  while (remaining > 2) {
    std::vector<int> next;
    for (int leaf : frontier) {
      removed[leaf] = 1;
      --remaining;
      for (int w : adj[leaf]) {
        if (!removed[w] && --degree[w] == 1) next.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  std::string best;
  for (int v = 0; v < n; ++v) {
    if (!removed[v]) {
      const std::string enc = ahu_encode(v, -1, adj);
      if (best.empty() || enc < best) best = enc;
    }
  }
  return best;
}

std::vector<std::vector<std::pair<int, int>>> free_trees(int n) {
  std::vector<std::vector<std::pair<int, int>>> trees;
  if (n == 1) {
    trees.push_back({});
    return trees;
  }
  if (n == 2) {
    trees.push_back({{0, 1}});
    return trees;
  }
  std::set<std::string> seen;
  std::vector<int> code(n - 2, 0);
  while (true) {
    auto edges = prufer_decode(code, n);
    const std::string canon = tree_canonical(edges, n);
    if (seen.insert(canon).second) trees.push_back(edges);
    int pos = n - 3;
    while (pos >= 0 && code[pos] == n - 1) {
      code[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++code[pos];
  }
  return trees;
}

// -- fixtures -----------------------------------------------------------------

FiniteMetricMeasureSpace random_chain_fixture(SplitMix64& rng, double kappa,
                                              int levels) {
  std::vector<double> radii;
  for (int lvl = 0; lvl < levels; ++lvl) {
    const double lo = std::pow(kappa, lvl);
    const double hi = std::pow(kappa, lvl + 1);
    const int count = 2 + static_cast<int>(rng.next_below(3));
    for (int c = 0; c < count; ++c) {
      radii.push_back(rng.next_double(lo * 1.0001, hi * 0.9999));
    }
  }
  radii.push_back(0.5);  // a point inside the central ball
  std::sort(radii.begin(), radii.end());
  std::vector<double> lambda(radii.size() + 1), mu(radii.size() + 1);
  for (auto& v : lambda) v = rng.next_double(0.5, 2.0);
  for (auto& v : mu) v = rng.next_double(0.5, 2.0);
  // Unit neighbor lengths: the chain is a combinatorial fixture.
  std::vector<double> radial{0.0};
  radial.insert(radial.end(), radii.begin(), radii.end());
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs;
  for (std::size_t i = 0; i + 1 < radial.size(); ++i) {
    pairs.push_back({static_cast<PointId>(i), static_cast<PointId>(i + 1),
                     1.0});
  }
  return FiniteMetricMeasureSpace(std::move(radial), std::move(lambda),
                                  std::move(mu), std::move(pairs), 3);
}

/// Euclidean radial ball grid: base point plus `count` shells up to r_max.
FiniteMetricMeasureSpace euclidean_ball_fixture(int n, double r_max,
                                                std::size_t count) {
  const double h = r_max / static_cast<double>(count);
  const double omega = unit_ball_volume(n);
  std::vector<double> radii, lambda, mu;
  lambda.push_back(omega * std::pow(0.5 * h, n));  // base cell
  mu.push_back(lambda.back());
  for (std::size_t j = 1; j <= count; ++j) {
    const double r = h * static_cast<double>(j);
    radii.push_back(r);
    const double shell = omega * (std::pow(r + 0.5 * h, n) -
                                  std::pow(r - 0.5 * h, n));
    lambda.push_back(shell);
    mu.push_back(shell);
  }
  return make_radial_chain(radii, lambda, mu, n);
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

std::string format_line(const CriterionResult& result) {
  std::ostringstream out;
  out << (result.pass ? "[PASS] " : "[FAIL] ") << result.id << ". "
      << result.name << " — " << result.detail << " ("
      << static_cast<int>(result.seconds * 1000.0) << " ms)";
  return out.str();
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log, int threads) {
  std::vector<CriterionResult> results;
  auto push = [&](CriterionResult result) {
    log << format_line(result) << "\n" << std::flush;
    results.push_back(std::move(result));
  };

  // 1. Layer-cake equivalence on random weighted graphs.
  {
    Timer timer;
    CriterionResult result;
    result.id = 1;
    result.name = "layer-cake equivalence (iso = L1 Dirichlet)";
    SplitMix64 rng(101);
    int violations = 0;
    double worst_gap = 0.0;
    const double orders[3] = {kOrderInf, 2.0, 4.0};
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + trial % 7;
      WeightedGraph graph = random_connected_graph(rng, n, 0.1, 10.0);
      for (double k : orders) {
        LayerCakeRecord record = verify_layer_cake(graph, k, rng.next_u64());
        worst_gap = std::max(worst_gap, record.relative_gap);
        if (record.relative_gap > 1e-12) ++violations;
      }
    }
    result.pass = violations == 0 && timer.seconds() < 10.0;
    std::ostringstream detail;
    detail << "300 instances, worst relative gap " << worst_gap;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 2. Patching soundness on randomized chain fixtures.
  {
    Timer timer;
    CriterionResult result;
    result.id = 2;
    result.name = "patching soundness (certified >= direct)";
    SplitMix64 rng(202);
    int violations = 0;
    int heuristic = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    const double kappas[3] = {2.0, 2.5, 3.0};
    for (int trial = 0; trial < 20; ++trial) {
      const double kappa = kappas[trial % 3];
      const int levels = 4 + static_cast<int>(rng.next_below(3));
      FiniteMetricMeasureSpace space = random_chain_fixture(rng, kappa, levels);
      CertifyOptions options;
      options.kappa = kappa;
      options.p = 2.0;
      options.k = kOrderInf;
      options.seed = rng.next_u64();
      options.threads = threads;
      InequalityCertificate cert = certify_global(
          space, unit_lambda_builder(), unit_mu_builder(), options);
      if (cert.heuristic) ++heuristic;
      if (!cert.cross_check) {
        ++violations;
        continue;
      }
      const double margin = cert.constant / cert.cross_check->value;
      worst_margin = std::min(worst_margin, margin);
      if (cert.cross_check->value > cert.constant * (1.0 + 1e-9)) {
        ++violations;
      }
    }
    result.pass =
        violations == 0 && heuristic == 0 && timer.seconds() < 60.0;
    std::ostringstream detail;
    detail << "20 fixtures, exact sub-constants, min certified/direct ratio "
           << worst_margin;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 3. Tree Poincare bounds on all trees with at most 8 vertices.
  {
    Timer timer;
    CriterionResult result;
    result.id = 3;
    result.name = "tree Poincare bounds dominate best constants";
    SplitMix64 rng(303);
    int violations = 0;
    int trees_checked = 0;
    const double ps[3] = {1.0, 2.0, 3.0};
    for (int n = 2; n <= 8; ++n) {
      for (const auto& edges : free_trees(n)) {
        ++trees_checked;
        std::vector<double> measures(n, 1.0);
        std::vector<std::pair<VertexId, VertexId>> typed;
        for (const auto& [a, b] : edges) {
          typed.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b)});
        }
        WeightedGraph graph(measures, typed);
        for (double p : ps) {
          const TreePoincareBounds bounds = tree_poincare_bounds(graph, p);
          DiscreteConstantReport report = best_sobolev_constant(
              graph, p, kOrderInf, SobolevKind::Neumann, rng.next_u64());
          if (report.constant > bounds.sum_bound * (1.0 + 1e-9)) ++violations;
          const double sup_est = sup_poincare_estimate(graph, p, rng.next_u64());
          if (sup_est > bounds.sup_bound * (1.0 + 1e-9)) ++violations;
        }
      }
    }
    result.pass = violations == 0;
    std::ostringstream detail;
    detail << trees_checked << " free trees, p in {1,2,3}, " << violations
           << " violations";
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 4. L1 -> Lp constant domination.
  {
    Timer timer;
    CriterionResult result;
    result.id = 4;
    result.name = "L1-to-Lp constant dominates optimized Lp";
    SplitMix64 rng(404);
    int violations = 0;
    double worst_ratio = 0.0;
    const double ps[3] = {1.5, 2.0, 3.0};
    const double ks[2] = {kOrderInf, 6.0};
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 3 + trial % 6;
      WeightedGraph graph = random_connected_graph(rng, n, 0.5, 2.0, 4);
      const DegreeComparability dc = degree_and_comparability(graph);
      for (double k : ks) {
        const double s_l1 =
            best_sobolev_constant(graph, 1.0, k, SobolevKind::Dirichlet)
                .constant;
        for (double p : ps) {
          const double s_prime = l1_to_lp_constant(
              s_l1, p, k, static_cast<double>(dc.max_degree),
              dc.comparability);
          DiscreteConstantReport lp = best_sobolev_constant(
              graph, p, k, SobolevKind::Dirichlet, rng.next_u64());
          const double root_form = std::pow(lp.constant, 1.0 / p);
          worst_ratio = std::max(worst_ratio, root_form / s_prime);
          if (root_form > s_prime * (1.0 + 1e-9)) ++violations;
        }
      }
    }
    result.pass = violations == 0;
    std::ostringstream detail;
    detail << "50 graphs x 6 (p,k), worst ratio " << worst_ratio;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 5. Generalized Schwarzschild family.
  {
    Timer timer;
    CriterionResult result;
    result.id = 5;
    result.name = "Ricci-flat warped family residuals and fits";
    int violations = 0;
    std::ostringstream detail;
    double worst_first_integral = 0.0;
    double worst_ricci = 0.0;
    double worst_nu_err = 0.0;
    double worst_decay_err = 0.0;
    for (int n = 4; n <= 6; ++n) {
      for (double gamma : {0.5, 1.0, 2.0}) {
        RadialProfile profile = schwarzschild_solve(n, gamma, 1.0e4);
        worst_first_integral = std::max(worst_first_integral,
                                        profile.max_first_integral_residual());
        if (profile.max_first_integral_residual() > 1e-9) ++violations;
        CurvatureField curvature = curvature_field(profile);
        double ricci = 0.0;
        for (double value : curvature.ricci_residual.value) {
          ricci = std::max(ricci, value);
        }
        worst_ricci = std::max(worst_ricci, ricci);
        if (ricci > 1e-6) ++violations;
        // The coordinate radius is a distance proxy only past ~100 core
        // radii, so the fit window respects r >= 100 gamma.
        const double window_lo = std::max(1.0e2, 1.0e2 * gamma);
        GrowthFit growth =
            inverse_doubling_fit(volume_function(profile), window_lo, 1.0e4);
        worst_nu_err = std::max(worst_nu_err, std::abs(growth.nu - (n - 1.0)));
        if (std::abs(growth.nu - (n - 1.0)) > 0.05) ++violations;
        DecayFit decay = decay_fit(curvature.riemann_norm, window_lo, 1.0e4);
        worst_decay_err =
            std::max(worst_decay_err, std::abs(decay.exponent - (n - 1.0)));
        if (std::abs(decay.exponent - (n - 1.0)) > 0.05) ++violations;
        if (decay_prediction(n, n - 1.0) != static_cast<double>(n - 1)) {
          ++violations;
        }
      }
    }
    result.pass = violations == 0 && timer.seconds() < 120.0;
    detail << "first-integral " << worst_first_integral << ", ricci "
           << worst_ricci << ", |nu-(n-1)| " << worst_nu_err << ", |b-(n-1)| "
           << worst_decay_err;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 6. Reference decay prediction.
  {
    Timer timer;
    CriterionResult result;
    result.id = 6;
    result.name = "reference decay prediction (n=4, nu=3)";
    result.pass = decay_prediction(4, 3.0) == 3.0;
    result.detail = "decay_prediction(4,3) = 3 exactly";
    result.seconds = timer.seconds();
    push(result);
  }

  // 7. Euclidean sanity: rho constant and the L1 Hardy bound.
  {
    Timer timer;
    CriterionResult result;
    result.id = 7;
    result.name = "euclidean rho and Hardy witness limit";
    bool ok = true;
    RadialProfile euclid = make_euclidean_profile(3, 1.0e3);
    RhoResult rho = rho_function(euclid);
    const double expected = 3.0 / (4.0 * M_PI);
    double worst = 0.0;
    for (double value : rho.rho.value) {
      worst = std::max(worst, std::abs(value - expected) / expected);
    }
    if (worst > 1e-12 || !rho.monotone) ok = false;

    FiniteMetricMeasureSpace ball = euclidean_ball_fixture(3, 20.0, 10000);
    WitnessReport hardy = estimate_hardy_witness(ball, 1.0, 707);
    const double target = 0.5;
    const double rel = std::abs(hardy.bound - target) / target;
    if (rel > 0.02) ok = false;
    result.pass = ok && timer.seconds() < 30.0;
    std::ostringstream detail;
    detail << "rho deviation " << worst << ", Hardy bound " << hardy.bound
           << " vs 1/2 (rel " << rel << ")";
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 8. epsilon(m) continuity and Schrodinger form positivity.
  {
    Timer timer;
    CriterionResult result;
    result.id = 8;
    result.name = "epsilon(m) continuity and form positivity";
    bool ok = true;
    const double upper_branch = 2.0 / 2.0;
    const double lower_branch = (2.0 / 2.0) * (2.0 - 2.0 / 2.0);
    if (upper_branch != 1.0 || lower_branch != 1.0 || epsilon_m(2.0) != 1.0) {
      ok = false;
    }

    FiniteMetricMeasureSpace ball = euclidean_ball_fixture(3, 8.0, 160);
    const std::size_t count = ball.point_count();
    const double omega = unit_ball_volume(3);
    std::vector<double> rho_points(count, 1.0 / omega);
    std::vector<double> lambda(count), mu(count);
    const double left = std::pow(1.0 / omega, -2.0);  // rho^{-2/(n-2)}, n=3
    for (std::size_t x = 0; x < count; ++x) {
      lambda[x] = left * ball.mu_weight(static_cast<PointId>(x));
      mu[x] = ball.mu_weight(static_cast<PointId>(x));
    }
    std::vector<PointId> grounds{static_cast<PointId>(count - 1)};
    const double s_hat =
        sobolev_path_upper_bound(ball, lambda, mu, 3, grounds);

    SplitMix64 rng(808);
    int positive = 0;
    double worst_eig = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> potential(count);
      for (auto& value : potential) value = rng.next_double(0.0, 1.0);
      double nv_sum = 0.0;
      for (std::size_t x = 0; x < count; ++x) {
        nv_sum += std::pow(potential[x], 1.5) * rho_points[x] *
                  ball.mu_weight(static_cast<PointId>(x));
      }
      const double nv = std::pow(nv_sum, 2.0 / 3.0);
      const double scale = 0.9 / (s_hat * nv);
      for (auto& value : potential) value *= scale;
      SchrodingerCheck check =
          schrodinger_positivity(ball, potential, s_hat, 3, rho_points);
      worst_eig = std::min(worst_eig, check.min_eigenvalue);
      if (check.verdict == PositivityVerdict::FormPositive) ++positive;
    }
    if (positive != 100) ok = false;
    result.pass = ok;
    std::ostringstream detail;
    detail << positive << "/100 form-positive, min eigenvalue " << worst_eig;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 9. RCA branch bound spot value.
  {
    Timer timer;
    CriterionResult result;
    result.id = 9;
    result.name = "RCA branch bound spot value";
    RcaBound bound = rca_branch_bound(2.0, 2.0, 1.0, 1.0, 3.0);
    result.pass = bound.l_max == 14 && bound.kappa0 == 65536.0;
    std::ostringstream detail;
    detail << "L = " << bound.l_max << ", kappa0 = " << bound.kappa0;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  // 10. Patch formula spot values.
  {
    Timer timer;
    CriterionResult result;
    result.id = 10;
    result.name = "patch formula spot values";
    PatchInput ones;
    ones.sc = ones.sd = ones.q1 = ones.q2 = 1.0;
    ones.p = 2.0;
    ones.k = kOrderInf;
    const double dir = patch_dirichlet_constant(ones);
    const double neu = patch_neumann_constant(ones);
    PatchInput big_k = ones;
    big_k.k = 1.0e9;
    const double dir_big = patch_dirichlet_constant(big_k);
    const bool ok = dir == 10.0 && neu == 40.0 &&
                    std::abs(dir_big - dir) <= 1e-6 * dir;
    result.pass = ok;
    std::ostringstream detail;
    detail << "dirichlet " << dir << ", neumann " << neu << ", k=1e9 gives "
           << dir_big;
    result.detail = detail.str();
    result.seconds = timer.seconds();
    push(result);
  }

  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.pass; });
}

}  // namespace sobocert
