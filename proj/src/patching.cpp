#include "sobocert/patching.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sobocert/rng.hpp"

namespace sobocert {

namespace {

void check_patch_input(const PatchInput& input) {
  if (input.p < 1.0 || !(input.k > input.p)) {
    throw Error(ErrorCode::DegenerateOrder, "need 1 <= p < k");
  }
  if (!(input.sc > 0.0) || !(input.q1 > 0.0) || !(input.q2 > 0.0) ||
      input.sd < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "constants must be positive (Sd may be zero)");
  }
}

}  // namespace

double patch_dirichlet_constant(const PatchInput& input) {
  check_patch_input(input);
  const double p = input.p;
  const double k = input.k;
  const double inner_exp = order_is_inf(k) ? 1.0 : k / (k - p);
  const double outer_exp = order_is_inf(k) ? 1.0 : (k - p) / k;
  const double p_over_k = order_is_inf(k) ? 0.0 : p / k;
  const double a = std::pow(input.sc * input.q1, inner_exp);
  const double b =
      input.sd * input.q2 *
      std::pow(std::exp2(p) * input.sc * input.q1 * input.q1 * input.q1,
               inner_exp);
  return std::exp2(p - 1.0 + p_over_k) * std::pow(a + b, outer_exp);
}

double patch_neumann_constant(const PatchInput& input) {
  return std::exp2(input.p) * patch_dirichlet_constant(input);
}

double patch_mixed_constant(double sc, double sc_prime, double sd, double q1,
                            double q2, double p, double r, double q) {
  if (!(1.0 <= p) || !(p <= r) || !(r <= q)) {
    throw Error(ErrorCode::OrderingViolated, "need 1 <= p <= r <= q");
  }
  if (!(sc > 0.0) || !(sc_prime > 0.0) || !(q1 > 0.0) || !(q2 > 0.0) ||
      sd < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "constants must be positive (Sd may be zero)");
  }
  const double b_base = sd * q2 * std::exp2(r) * std::pow(sc_prime, r / p);
  if (std::isinf(q)) {
    return std::exp2(p - 1.0) * (q1 * sc + b_base * q1 * q1 * q1);
  }
  const double a = std::pow(q1 * sc, q / p);
  const double b = std::pow(b_base, q / r) * std::pow(q1, 3.0 * q / p);
  return std::exp2(p - p / q) * std::pow(a + b, p / q);
}

const char* certificate_kind_name(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::SobolevDirichlet: return "sobolev-dirichlet";
    case CertificateKind::SobolevNeumann: return "sobolev-neumann";
    case CertificateKind::Hardy: return "hardy";
  }
  return "unknown";
}

WeightBuilder unit_lambda_builder() {
  return [](const FiniteMetricMeasureSpace& space, PointId x) {
    return space.lambda_weight(x);
  };
}

WeightBuilder unit_mu_builder() {
  return [](const FiniteMetricMeasureSpace& space, PointId x) {
    return space.mu_weight(x);
  };
}

// -- local constants ----------------------------------------------------------

namespace {

struct InducedSubgraph {
  std::vector<PointId> points;  // sorted
  std::vector<int> local_of;    // point -> local index or -1
  std::vector<QuotientProblem::EnergyEdge> energy;
  bool tree = false;
  bool connected = false;
};

InducedSubgraph induce(const FiniteMetricMeasureSpace& space,
                       const std::vector<double>& mu,
                       const std::vector<PointId>& outer, double p) {
  InducedSubgraph sub;
  sub.points = outer;
  sub.local_of.assign(space.point_count(), -1);
  for (std::size_t i = 0; i < outer.size(); ++i) {
    sub.local_of[outer[i]] = static_cast<int>(i);
  }
  std::vector<int> parent(outer.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t united = 0;
  for (const auto& pair : space.neighbor_pairs()) {
    const int la = sub.local_of[pair.a];
    const int lb = sub.local_of[pair.b];
    if (la < 0 || lb < 0) continue;
    const double w =
        std::max(mu[pair.a], mu[pair.b]) / std::pow(pair.length, p);
    sub.energy.push_back({static_cast<VertexId>(la),
                          static_cast<VertexId>(lb), w});
    const int ra = find(la);
    const int rb = find(lb);
    if (ra != rb) {
      parent[ra] = rb;
      ++united;
    }
  }
  sub.connected = united + 1 == outer.size();
  sub.tree = sub.connected && sub.energy.size() + 1 == outer.size();
  return sub;
}

double indicator_quotient(const QuotientProblem& prob,
                          const std::vector<char>& inside) {
  std::vector<double> f(prob.n);
  for (std::size_t i = 0; i < prob.n; ++i) f[i] = inside[i] ? 1.0 : 0.0;
  return evaluate_quotient(prob, f);
}

/// Exact p=1 maximization over indicator cuts of a tree: the extreme points
/// of the energy unit ball split the tree along a single edge.
double tree_cut_maximum(const QuotientProblem& prob,
                        const InducedSubgraph& sub) {
  const std::size_t m = sub.points.size();
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(m);
  for (std::size_t e = 0; e < sub.energy.size(); ++e) {
    adj[sub.energy[e].a].push_back({static_cast<int>(sub.energy[e].b), e});
    adj[sub.energy[e].b].push_back({static_cast<int>(sub.energy[e].a), e});
  }
  double best = 0.0;
  std::vector<char> inside(m);
  for (std::size_t cut = 0; cut < sub.energy.size(); ++cut) {
    std::fill(inside.begin(), inside.end(), 0);
    std::vector<int> stack{static_cast<int>(sub.energy[cut].a)};
    inside[sub.energy[cut].a] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [w, e] : adj[v]) {
        if (e == cut || inside[w]) continue;
        inside[w] = 1;
        stack.push_back(w);
      }
    }
    best = std::max(best, indicator_quotient(prob, inside));
  }
  return best;
}

}  // namespace

LocalConstantResult local_neumann_constant(
    const FiniteMetricMeasureSpace& space, const std::vector<double>& lambda,
    const std::vector<double>& mu, const std::vector<PointId>& inner,
    const std::vector<PointId>& outer, double p, double k, std::uint64_t seed,
    int threads) {
  if (p < 1.0 || !(k > p)) {
    throw Error(ErrorCode::DegenerateOrder, "need 1 <= p < k");
  }
  InducedSubgraph sub = induce(space, mu, outer, p);
  if (!sub.connected) {
    throw Error(ErrorCode::PieceDisconnected,
                "outer set induces a disconnected subgraph");
  }
  const std::size_t m = sub.points.size();
  QuotientProblem prob;
  prob.n = m;
  prob.lhs_weights.assign(m, 0.0);
  prob.mean_weights.assign(m, 0.0);
  for (PointId x : inner) {
    const int lx = sub.local_of[x];
    if (lx < 0) {
      throw Error(ErrorCode::InvalidArgument, "inner set must lie in outer");
    }
    prob.lhs_weights[lx] = lambda[x];
    prob.mean_weights[lx] = lambda[x];
  }
  prob.energy = sub.energy;
  prob.q = lhs_exponent(p, k);
  prob.s = outer_exponent(p, k);
  prob.p = p;

  LocalConstantResult result;
  if (m == 1 || sub.energy.empty()) {
    result.value = 0.0;
    result.method = Method::Exhaustive;
    return result;
  }
  if (p == 2.0 && order_is_inf(k)) {
    QuotientResult exact = exact_p2_quotient(prob);
    result.value = exact.value;
    result.method = Method::Eigen;
    return result;
  }
  if (p == 1.0 && sub.tree) {
    result.value = tree_cut_maximum(prob, sub);
    result.method = Method::Exhaustive;
    return result;
  }
  if (p == 1.0 && m <= 16) {
    double best = 0.0;
    std::vector<char> inside(m);
    const std::uint64_t all = (1ULL << m) - 1ULL;
    for (std::uint64_t mask = 1; mask < all; ++mask) {
      for (std::size_t i = 0; i < m; ++i) inside[i] = (mask >> i) & 1ULL;
      best = std::max(best, indicator_quotient(prob, inside));
    }
    result.value = best;
    result.method = Method::Exhaustive;
    return result;
  }

  MultistartOptions options;
  options.seed = seed;
  options.threads = threads;
  if (p != 2.0 && m <= 500) {
    QuotientProblem eig = prob;
    eig.q = 2.0;
    eig.s = 1.0;
    eig.p = 2.0;
    options.extra_seeds.push_back(exact_p2_quotient(eig).witness);
  }
  QuotientResult ascent = maximize_quotient(prob, options);
  result.value = ascent.value;
  result.method = Method::Multistart;
  return result;
}

// -- direct global estimate ---------------------------------------------------

namespace {

bool is_chain(const FiniteMetricMeasureSpace& space) {
  std::size_t endpoints = 0;
  for (std::size_t x = 0; x < space.point_count(); ++x) {
    const std::size_t d = space.neighbors(static_cast<PointId>(x)).size();
    if (d > 2) return false;
    if (d == 1) ++endpoints;
  }
  return endpoints == 2 &&
         space.neighbor_pairs().size() + 1 == space.point_count();
}

std::vector<PointId> chain_order(const FiniteMetricMeasureSpace& space) {
  PointId start = 0;
  for (std::size_t x = 0; x < space.point_count(); ++x) {
    if (space.neighbors(static_cast<PointId>(x)).size() == 1) {
      start = static_cast<PointId>(x);
      break;
    }
  }
  std::vector<PointId> order{start};
  std::vector<char> seen(space.point_count(), 0);
  seen[start] = 1;
  while (order.size() < space.point_count()) {
    const PointId v = order.back();
    bool advanced = false;
    for (PointId w : space.neighbors(v)) {
      if (!seen[w]) {
        order.push_back(w);
        seen[w] = 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return order;
}

CrossCheck direct_global_estimate(const FiniteMetricMeasureSpace& space,
                                  const std::vector<double>& lambda,
                                  const std::vector<double>& mu,
                                  const std::vector<PointId>& grounds,
                                  double p, double k, std::uint64_t seed,
                                  int threads) {
  const std::size_t n = space.point_count();
  QuotientProblem prob;
  prob.n = n;
  prob.lhs_weights = lambda;
  prob.lhs_weights[space.base_point()] = 0.0;
  for (const auto& pair : space.neighbor_pairs()) {
    prob.energy.push_back(
        {pair.a, pair.b,
         std::max(mu[pair.a], mu[pair.b]) / std::pow(pair.length, p)});
  }
  prob.grounds = grounds;
  prob.q = lhs_exponent(p, k);
  prob.s = outer_exponent(p, k);
  prob.p = p;

  CrossCheck check;
  if (p == 2.0 && order_is_inf(k) && !grounds.empty()) {
    QuotientResult exact = exact_p2_quotient(prob);
    check.value = exact.value;
    check.method = Method::Eigen;
    return check;
  }
  if (p == 1.0 && is_chain(space)) {
    std::vector<char> grounded(n, 0);
    for (PointId g : grounds) grounded[g] = 1;
    const auto order = chain_order(space);
    double best = 0.0;
    std::vector<char> inside(n, 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      std::fill(inside.begin(), inside.end(), 0);
      bool blocked = false;
      for (std::size_t j = i; j < order.size(); ++j) {
        if (grounded[order[j]]) {
          blocked = true;
          break;
        }
        inside[order[j]] = 1;
        std::vector<double> f(n);
        for (std::size_t v = 0; v < n; ++v) f[v] = inside[v] ? 1.0 : 0.0;
        best = std::max(best, evaluate_quotient(prob, f));
      }
      (void)blocked;
    }
    check.value = best;
    check.method = Method::Exhaustive;
    return check;
  }

  MultistartOptions options;
  options.seed = seed;
  options.threads = threads;
  QuotientResult ascent = maximize_quotient(prob, options);
  check.value = ascent.value;
  check.method = Method::Multistart;
  return check;
}

}  // namespace

// -- pipeline -----------------------------------------------------------------

InequalityCertificate certify_global(const FiniteMetricMeasureSpace& space,
                                     const WeightBuilder& lambda_builder,
                                     const WeightBuilder& mu_builder,
                                     const CertifyOptions& options) {
  const std::size_t n = space.point_count();
  std::vector<double> lambda(n), mu(n);
  for (std::size_t x = 0; x < n; ++x) {
    lambda[x] = lambda_builder(space, static_cast<PointId>(x));
    mu[x] = mu_builder(space, static_cast<PointId>(x));
  }
  FiniteMetricMeasureSpace weighted = space.reweighted(lambda, mu);

  GoodCovering covering = build_annuli_covering(weighted, options.kappa);

  InequalityCertificate cert;
  cert.kind = options.kind;
  cert.p = options.p;
  cert.k = options.k;
  cert.weight_tag = options.weight_tag;
  cert.q1 = covering.q1;
  cert.q2 = covering.q2;

  double sc = 0.0;
  std::size_t worker = 0;
  for (std::size_t pi = 0; pi < covering.pieces.size(); ++pi) {
    const auto& piece = covering.pieces[pi];
    for (int pair_index = 0; pair_index < 2; ++pair_index) {
      const auto& inner = pair_index == 0 ? piece.u : piece.ustar;
      const auto& outer = pair_index == 0 ? piece.ustar : piece.usharp;
      LocalConstantResult local = local_neumann_constant(
          weighted, lambda, mu, inner, outer, options.p, options.k,
          child_seed(options.seed, 1000 + worker), options.threads);
      ++worker;
      cert.locals.push_back({pi, pair_index == 0 ? "U,U*" : "U*,U#",
                             local.value, local.method});
      sc = std::max(sc, local.value);
      if (local.method == Method::Multistart) cert.heuristic = true;
    }
  }
  cert.sc = sc;

  WeightedGraph cgraph = covering_graph(
      weighted, covering, [&](PointId x) { return lambda[x]; });
  if (cgraph.edge_count() == 0) {
    cert.sd = 0.0;
    cert.sd_method = Method::Exhaustive;
  } else {
    DiscreteConstantReport sd_report = best_sobolev_constant(
        cgraph, options.p, kOrderInf, SobolevKind::Dirichlet,
        child_seed(options.seed, 2), options.threads);
    cert.sd = sd_report.constant;
    cert.sd_method = sd_report.method;
    if (sd_report.method == Method::Multistart) cert.heuristic = true;
  }

  PatchInput input;
  input.sc = std::max(sc, std::numeric_limits<double>::min());
  input.sd = cert.sd;
  input.q1 = static_cast<double>(covering.q1);
  input.q2 = covering.q2;
  input.p = options.p;
  input.k = options.k;
  cert.formula = "patch-dirichlet";
  cert.constant = patch_dirichlet_constant(input);

  if (options.cross_check) {
    std::vector<PointId> grounds;
    for (const auto& piece : covering.pieces) {
      if (piece.level == covering.level_max) {
        grounds.insert(grounds.end(), piece.u.begin(), piece.u.end());
      }
    }
    std::sort(grounds.begin(), grounds.end());
    if (!grounds.empty() && grounds.size() < n - 1) {
      cert.cross_check =
          direct_global_estimate(weighted, lambda, mu, grounds, options.p,
                                 options.k, child_seed(options.seed, 3),
                                 options.threads);
    }
  }
  return cert;
}

std::string InequalityCertificate::to_json_string() const {
  nlohmann::ordered_json j;
  j["kind"] = certificate_kind_name(kind);
  j["p"] = p;
  if (order_is_inf(k)) {
    j["k"] = "inf";
  } else {
    j["k"] = k;
  }
  j["weight"] = weight_tag;
  j["constant"] = constant;
  j["heuristic"] = heuristic;
  nlohmann::ordered_json prov;
  prov["sc"] = sc;
  prov["sd"] = sd;
  prov["sd_method"] = method_name(sd_method);
  prov["q1"] = q1;
  prov["q2"] = q2;
  prov["formula"] = formula;
  prov["locals"] = nlohmann::ordered_json::array();
  for (const auto& local : locals) {
    nlohmann::ordered_json lj;
    lj["piece"] = local.piece;
    lj["pair"] = local.pair;
    lj["value"] = local.value;
    lj["method"] = method_name(local.method);
    prov["locals"].push_back(lj);
  }
  j["provenance"] = prov;
  if (cross_check) {
    j["crossCheck"]["value"] = cross_check->value;
    j["crossCheck"]["method"] = method_name(cross_check->method);
  }
  return j.dump(2);
}

}  // namespace sobocert
