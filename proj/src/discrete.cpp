#include "sobocert/discrete.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sobocert/rng.hpp"

namespace sobocert {

namespace {

constexpr std::size_t kExhaustiveLimit = 20;
constexpr std::size_t kDenseEigenLimit = 500;
constexpr std::size_t kGroundScanLimit = 64;

double signed_pow(double x, double e) {
  if (x == 0.0) return 0.0;
  return (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), e);
}

bool lex_less(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<VertexId> mask_members(std::uint64_t mask, std::size_t n) {
  std::vector<VertexId> members;
  for (std::size_t v = 0; v < n; ++v) {
    if (mask & (1ULL << v)) members.push_back(static_cast<VertexId>(v));
  }
  return members;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

}  // namespace

const char* constant_kind_name(ConstantKind kind) {
  switch (kind) {
    case ConstantKind::Isoperimetric: return "isoperimetric";
    case ConstantKind::SobolevDirichlet: return "sobolev-dirichlet";
    case ConstantKind::SobolevNeumann: return "sobolev-neumann";
    case ConstantKind::PoincareSup: return "poincare-sup";
  }
  return "unknown";
}

const char* method_name(Method method) {
  switch (method) {
    case Method::Exhaustive: return "exhaustive";
    case Method::Eigen: return "eigen";
    case Method::Multistart: return "multistart-optimization";
    case Method::Formula: return "formula";
  }
  return "unknown";
}

// -- quotient evaluation ------------------------------------------------------

namespace {

struct QuotientParts {
  double t1 = 0.0;  // sum lhs |f - mean|^q
  double t2 = 0.0;  // sum w |df|^p
  double mean = 0.0;
};

QuotientParts quotient_parts(const QuotientProblem& prob,
                             const std::vector<double>& f) {
  QuotientParts parts;
  if (!prob.mean_weights.empty()) {
    double wsum = 0.0, fsum = 0.0;
    for (std::size_t i = 0; i < prob.n; ++i) {
      wsum += prob.mean_weights[i];
      fsum += prob.mean_weights[i] * f[i];
    }
    parts.mean = fsum / wsum;
  }
  for (std::size_t i = 0; i < prob.n; ++i) {
    if (prob.lhs_weights[i] == 0.0) continue;
    parts.t1 +=
        prob.lhs_weights[i] * std::pow(std::abs(f[i] - parts.mean), prob.q);
  }
  for (const auto& e : prob.energy) {
    parts.t2 += e.w * std::pow(std::abs(f[e.a] - f[e.b]), prob.p);
  }
  return parts;
}

}  // namespace

double evaluate_quotient(const QuotientProblem& prob,
                         const std::vector<double>& f) {
  const QuotientParts parts = quotient_parts(prob, f);
  if (parts.t1 == 0.0) return 0.0;
  if (parts.t2 == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(parts.t1, prob.s) / std::pow(parts.t2, prob.denom_exponent);
}

// -- exact p = 2 path ---------------------------------------------------------

namespace {

void check_energy_admissible(const QuotientProblem& prob) {
  UnionFind uf(prob.n);
  for (const auto& e : prob.energy) {
    if (e.w > 0.0) uf.unite(static_cast<int>(e.a), static_cast<int>(e.b));
  }
  std::vector<char> grounded_component(prob.n, 0);
  for (VertexId g : prob.grounds) grounded_component[uf.find(g)] = 1;
  if (!prob.grounds.empty()) {
    for (std::size_t i = 0; i < prob.n; ++i) {
      if (!grounded_component[uf.find(static_cast<int>(i))]) {
        throw Error(ErrorCode::Disconnected,
                    "energy graph component without ground");
      }
    }
  } else {
    const int root = prob.n ? uf.find(0) : 0;
    for (std::size_t i = 0; i < prob.n; ++i) {
      if (uf.find(static_cast<int>(i)) != root) {
        throw Error(ErrorCode::Disconnected, "energy graph disconnected");
      }
    }
  }
}

QuotientResult exact_p2_dense(const QuotientProblem& prob) {
  using Matrix = Eigen::MatrixXd;
  const std::size_t n = prob.n;
  if (!prob.grounds.empty()) {
    std::vector<char> is_ground(n, 0);
    for (VertexId g : prob.grounds) is_ground[g] = 1;
    std::vector<int> to_free(n, -1);
    std::vector<VertexId> free_ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_ground[i]) {
        to_free[i] = static_cast<int>(free_ids.size());
        free_ids.push_back(static_cast<VertexId>(i));
      }
    }
    const std::size_t m = free_ids.size();
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "all vertices grounded");
    Matrix A = Matrix::Zero(m, m);
    Matrix B = Matrix::Zero(m, m);
    for (std::size_t j = 0; j < m; ++j) A(j, j) = prob.lhs_weights[free_ids[j]];
    for (const auto& e : prob.energy) {
      const int fa = to_free[e.a];
      const int fb = to_free[e.b];
      if (fa >= 0) B(fa, fa) += e.w;
      if (fb >= 0) B(fb, fb) += e.w;
      if (fa >= 0 && fb >= 0) {
        B(fa, fb) -= e.w;
        B(fb, fa) -= e.w;
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(A, B);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::Disconnected, "generalized eigensolve failed");
    }
    const Eigen::Index last = static_cast<Eigen::Index>(m) - 1;
    QuotientResult result;
    result.value = solver.eigenvalues()(last);
    result.method = Method::Eigen;
    result.witness.assign(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      result.witness[free_ids[j]] = solver.eigenvectors()(j, last);
    }
    return result;
  }

  // Mean-subtracted form: both quadratic forms vanish on constants, so work
  // in an orthonormal basis of the complement.
  Matrix A = Matrix::Zero(n, n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) wsum += prob.mean_weights[i];
  Eigen::VectorXd wvec(n);
  for (std::size_t i = 0; i < n; ++i) wvec(i) = prob.mean_weights[i] / wsum;
  // A = (I - 1 w^T)^T diag(lhs) (I - 1 w^T)
  Eigen::VectorXd lhs(n);
  for (std::size_t i = 0; i < n; ++i) lhs(i) = prob.lhs_weights[i];
  Matrix proj = Matrix::Identity(n, n) - Eigen::VectorXd::Ones(n) * wvec.transpose();
  A = proj.transpose() * lhs.asDiagonal() * proj;
  Matrix B = Matrix::Zero(n, n);
  for (const auto& e : prob.energy) {
    B(e.a, e.a) += e.w;
    B(e.b, e.b) += e.w;
    B(e.a, e.b) -= e.w;
    B(e.b, e.a) -= e.w;
  }
  // Helmert-style orthonormal basis of the complement of constants.
  Matrix Z = Matrix::Zero(n, n - 1);
  for (std::size_t j = 1; j < n; ++j) {
    const double norm = std::sqrt(static_cast<double>(j) * (j + 1));
    for (std::size_t i = 0; i < j; ++i) Z(i, j - 1) = 1.0 / norm;
    Z(j, j - 1) = -static_cast<double>(j) / norm;
  }
  Matrix Ar = Z.transpose() * A * Z;
  Matrix Br = Z.transpose() * B * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(Ar, Br);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Disconnected, "generalized eigensolve failed");
  }
  const Eigen::Index last = static_cast<Eigen::Index>(n) - 2;
  QuotientResult result;
  result.value = solver.eigenvalues()(last);
  result.method = Method::Eigen;
  Eigen::VectorXd w = Z * solver.eigenvectors().col(last);
  result.witness.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) result.witness[i] = w(i);
  return result;
}

// Power iteration with sparse solves; used above the dense size limit.
// Grounded problems are reduced to free coordinates; the mean-subtracted
// form keeps full coordinates and projects against constants (both forms
// annihilate them, so CG stays in the complement).
QuotientResult exact_p2_iterative(const QuotientProblem& prob) {
  using SpMat = Eigen::SparseMatrix<double>;
  const std::size_t n = prob.n;
  const bool use_mean = !prob.mean_weights.empty();

  std::vector<char> is_ground(n, 0);
  for (VertexId g : prob.grounds) is_ground[g] = 1;
  std::vector<int> to_free(n, -1);
  std::vector<VertexId> free_ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_ground[i]) {
      to_free[i] = static_cast<int>(free_ids.size());
      free_ids.push_back(static_cast<VertexId>(i));
    }
  }
  const std::size_t m = free_ids.size();

  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& e : prob.energy) {
    const int fa = to_free[e.a];
    const int fb = to_free[e.b];
    if (fa >= 0) trips.emplace_back(fa, fa, e.w);
    if (fb >= 0) trips.emplace_back(fb, fb, e.w);
    if (fa >= 0 && fb >= 0) {
      trips.emplace_back(fa, fb, -e.w);
      trips.emplace_back(fb, fa, -e.w);
    }
  }
  SpMat B(m, m);
  B.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd wvec = Eigen::VectorXd::Zero(m);
  if (use_mean) {
    double wsum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      wvec(j) = prob.mean_weights[free_ids[j]];
      wsum += wvec(j);
    }
    wvec /= wsum;
  }

  auto apply_A = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    if (use_mean) y.array() -= wvec.dot(x);
    for (std::size_t j = 0; j < m; ++j) y(j) *= prob.lhs_weights[free_ids[j]];
    if (use_mean) {
      const double total = y.sum();
      for (std::size_t j = 0; j < m; ++j) y(j) -= wvec(j) * total;
    }
    return y;
  };

  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(static_cast<int>(100 * m));
  cg.compute(B);

  SplitMix64 rng(0x5eedULL);
  Eigen::VectorXd x(m);
  for (std::size_t j = 0; j < m; ++j) x(j) = rng.next_gaussian();
  if (use_mean) x.array() -= x.mean();
  x.normalize();

  double value = 0.0;
  for (int iter = 0; iter < 5000; ++iter) {
    Eigen::VectorXd ax = apply_A(x);
    Eigen::VectorXd y = cg.solve(ax);
    if (use_mean) y.array() -= y.mean();
    const double norm = y.norm();
    if (norm == 0.0) break;
    y /= norm;
    const double next = y.dot(apply_A(y)) / y.dot(B * y);
    const bool settled = std::abs(next - value) <= 1e-13 * std::abs(next);
    value = next;
    x = y;
    if (settled && iter > 4) break;
  }
  QuotientResult result;
  result.value = value;
  result.method = Method::Eigen;
  result.witness.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) result.witness[free_ids[j]] = x(j);
  return result;
}

}  // namespace

QuotientResult exact_p2_quotient(const QuotientProblem& prob) {
  if (prob.p != 2.0 || prob.q != 2.0 || prob.s != 1.0 ||
      prob.denom_exponent != 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "exact path requires p=2, q=2, s=1");
  }
  if (prob.grounds.empty() && prob.mean_weights.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "need grounds or mean weights to avoid the constant kernel");
  }
  if (!prob.grounds.empty() && !prob.mean_weights.empty()) {
    throw Error(ErrorCode::InvalidArgument, "grounds and mean are exclusive");
  }
  check_energy_admissible(prob);
  if (prob.n <= kDenseEigenLimit) return exact_p2_dense(prob);
  return exact_p2_iterative(prob);
}

// -- multistart ascent --------------------------------------------------------

namespace {

struct AscentState {
  double log_value = -std::numeric_limits<double>::infinity();
  std::vector<double> f;
};

void normalize_inf(std::vector<double>& f) {
  double mx = 0.0;
  for (double v : f) mx = std::max(mx, std::abs(v));
  if (mx > 0.0) {
    for (double& v : f) v /= mx;
  }
}

double log_objective(const QuotientProblem& prob, const std::vector<double>& f,
                     QuotientParts* parts_out) {
  const QuotientParts parts = quotient_parts(prob, f);
  if (parts_out) *parts_out = parts;
  if (parts.t1 <= 0.0 || parts.t2 <= 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return prob.s * std::log(parts.t1) -
         prob.denom_exponent * std::log(parts.t2);
}

void gradient(const QuotientProblem& prob, const std::vector<double>& f,
              const QuotientParts& parts, std::vector<double>& grad) {
  const std::size_t n = prob.n;
  grad.assign(n, 0.0);
  // d(t1)/df
  double mean_coupling = 0.0;
  double wsum = 0.0;
  if (!prob.mean_weights.empty()) {
    for (std::size_t i = 0; i < n; ++i) wsum += prob.mean_weights[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (prob.lhs_weights[i] == 0.0) continue;
    const double d =
        prob.q * prob.lhs_weights[i] * signed_pow(f[i] - parts.mean, prob.q - 1.0);
    grad[i] += prob.s * d / parts.t1;
    mean_coupling += d;
  }
  if (!prob.mean_weights.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] -= prob.s * (prob.mean_weights[i] / wsum) * mean_coupling /
                 parts.t1;
    }
  }
  for (const auto& e : prob.energy) {
    const double d =
        prob.p * e.w * signed_pow(f[e.a] - f[e.b], prob.p - 1.0);
    grad[e.a] -= prob.denom_exponent * d / parts.t2;
    grad[e.b] += prob.denom_exponent * d / parts.t2;
  }
  for (VertexId g : prob.grounds) grad[g] = 0.0;
}

AscentState run_single_start(const QuotientProblem& prob,
                             const MultistartOptions& options,
                             std::vector<double> f) {
  for (VertexId g : prob.grounds) f[g] = 0.0;
  if (!prob.mean_weights.empty()) {
    double wsum = 0.0, fsum = 0.0;
    for (std::size_t i = 0; i < prob.n; ++i) {
      wsum += prob.mean_weights[i];
      fsum += prob.mean_weights[i] * f[i];
    }
    for (double& v : f) v -= fsum / wsum;
  }
  normalize_inf(f);

  AscentState state;
  QuotientParts parts;
  double value = log_objective(prob, f, &parts);
  if (!std::isfinite(value)) return state;

  std::vector<double> grad;
  std::vector<double> candidate(prob.n);
  double step = 0.1;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    gradient(prob, f, parts, grad);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) break;

    bool accepted = false;
    for (int shrink = 0; shrink < 60; ++shrink) {
      for (std::size_t i = 0; i < prob.n; ++i) {
        candidate[i] = f[i] + step * grad[i] / gnorm;
      }
      for (VertexId g : prob.grounds) candidate[g] = 0.0;
      normalize_inf(candidate);
      QuotientParts cand_parts;
      const double cand_value = log_objective(prob, candidate, &cand_parts);
      if (cand_value > value) {
        double move = 0.0;
        for (std::size_t i = 0; i < prob.n; ++i) {
          move = std::max(move, std::abs(candidate[i] - f[i]));
        }
        f = candidate;
        value = cand_value;
        parts = cand_parts;
        step = std::min(step * 1.5, 1e3);
        accepted = true;
        if (move < options.step_tolerance) iter = options.max_iterations;
        break;
      }
      step *= 0.5;
      if (step < 1e-15) break;
    }
    if (!accepted) break;
  }
  state.log_value = value;
  state.f = std::move(f);
  return state;
}

}  // namespace

QuotientResult maximize_quotient(const QuotientProblem& prob,
                                 const MultistartOptions& options) {
  std::vector<std::vector<double>> starts;
  for (int s = 0; s < options.starts; ++s) {
    SplitMix64 rng(child_seed(options.seed, static_cast<std::uint64_t>(s)));
    std::vector<double> f(prob.n);
    for (std::size_t i = 0; i < prob.n; ++i) f[i] = rng.next_gaussian();
    starts.push_back(std::move(f));
  }
  for (const auto& extra : options.extra_seeds) {
    if (extra.size() == prob.n) starts.push_back(extra);
  }

  std::vector<AscentState> results(starts.size());
  if (options.threads > 1) {
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> cursor{0};
    const int workers =
        std::min<int>(options.threads, static_cast<int>(starts.size()));
    for (int w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&]() {
        while (true) {
          const std::size_t idx = cursor.fetch_add(1);
          if (idx >= starts.size()) return;
          results[idx] = run_single_start(prob, options, starts[idx]);
        }
      }));
    }
    for (auto& fut : futures) fut.get();
  } else {
    for (std::size_t idx = 0; idx < starts.size(); ++idx) {
      results[idx] = run_single_start(prob, options, starts[idx]);
    }
  }

  QuotientResult best;
  best.value = 0.0;
  best.method = Method::Multistart;
  double best_log = -std::numeric_limits<double>::infinity();
  for (const auto& state : results) {
    if (state.log_value > best_log) {
      best_log = state.log_value;
      best.witness = state.f;
    }
  }
  if (std::isfinite(best_log) && !best.witness.empty()) {
    best.value = evaluate_quotient(prob, best.witness);
  }
  return best;
}

// -- isoperimetric ------------------------------------------------------------

namespace {

double subset_lhs_measure(const WeightedGraph& graph, std::uint64_t mask,
                          double exponent) {
  double m = 0.0;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    if (mask & (1ULL << v)) m += graph.vertex_measure(v);
  }
  return std::pow(m, exponent);
}

double subset_boundary_measure(const WeightedGraph& graph,
                               std::uint64_t mask) {
  double b = 0.0;
  for (const Edge& e : graph.edges()) {
    const bool ina = (mask >> e.a) & 1ULL;
    const bool inb = (mask >> e.b) & 1ULL;
    if (ina != inb) b += graph.edge_measure(e);
  }
  return b;
}

void require_connected_with_edges(const WeightedGraph& graph) {
  if (graph.vertex_count() == 0) {
    throw Error(ErrorCode::EmptyGraph, "no vertices");
  }
  if (graph.edge_count() == 0) {
    throw Error(ErrorCode::NoEdges, "constant would be infinite");
  }
  if (!graph.connected()) {
    throw Error(ErrorCode::Disconnected, "constant would be infinite");
  }
}

DiscreteConstantReport sweep_cut_bound(const WeightedGraph& graph, double k,
                                       std::uint64_t seed) {
  const std::size_t n = graph.vertex_count();
  const double exponent = order_is_inf(k) ? 1.0 : (k - 1.0) / k;
  DiscreteConstantReport report;
  report.kind = ConstantKind::Isoperimetric;
  report.p = 1.0;
  report.k = k;
  report.method = Method::Multistart;
  double best = -1.0;
  std::vector<VertexId> best_subset;
  std::vector<std::size_t> order(n);
  std::vector<char> inside(n);
  for (int sweep = 0; sweep < 32; ++sweep) {
    SplitMix64 rng(child_seed(seed, static_cast<std::uint64_t>(sweep)));
    std::vector<double> score(n);
    for (std::size_t v = 0; v < n; ++v) score[v] = rng.next_gaussian();
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    std::fill(inside.begin(), inside.end(), 0);
    double measure = 0.0;
    double bound = 0.0;
    std::vector<VertexId> subset;
    for (std::size_t idx = 0; idx + 1 < n; ++idx) {
      const VertexId v = static_cast<VertexId>(order[idx]);
      inside[v] = 1;
      subset.push_back(v);
      measure += graph.vertex_measure(v);
      for (VertexId u : graph.neighbors(v)) {
        const double em = graph.edge_measure(Edge(v, u));
        bound += inside[u] ? -em : em;
      }
      const double quotient = std::pow(measure, exponent) / bound;
      if (quotient > best) {
        best = quotient;
        best_subset = subset;
      }
    }
  }
  std::sort(best_subset.begin(), best_subset.end());
  report.constant = best;
  report.witness_subset = std::move(best_subset);
  return report;
}

}  // namespace

DiscreteConstantReport isoperimetric_constant(const WeightedGraph& graph,
                                              double k, std::uint64_t seed) {
  if (!(k > 1.0)) {
    throw Error(ErrorCode::DegenerateOrder, "order k must exceed 1");
  }
  require_connected_with_edges(graph);
  const std::size_t n = graph.vertex_count();
  if (n > kExhaustiveLimit) return sweep_cut_bound(graph, k, seed);

  const double exponent = order_is_inf(k) ? 1.0 : (k - 1.0) / k;
  DiscreteConstantReport report;
  report.kind = ConstantKind::Isoperimetric;
  report.p = 1.0;
  report.k = k;
  report.method = Method::Exhaustive;

  double best = -1.0;
  std::uint64_t best_mask = 0;
  const std::uint64_t all = (1ULL << n) - 1ULL;
  for (std::uint64_t mask = 1; mask < all; ++mask) {
    const double quotient = subset_lhs_measure(graph, mask, exponent) /
                            subset_boundary_measure(graph, mask);
    if (quotient > best) {
      best = quotient;
      best_mask = mask;
    } else if (quotient == best) {
      auto current = mask_members(mask, n);
      auto incumbent = mask_members(best_mask, n);
      if (lex_less(current, incumbent)) best_mask = mask;
    }
  }
  report.constant = best;
  report.witness_subset = mask_members(best_mask, n);
  return report;
}

// -- best Sobolev constants ---------------------------------------------------

namespace {

QuotientProblem sobolev_problem(const WeightedGraph& graph, double p, double k,
                                SobolevKind kind) {
  QuotientProblem prob;
  prob.n = graph.vertex_count();
  prob.lhs_weights = graph.vertex_measures();
  if (kind == SobolevKind::Neumann) {
    prob.mean_weights = graph.vertex_measures();
  }
  for (const Edge& e : graph.edges()) {
    prob.energy.push_back({e.a, e.b, graph.edge_measure(e)});
  }
  prob.q = lhs_exponent(p, k);
  prob.s = outer_exponent(p, k);
  prob.p = p;
  return prob;
}

DiscreteConstantReport exact_l1_constant(const WeightedGraph& graph, double p,
                                         double k, SobolevKind kind) {
  const std::size_t n = graph.vertex_count();
  const double q = lhs_exponent(1.0, k);       // k/(k-1), 1 at infinity
  const double outer = outer_exponent(1.0, k);  // (k-1)/k, 1 at infinity
  const double total = graph.total_vertex_measure();

  DiscreteConstantReport report;
  report.kind = kind == SobolevKind::Dirichlet ? ConstantKind::SobolevDirichlet
                                               : ConstantKind::SobolevNeumann;
  report.p = p;
  report.k = k;
  report.method = Method::Exhaustive;

  double best = -1.0;
  std::uint64_t best_mask = 0;
  const std::uint64_t all = (1ULL << n) - 1ULL;
  for (std::uint64_t mask = 1; mask < all; ++mask) {
    double numerator;
    double measure = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (mask & (1ULL << v)) measure += graph.vertex_measure(v);
    }
    if (kind == SobolevKind::Dirichlet) {
      numerator = std::pow(measure, outer);
    } else {
      const double theta = measure / total;
      const double inner = measure * std::pow(1.0 - theta, q) +
                           (total - measure) * std::pow(theta, q);
      numerator = std::pow(inner, outer);
    }
    const double quotient =
        numerator / subset_boundary_measure(graph, mask);
    if (quotient > best) {
      best = quotient;
      best_mask = mask;
    } else if (quotient == best) {
      auto current = mask_members(mask, n);
      auto incumbent = mask_members(best_mask, n);
      if (lex_less(current, incumbent)) best_mask = mask;
    }
  }
  report.constant = best;
  report.witness_subset = mask_members(best_mask, n);
  std::vector<double> indicator(n, 0.0);
  for (VertexId v : *report.witness_subset) indicator[v] = 1.0;
  report.witness_function = std::move(indicator);
  return report;
}

}  // namespace

DiscreteConstantReport best_sobolev_constant(const WeightedGraph& graph,
                                             double p, double k,
                                             SobolevKind kind,
                                             std::uint64_t seed, int threads) {
  if (p < 1.0) {
    throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
  }
  if (!(k > p)) {
    throw Error(ErrorCode::DegenerateOrder, "need p < k");
  }
  require_connected_with_edges(graph);
  const std::size_t n = graph.vertex_count();

  if (p == 1.0 && n <= kExhaustiveLimit) {
    return exact_l1_constant(graph, p, k, kind);
  }

  if (p == 2.0 && order_is_inf(k)) {
    if (kind == SobolevKind::Neumann) {
      QuotientProblem prob = sobolev_problem(graph, p, k, kind);
      QuotientResult result = exact_p2_quotient(prob);
      DiscreteConstantReport report;
      report.kind = ConstantKind::SobolevNeumann;
      report.p = p;
      report.k = k;
      report.constant = result.value;
      report.method = Method::Eigen;
      report.witness_function = std::move(result.witness);
      return report;
    }
    // Dirichlet: scan ground vertices; exact when every vertex is scanned.
    DiscreteConstantReport report;
    report.kind = ConstantKind::SobolevDirichlet;
    report.p = p;
    report.k = k;
    report.method = n <= kGroundScanLimit ? Method::Eigen : Method::Multistart;
    std::vector<VertexId> grounds;
    if (n <= kGroundScanLimit) {
      grounds.resize(n);
      std::iota(grounds.begin(), grounds.end(), 0);
    } else {
      for (std::size_t j = 0; j < 32; ++j) {
        grounds.push_back(static_cast<VertexId>(j * n / 32));
      }
    }
    double best = -1.0;
    for (VertexId g : grounds) {
      QuotientProblem prob = sobolev_problem(graph, p, k, kind);
      prob.grounds = {g};
      QuotientResult result = exact_p2_quotient(prob);
      if (result.value > best) {
        best = result.value;
        report.witness_function = std::move(result.witness);
      }
    }
    report.constant = best;
    return report;
  }

  // General (p, k): multistart ascent, reported as a lower bound.
  DiscreteConstantReport report;
  report.kind = kind == SobolevKind::Dirichlet ? ConstantKind::SobolevDirichlet
                                               : ConstantKind::SobolevNeumann;
  report.p = p;
  report.k = k;
  report.method = Method::Multistart;

  MultistartOptions options;
  options.seed = seed;
  options.threads = threads;
  // Seed with the best indicator when cheap; it is extremal near p = 1.
  if (n <= kExhaustiveLimit) {
    auto l1 = exact_l1_constant(graph, 1.0, k, kind);
    options.extra_seeds.push_back(*l1.witness_function);
  }

  if (kind == SobolevKind::Neumann) {
    QuotientProblem prob = sobolev_problem(graph, p, k, kind);
    if (p == 2.0 && graph.vertex_count() <= kDenseEigenLimit) {
      QuotientProblem eig = sobolev_problem(graph, 2.0, kOrderInf, kind);
      options.extra_seeds.push_back(exact_p2_quotient(eig).witness);
    }
    QuotientResult result = maximize_quotient(prob, options);
    report.constant = result.value;
    report.witness_function = std::move(result.witness);
    return report;
  }

  // Dirichlet: cycle ground vertices across restarts.
  const std::size_t ground_count = std::min<std::size_t>(n, 8);
  MultistartOptions per_ground = options;
  per_ground.starts = std::max(1, options.starts / static_cast<int>(ground_count));
  double best = -1.0;
  for (std::size_t gi = 0; gi < ground_count; ++gi) {
    QuotientProblem prob = sobolev_problem(graph, p, k, kind);
    prob.grounds = {static_cast<VertexId>(gi * n / ground_count)};
    per_ground.seed = child_seed(seed, gi);
    QuotientResult result = maximize_quotient(prob, per_ground);
    if (result.value > best) {
      best = result.value;
      report.witness_function = std::move(result.witness);
    }
  }
  report.constant = best;
  return report;
}

double l1_to_lp_constant(double S, double p, double k, double d, double C) {
  if (p < 1.0 || !(k > p)) {
    throw Error(ErrorCode::DegenerateOrder, "need 1 <= p < k");
  }
  if (!(S > 0.0) || !(d > 0.0) || !(C >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "need S > 0, d > 0, C >= 1");
  }
  const double ratio = order_is_inf(k) ? 1.0 : (k - 1.0) / (k - p);
  return 2.0 * p * ratio * d * S * std::pow(C, 1.0 - 1.0 / p);
}

TreePoincareBounds tree_poincare_bounds(const WeightedGraph& graph, double p) {
  if (graph.vertex_count() == 0) {
    throw Error(ErrorCode::EmptyGraph, "tree_poincare_bounds");
  }
  if (!graph.connected()) {
    throw Error(ErrorCode::Disconnected, "tree_poincare_bounds");
  }
  if (p < 1.0) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  for (double m : graph.vertex_measures()) {
    if (m != 1.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "bounds require the counting measure");
    }
  }
  const double nv = static_cast<double>(graph.vertex_count());
  const double ne = nv - 1.0;  // spanning tree edge count
  TreePoincareBounds bounds;
  bounds.sup_bound = std::pow(ne, 1.0 - 1.0 / p);
  bounds.sum_bound = nv * std::pow(nv - 1.0, p - 1.0);
  return bounds;
}

double sup_poincare_estimate(const WeightedGraph& graph, double p,
                             std::uint64_t seed) {
  if (!graph.connected()) {
    throw Error(ErrorCode::Disconnected, "sup_poincare_estimate");
  }
  const std::size_t n = graph.vertex_count();
  if (graph.edge_count() == 0) return 0.0;
  double best = 0.0;
  for (std::size_t target = 0; target < n; ++target) {
    QuotientProblem prob;
    prob.n = n;
    prob.lhs_weights.assign(n, 0.0);
    prob.lhs_weights[target] = 1.0;
    prob.mean_weights.assign(n, 1.0);
    for (const Edge& e : graph.edges()) {
      prob.energy.push_back({e.a, e.b, 1.0});
    }
    prob.q = 1.0;
    prob.s = 1.0;
    prob.p = p;
    prob.denom_exponent = 1.0 / p;

    MultistartOptions options;
    options.starts = 8;
    options.seed = child_seed(seed, target);
    std::vector<double> spike(n, 0.0);
    spike[target] = 1.0;
    options.extra_seeds.push_back(std::move(spike));
    best = std::max(best, maximize_quotient(prob, options).value);
  }
  return best;
}

// -- layer cake ---------------------------------------------------------------

LayerCakeRecord verify_layer_cake(const WeightedGraph& graph, double k,
                                  std::uint64_t seed) {
  if (graph.vertex_count() > 12) {
    throw Error(ErrorCode::InvalidArgument, "exhaustive regime is <= 12");
  }
  require_connected_with_edges(graph);
  if (!(k > 1.0)) throw Error(ErrorCode::DegenerateOrder, "k must exceed 1");

  LayerCakeRecord record;
  record.isoperimetric = isoperimetric_constant(graph, k, seed).constant;

  const std::size_t n = graph.vertex_count();
  QuotientProblem prob;
  prob.n = n;
  prob.lhs_weights = graph.vertex_measures();
  for (const Edge& e : graph.edges()) {
    prob.energy.push_back({e.a, e.b, graph.edge_measure(e)});
  }
  prob.q = lhs_exponent(1.0, k);
  prob.s = outer_exponent(1.0, k);
  prob.p = 1.0;

  double best = 0.0;
  const std::uint64_t all = (1ULL << n) - 1ULL;
  std::vector<double> f(n);

  // Indicators of proper nonempty subsets, evaluated through the function
  // quotient rather than the closed-form subset expression.
  for (std::uint64_t mask = 1; mask < all; ++mask) {
    for (std::size_t v = 0; v < n; ++v) f[v] = (mask >> v) & 1ULL ? 1.0 : 0.0;
    best = std::max(best, evaluate_quotient(prob, f));
  }

  // Nested two-valued profiles with a golden-section scan on the inner value.
  if (n <= 8) {
    for (std::uint64_t outer_mask = 1; outer_mask < all; ++outer_mask) {
      std::uint64_t inner = (outer_mask - 1) & outer_mask;
      for (; inner != 0; inner = (inner - 1) & outer_mask) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 30; ++it) {
          const double t1 = lo + (hi - lo) / 3.0;
          const double t2 = hi - (hi - lo) / 3.0;
          auto value_at = [&](double t) {
            for (std::size_t v = 0; v < n; ++v) {
              const bool in_outer = (outer_mask >> v) & 1ULL;
              const bool in_inner = (inner >> v) & 1ULL;
              f[v] = in_inner ? 1.0 : (in_outer ? t : 0.0);
            }
            return evaluate_quotient(prob, f);
          };
          if (value_at(t1) < value_at(t2)) {
            lo = t1;
          } else {
            hi = t2;
          }
        }
        for (std::size_t v = 0; v < n; ++v) {
          const bool in_outer = (outer_mask >> v) & 1ULL;
          const bool in_inner = (inner >> v) & 1ULL;
          f[v] = in_inner ? 1.0 : (in_outer ? 0.5 * (lo + hi) : 0.0);
        }
        best = std::max(best, evaluate_quotient(prob, f));
      }
    }
  }

  // Grounded multistart witnesses polished by extracting their superlevel
  // sets (the Dirichlet domain is functions supported on proper subsets,
  // so each ascent pins one vertex at zero). The indicators above already
  // attain the optimum; the ascent guards the equality from the function
  // side, so a sample of grounds suffices.
  const std::size_t ground_count = std::min<std::size_t>(n, 4);
  for (std::size_t gi = 0; gi < ground_count; ++gi) {
    const std::size_t g = gi * n / ground_count;
    QuotientProblem grounded = prob;
    grounded.grounds = {static_cast<VertexId>(g)};
    MultistartOptions options;
    options.starts = 2;
    options.seed = child_seed(seed, g);
    QuotientResult ascent = maximize_quotient(grounded, options);
    if (ascent.witness.empty()) continue;
    best = std::max(best, ascent.value);
    std::vector<double> levels;
    for (double v : ascent.witness) levels.push_back(std::abs(v));
    std::sort(levels.begin(), levels.end());
    for (double level : levels) {
      if (level == 0.0) continue;
      std::uint64_t mask = 0;
      for (std::size_t v = 0; v < n; ++v) {
        if (std::abs(ascent.witness[v]) >= level) mask |= (1ULL << v);
      }
      if (mask == 0 || mask == all) continue;
      for (std::size_t v = 0; v < n; ++v) {
        f[v] = (mask >> v) & 1ULL ? 1.0 : 0.0;
      }
      best = std::max(best, evaluate_quotient(prob, f));
    }
  }

  record.sobolev_l1 = best;
  record.relative_gap = std::abs(record.sobolev_l1 - record.isoperimetric) /
                        record.isoperimetric;
  return record;
}

// -- reporting ----------------------------------------------------------------

double reevaluate_witness(const WeightedGraph& graph,
                          const DiscreteConstantReport& report) {
  if (report.kind == ConstantKind::Isoperimetric) {
    if (!report.witness_subset) {
      throw Error(ErrorCode::InvalidArgument, "report has no subset witness");
    }
    VertexSubset omega(graph, *report.witness_subset);
    const double exponent =
        order_is_inf(report.k) ? 1.0 : (report.k - 1.0) / report.k;
    return std::pow(omega.measure(graph), exponent) /
           boundary_measure(graph, omega);
  }
  QuotientProblem prob = sobolev_problem(
      graph, report.p, report.k,
      report.kind == ConstantKind::SobolevNeumann ? SobolevKind::Neumann
                                                  : SobolevKind::Dirichlet);
  std::vector<double> f;
  if (report.witness_function) {
    f = *report.witness_function;
  } else if (report.witness_subset) {
    f.assign(graph.vertex_count(), 0.0);
    for (VertexId v : *report.witness_subset) f[v] = 1.0;
  } else {
    throw Error(ErrorCode::InvalidArgument, "report has no witness");
  }
  return evaluate_quotient(prob, f);
}

std::string DiscreteConstantReport::to_json_string() const {
  nlohmann::ordered_json j;
  j["kind"] = constant_kind_name(kind);
  j["p"] = p;
  if (order_is_inf(k)) {
    j["k"] = "inf";
  } else {
    j["k"] = k;
  }
  j["constant"] = constant;
  j["method"] = method_name(method);
  if (witness_subset) {
    j["witness"]["subset"] = *witness_subset;
  }
  if (witness_function) {
    j["witness"]["function"] = *witness_function;
  }
  return j.dump(2);
}

}  // namespace sobocert
