#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sobocert/graph.hpp"

namespace sobocert {

inline constexpr double kOrderInf = std::numeric_limits<double>::infinity();

inline bool order_is_inf(double k) { return std::isinf(k); }

/// LHS exponent q = pk/(k-p); q = p at k = infinity.
inline double lhs_exponent(double p, double k) {
  return order_is_inf(k) ? p : p * k / (k - p);
}

/// Outer exponent (k-p)/k; 1 at k = infinity.
inline double outer_exponent(double p, double k) {
  return order_is_inf(k) ? 1.0 : (k - p) / k;
}

enum class ConstantKind {
  Isoperimetric,
  SobolevDirichlet,
  SobolevNeumann,
  PoincareSup,
};

enum class Method { Exhaustive, Eigen, Multistart, Formula };

const char* constant_kind_name(ConstantKind kind);
const char* method_name(Method method);

/// A computed inequality constant together with how it was obtained and a
/// witness achieving the reported quotient. Constants from Exhaustive or
/// Eigen are exact for the instance; Multistart results are lower bounds.
struct DiscreteConstantReport {
  ConstantKind kind = ConstantKind::Isoperimetric;
  double p = 1.0;
  double k = kOrderInf;
  double constant = 0.0;
  Method method = Method::Exhaustive;
  std::optional<std::vector<double>> witness_function;
  std::optional<std::vector<VertexId>> witness_subset;

  std::string to_json_string() const;
};

/// Re-evaluates the report's witness on the graph; tests assert this
/// reproduces `constant` to 1e-9 relative.
double reevaluate_witness(const WeightedGraph& graph,
                          const DiscreteConstantReport& report);

// -- generic quotient machinery ---------------------------------------------

/// sup over admissible f of
///   (sum_i lhs[i] |f_i - mean|^q)^s  /  sum_e w_e |f_a - f_b|^p
/// where mean is the mean_weights-weighted mean of f when mean_weights is
/// nonempty, otherwise 0, and f is forced to vanish on `grounds`.
struct QuotientProblem {
  struct EnergyEdge {
    VertexId a;
    VertexId b;
    double w;
  };

  std::size_t n = 0;
  std::vector<double> lhs_weights;
  std::vector<double> mean_weights;  // empty = no mean subtraction
  std::vector<EnergyEdge> energy;
  std::vector<VertexId> grounds;
  double q = 2.0;
  double s = 1.0;
  double p = 2.0;
  double denom_exponent = 1.0;
};

double evaluate_quotient(const QuotientProblem& prob,
                         const std::vector<double>& f);

struct QuotientResult {
  double value = 0.0;
  std::vector<double> witness;
  Method method = Method::Multistart;
};

/// Exact solution via a generalized symmetric eigenproblem. Requires
/// p == 2, q == 2, s == 1. Throws Disconnected when the energy form is
/// degenerate on the admissible space.
QuotientResult exact_p2_quotient(const QuotientProblem& prob);

struct MultistartOptions {
  int starts = 32;
  int max_iterations = 10000;
  double step_tolerance = 1e-10;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::vector<double>> extra_seeds;
};

/// Deterministic multistart ascent on the log-quotient; the result is a
/// valid lower bound witnessed by `witness`.
QuotientResult maximize_quotient(const QuotientProblem& prob,
                                 const MultistartOptions& options);

// -- named constants ---------------------------------------------------------

/// Smallest I with m(Omega)^{(k-1)/k} <= I m(boundary Omega) over nonempty
/// proper subsets. Exact for <= 20 vertices; randomized sweep-cut lower
/// bound above that.
DiscreteConstantReport isoperimetric_constant(const WeightedGraph& graph,
                                              double k,
                                              std::uint64_t seed = 0);

enum class SobolevKind { Dirichlet, Neumann };

/// Best constant of the discrete Lp Sobolev inequality of order k. On a
/// finite graph the Dirichlet variant ranges over functions supported on a
/// proper subset of the vertices (whole-set supports are excluded since the
/// whole set has empty boundary).
DiscreteConstantReport best_sobolev_constant(const WeightedGraph& graph,
                                             double p, double k,
                                             SobolevKind kind,
                                             std::uint64_t seed = 0,
                                             int threads = 1);

/// S' = 2p (k-1)/(k-p) d S C^{1-1/p}; the ratio is 1 at k = infinity.
/// Bounds the root-form Lp constant obtained from an L1 constant S.
double l1_to_lp_constant(double S, double p, double k, double d, double C);

struct TreePoincareBounds {
  double sup_bound = 0.0;  // N_e^{1-1/p}, spanning-tree edge count
  double sum_bound = 0.0;  // N_v (N_v-1)^{p-1}
};

/// Upper bounds for the Poincare inequality on a connected graph with
/// counting measure, via its spanning tree.
TreePoincareBounds tree_poincare_bounds(const WeightedGraph& graph, double p);

/// Lower-bound estimate of the sup-version Poincare constant
/// sup_f ||f - m(f)||_inf / (sum_e |df|^p)^{1/p}.
double sup_poincare_estimate(const WeightedGraph& graph, double p,
                             std::uint64_t seed = 0);

struct LayerCakeRecord {
  double isoperimetric = 0.0;
  double sobolev_l1 = 0.0;
  double relative_gap = 0.0;
};

/// Computes the exact isoperimetric constant and, by an independent
/// function-space search (indicators, nested two-value profiles, multistart
/// with level-set extraction), the exact best L1 Sobolev-Dirichlet constant.
/// The two agree by the layer-cake principle.
LayerCakeRecord verify_layer_cake(const WeightedGraph& graph, double k,
                                  std::uint64_t seed = 0);

}  // namespace sobocert
