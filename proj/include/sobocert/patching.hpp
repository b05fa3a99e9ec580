#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sobocert/covering.hpp"
#include "sobocert/discrete.hpp"
#include "sobocert/space.hpp"

namespace sobocert {

enum class PatchVariant { Dirichlet, Neumann };

/// Inputs for the explicit patched-constant formulas: a continuous local
/// constant, a discrete constant of order infinity, and the covering
/// overlap/comparability constants.
struct PatchInput {
  double sc = 1.0;
  double sd = 1.0;
  double q1 = 1.0;
  double q2 = 1.0;
  double p = 2.0;
  double k = kOrderInf;
  PatchVariant variant = PatchVariant::Dirichlet;
};

/// 2^{p-1+p/k} ((Sc Q1)^{k/(k-p)} + Sd Q2 (2^p Sc Q1^3)^{k/(k-p)})^{(k-p)/k}.
double patch_dirichlet_constant(const PatchInput& input);

/// Exactly 2^p times the Dirichlet value.
double patch_neumann_constant(const PatchInput& input);

/// Mixed-order patching for 1 <= p <= r <= q:
/// 2^{p-p/q} ((Q1 Sc)^{q/p} + (Sd Q2 2^r Sc'^{r/p})^{q/r} Q1^{3q/p})^{p/q};
/// at q = infinity every ratio of orders collapses to 1, matching the
/// infinite-order convention of the single-order formulas.
double patch_mixed_constant(double sc, double sc_prime, double sd, double q1,
                            double q2, double p, double r, double q);

enum class CertificateKind { SobolevDirichlet, SobolevNeumann, Hardy };

const char* certificate_kind_name(CertificateKind kind);

struct LocalConstantEntry {
  std::size_t piece = 0;
  std::string pair;  // "U,U*" or "U*,U#"
  double value = 0.0;
  Method method = Method::Eigen;
};

struct CrossCheck {
  double value = 0.0;
  Method method = Method::Multistart;
};

/// A certified global constant with the full provenance chain: per-piece
/// local constants, the discrete constant of the covering graph, the
/// overlap constants, and the formula applied. `heuristic` is set whenever
/// any sub-constant is only a multistart lower bound, in which case the
/// cross-check is advisory.
struct InequalityCertificate {
  CertificateKind kind = CertificateKind::SobolevDirichlet;
  double p = 2.0;
  double k = kOrderInf;
  std::string weight_tag = "unit";
  double constant = 0.0;
  bool heuristic = false;

  double sc = 0.0;
  double sd = 0.0;
  Method sd_method = Method::Eigen;
  std::size_t q1 = 0;
  double q2 = 0.0;
  std::string formula = "patch-dirichlet";
  std::vector<LocalConstantEntry> locals;
  std::optional<CrossCheck> cross_check;

  std::string to_json_string() const;
};

/// Per-point measure builder; returning 0 is allowed at the base point only
/// (its weight is dropped from left-hand sides, the null exceptional set).
using WeightBuilder =
    std::function<double(const FiniteMetricMeasureSpace&, PointId)>;

WeightBuilder unit_lambda_builder();
WeightBuilder unit_mu_builder();

struct CertifyOptions {
  double kappa = 2.0;
  double p = 2.0;
  double k = kOrderInf;
  CertificateKind kind = CertificateKind::SobolevDirichlet;
  std::string weight_tag = "unit";
  std::uint64_t seed = 0;
  int threads = 1;
  bool cross_check = true;
};

/// Two-measure local Neumann constant on the pair (inner, outer): mean and
/// left-hand side over `inner` with weight lambda, difference-quotient
/// energy over the outer induced subgraph with weight mu. Exact via the
/// eigensolver at p=2, k=inf; exact by cut enumeration at p=1 on trees and
/// small subgraphs; multistart otherwise.
struct LocalConstantResult {
  double value = 0.0;
  Method method = Method::Multistart;
};

LocalConstantResult local_neumann_constant(
    const FiniteMetricMeasureSpace& space, const std::vector<double>& lambda,
    const std::vector<double>& mu, const std::vector<PointId>& inner,
    const std::vector<PointId>& outer, double p, double k,
    std::uint64_t seed = 0, int threads = 1);

/// End-to-end pipeline: build the annuli covering, estimate local
/// continuous constants per piece, compute the discrete Dirichlet constant
/// of the covering graph, apply the patching formula, and cross-check
/// against a direct estimate of the global constant.
InequalityCertificate certify_global(const FiniteMetricMeasureSpace& space,
                                     const WeightBuilder& lambda_builder,
                                     const WeightBuilder& mu_builder,
                                     const CertifyOptions& options);

}  // namespace sobocert
