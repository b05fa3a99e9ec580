#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sobocert/discrete.hpp"
#include "sobocert/manifolds.hpp"
#include "sobocert/patching.hpp"
#include "sobocert/space.hpp"

namespace sobocert {

/// Vanishing-theorem threshold: 2/m for m >= 2, (2/m)(2 - 2/m) on (1, 2).
/// Both branches meet at 1 for m = 2.
double epsilon_m(double m);

struct ExponentConversions {
  double alpha = 0.0;       // 2(n - nu)/(n - 2)
  double b2 = 2.0;          // quadratic decay floor
  double b3 = 0.0;          // (nu - 2)(n - 1)/(n - 3)
  double gamma_kato = 0.0;  // (n - 3)/(n - 1)
};

ExponentConversions exponent_conversions(int n, double nu);

double alpha_from_nu(int n, double nu);
double nu_from_alpha(int n, double alpha);
/// Predicted curvature-decay exponent (nu - 2)(n - 1)/(n - 3).
double decay_prediction(int n, double nu);

/// 4/(n c(n)); c(n) is a caller-supplied constant, never fixed here.
double flatness_threshold(int n, double c_n);

/// Weight exponents for the beta-family: the left measure carries
/// rho^{(n beta - 2)/(n - 2)}, the right measure rho^beta, both on top of
/// the volume weight. beta = 0 is the plain weighted Sobolev pair,
/// beta = 1 weights both sides by rho.
struct WeightSpec {
  int n = 3;
  double beta = 0.0;

  double left_exponent() const { return (n * beta - 2.0) / (n - 2.0); }
  double right_exponent() const { return beta; }
};

/// Hypothesis check beta > -(nu - 2)/(n - nu) against a fitted growth
/// exponent; vacuous when nu >= n.
bool beta_hypothesis_holds(const WeightSpec& spec, const GrowthFit& fit);

struct WeightPair {
  WeightBuilder lambda;
  WeightBuilder mu;
};

/// Builders multiplying the space's volume weight (its mu measure) by
/// rho(r)^{left} and rho(r)^{right}; rho is interpolated from the profile.
WeightPair mu_rho_weights(const RadialProfile& profile, const WeightSpec& spec);

/// Same from per-point rho values (index-aligned with the space).
WeightPair mu_rho_weights(std::vector<double> rho_at_point,
                          const WeightSpec& spec);

/// Hardy pair: lambda = r^{-p} vol (zero at the base point), mu = vol.
WeightPair hardy_weights(double p);

struct WitnessReport {
  double bound = 0.0;
  std::vector<double> witness;
  Method method = Method::Multistart;
  std::uint64_t seed = 0;

  std::string to_json_string(const std::string& witness_file) const;
};

void write_witness_csv(std::ostream& out, const std::vector<double>& witness);

/// Lower bound on the weighted Sobolev invariant
///   sup (sum |f|^q lambda)^{2/q} / sum |df|^2 mu,   q = 2n/(n-2),
/// over functions vanishing at the outermost radius, from multistart ascent
/// seeded with bubble-shaped radial profiles.
WitnessReport estimate_sobolev_witness(const FiniteMetricMeasureSpace& space,
                                       const std::vector<double>& lambda,
                                       const std::vector<double>& mu, int n,
                                       std::uint64_t seed = 0,
                                       int threads = 1);

/// Lower bound on the Hardy invariant
///   sup sum |f|^p r^{-p} mu / sum |df|^p mu
/// over functions vanishing at the outermost radius. For p = 1 the radial
/// indicator family is scanned exhaustively (extremal by layer cake).
WitnessReport estimate_hardy_witness(const FiniteMetricMeasureSpace& space,
                                     double p, std::uint64_t seed = 0,
                                     int threads = 1);

/// Certified upper bound on the grounded Sobolev quotient via single-path
/// Cauchy-Schwarz: S_hat = (sum_x lambda_x L_x^{q/2})^{2/q} with L_x the
/// least path resistance from x to a ground.
double sobolev_path_upper_bound(const FiniteMetricMeasureSpace& space,
                                const std::vector<double>& lambda,
                                const std::vector<double>& mu, int n,
                                const std::vector<PointId>& grounds);

enum class PositivityVerdict { FormPositive, Inconclusive };

struct SchrodingerCheck {
  double nv = 0.0;         // (sum |V_-|^{n/2} rho vol)^{2/n}
  double s = 0.0;          // Sobolev constant supplied
  double m = 2.0;          // exponent of the vanishing threshold
  double threshold = 1.0;  // epsilon(m)
  double min_eigenvalue = 0.0;
  PositivityVerdict verdict = PositivityVerdict::Inconclusive;

  std::string to_json_string() const;
};

/// Quadratic-form positivity for Delta + V with V_- the negative part:
/// when S NV < epsilon(m), the minimum of sum |df|^2 mu - sum V_- f^2 vol
/// over unit-norm f vanishing on the outermost radius must be >= -1e-8.
SchrodingerCheck schrodinger_positivity(const FiniteMetricMeasureSpace& space,
                                        const std::vector<double>& potential_minus,
                                        double S, int n,
                                        const std::vector<double>& rho_at_point,
                                        double m = 2.0);

}  // namespace sobocert
