#include "sobocert/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>

#include "json.hpp"
#include "sobocert/rng.hpp"

namespace sobocert {

double epsilon_m(double m) {
  if (!(m > 1.0)) {
    throw Error(ErrorCode::MOutOfRange, "epsilon(m) needs m > 1");
  }
  if (m >= 2.0) return 2.0 / m;
  return (2.0 / m) * (2.0 - 2.0 / m);
}

ExponentConversions exponent_conversions(int n, double nu) {
  if (n < 4) {
    throw Error(ErrorCode::DimensionTooLow,
                "refined Kato exponents need n >= 4");
  }
  ExponentConversions out;
  out.alpha = alpha_from_nu(n, nu);
  out.b2 = 2.0;
  out.b3 = decay_prediction(n, nu);
  out.gamma_kato = static_cast<double>(n - 3) / (n - 1);
  return out;
}

double alpha_from_nu(int n, double nu) {
  if (n < 3) throw Error(ErrorCode::DimensionTooLow, "need n >= 3");
  return 2.0 * (n - nu) / (n - 2.0);
}

double nu_from_alpha(int n, double alpha) {
  if (n < 3) throw Error(ErrorCode::DimensionTooLow, "need n >= 3");
  return n - 0.5 * alpha * (n - 2.0);
}

double decay_prediction(int n, double nu) {
  if (n < 4) throw Error(ErrorCode::DimensionTooLow, "need n >= 4");
  return (nu - 2.0) * (n - 1.0) / (n - 3.0);
}

double flatness_threshold(int n, double c_n) {
  if (n < 4) throw Error(ErrorCode::DimensionTooLow, "need n >= 4");
  if (!(c_n > 0.0)) throw Error(ErrorCode::InvalidArgument, "c(n) > 0");
  return 4.0 / (n * c_n);
}

bool beta_hypothesis_holds(const WeightSpec& spec, const GrowthFit& fit) {
  if (fit.nu >= spec.n) return true;
  return spec.beta > -(fit.nu - 2.0) / (spec.n - fit.nu);
}

namespace {

double interpolate_field(const RadialField& field, double r) {
  const auto& xs = field.r;
  if (r <= xs.front()) return field.value.front();
  if (r >= xs.back()) return field.value.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), r);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (r - xs[lo]) / (xs[hi] - xs[lo]);
  return field.value[lo] + t * (field.value[hi] - field.value[lo]);
}

WeightPair weights_from_rho(std::function<double(double)> rho_of_r,
                            const WeightSpec& spec) {
  const double le = spec.left_exponent();
  const double re = spec.right_exponent();
  WeightPair pair;
  pair.lambda = [rho_of_r, le](const FiniteMetricMeasureSpace& space,
                               PointId x) {
    return std::pow(rho_of_r(space.radial(x)), le) * space.mu_weight(x);
  };
  pair.mu = [rho_of_r, re](const FiniteMetricMeasureSpace& space, PointId x) {
    return std::pow(rho_of_r(space.radial(x)), re) * space.mu_weight(x);
  };
  return pair;
}

}  // namespace

WeightPair mu_rho_weights(const RadialProfile& profile,
                          const WeightSpec& spec) {
  if (profile.grid.empty()) {
    throw Error(ErrorCode::MissingRho, "profile has no grid");
  }
  RhoResult rho = rho_function(profile);
  // Interpolating through rho(0) = 0 kinds would zero the weight; clamp to
  // the first positive sample instead.
  RadialField field = rho.rho;
  for (std::size_t i = 0; i < field.value.size(); ++i) {
    if (field.value[i] <= 0.0) {
      for (std::size_t j = i; j < field.value.size(); ++j) {
        if (field.value[j] > 0.0) {
          field.value[i] = field.value[j];
          break;
        }
      }
    }
  }
  auto rho_of_r = [field](double r) { return interpolate_field(field, r); };
  return weights_from_rho(rho_of_r, spec);
}

WeightPair mu_rho_weights(std::vector<double> rho_at_point,
                          const WeightSpec& spec) {
  const double le = spec.left_exponent();
  const double re = spec.right_exponent();
  auto shared = std::make_shared<std::vector<double>>(std::move(rho_at_point));
  WeightPair pair;
  pair.lambda = [shared, le](const FiniteMetricMeasureSpace& space,
                             PointId x) {
    if (shared->size() != space.point_count()) {
      throw Error(ErrorCode::MissingRho, "rho vector size mismatch");
    }
    return std::pow((*shared)[x], le) * space.mu_weight(x);
  };
  pair.mu = [shared, re](const FiniteMetricMeasureSpace& space, PointId x) {
    if (shared->size() != space.point_count()) {
      throw Error(ErrorCode::MissingRho, "rho vector size mismatch");
    }
    return std::pow((*shared)[x], re) * space.mu_weight(x);
  };
  return pair;
}

WeightPair hardy_weights(double p) {
  WeightPair pair;
  pair.lambda = [p](const FiniteMetricMeasureSpace& space, PointId x) {
    const double r = space.radial(x);
    if (r == 0.0) return 0.0;  // the base point is the null exceptional set
    return std::pow(r, -p) * space.mu_weight(x);
  };
  pair.mu = [](const FiniteMetricMeasureSpace& space, PointId x) {
    return space.mu_weight(x);
  };
  return pair;
}

// -- witness estimators -------------------------------------------------------

namespace {

std::vector<PointId> outermost_points(const FiniteMetricMeasureSpace& space) {
  const double top = space.max_radial();
  std::vector<PointId> grounds;
  for (std::size_t x = 0; x < space.point_count(); ++x) {
    if (space.radial(static_cast<PointId>(x)) >= top * (1.0 - 1e-12)) {
      grounds.push_back(static_cast<PointId>(x));
    }
  }
  return grounds;
}

QuotientProblem weighted_problem(const FiniteMetricMeasureSpace& space,
                                 const std::vector<double>& lambda,
                                 const std::vector<double>& mu, double p,
                                 double q, double s,
                                 const std::vector<PointId>& grounds) {
  QuotientProblem prob;
  prob.n = space.point_count();
  prob.lhs_weights = lambda;
  prob.lhs_weights[space.base_point()] = 0.0;
  for (const auto& pair : space.neighbor_pairs()) {
    prob.energy.push_back(
        {pair.a, pair.b,
         std::max(mu[pair.a], mu[pair.b]) / std::pow(pair.length, p)});
  }
  prob.grounds = grounds;
  prob.q = q;
  prob.s = s;
  prob.p = p;
  return prob;
}

/// Radial sweep over balls B(R): every prefix of the radial order is an
/// indicator candidate; the cut energy is maintained incrementally.
struct SweepBest {
  double value = 0.0;
  std::vector<double> witness;
};

SweepBest radial_indicator_sweep(const FiniteMetricMeasureSpace& space,
                                 const QuotientProblem& prob) {
  const std::size_t n = space.point_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = space.radial(static_cast<PointId>(a));
    const double rb = space.radial(static_cast<PointId>(b));
    return ra != rb ? ra < rb : a < b;
  });
  std::vector<char> grounded(n, 0);
  for (PointId g : prob.grounds) grounded[g] = 1;
  std::vector<std::vector<std::pair<PointId, double>>> incident(n);
  for (const auto& e : prob.energy) {
    incident[e.a].push_back({e.b, e.w});
    incident[e.b].push_back({e.a, e.w});
  }

  std::vector<char> inside(n, 0);
  double numerator = 0.0;
  double cut = 0.0;
  SweepBest best;
  std::uint64_t best_prefix = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const PointId v = static_cast<PointId>(order[idx]);
    if (grounded[v]) break;
    inside[v] = 1;
    numerator += prob.lhs_weights[v];
    for (const auto& [w, weight] : incident[v]) {
      cut += inside[w] ? -weight : weight;
    }
    if (cut <= 0.0) continue;
    const double value = std::pow(numerator, prob.s) /
                         std::pow(cut, prob.denom_exponent);
    if (value > best.value) {
      best.value = value;
      best_prefix = idx + 1;
    }
  }
  if (best_prefix > 0) {
    best.witness.assign(n, 0.0);
    for (std::size_t idx = 0; idx < best_prefix; ++idx) {
      best.witness[order[idx]] = 1.0;
    }
  }
  return best;
}

}  // namespace

WitnessReport estimate_sobolev_witness(const FiniteMetricMeasureSpace& space,
                                       const std::vector<double>& lambda,
                                       const std::vector<double>& mu, int n,
                                       std::uint64_t seed, int threads) {
  if (!space.connected()) {
    throw Error(ErrorCode::Disconnected, "estimate_sobolev_witness");
  }
  if (n < 3) throw Error(ErrorCode::DimensionTooLow, "need n >= 3");
  const double q = 2.0 * n / (n - 2.0);
  QuotientProblem prob = weighted_problem(space, lambda, mu, 2.0, q, 2.0 / q,
                                          outermost_points(space));

  MultistartOptions options;
  options.seed = seed;
  options.threads = threads;
  // The bubble seeds below carry the search on large grids; random starts
  // mostly matter at desk scale.
  options.starts = space.point_count() > 500 ? 4 : 16;
  if (space.point_count() > 500) options.max_iterations = 2000;
  // Bubble-shaped radial seeds across a geometric range of scales.
  const double r_lo = space.min_positive_radial();
  const double r_hi = space.max_radial();
  const double exponent = -0.5 * (n - 2);
  for (int si = 0; si < 16; ++si) {
    const double scale =
        r_lo * std::pow(r_hi / r_lo, (si + 0.5) / 16.0);
    std::vector<double> f(space.point_count());
    const double tail =
        std::pow(1.0 + (r_hi / scale) * (r_hi / scale), exponent);
    for (std::size_t x = 0; x < space.point_count(); ++x) {
      const double r = space.radial(static_cast<PointId>(x));
      const double bubble = std::pow(1.0 + (r / scale) * (r / scale), exponent);
      f[x] = std::max(bubble - tail, 0.0);
    }
    options.extra_seeds.push_back(std::move(f));
  }
  QuotientResult result = maximize_quotient(prob, options);
  WitnessReport report;
  report.bound = result.value;
  report.witness = std::move(result.witness);
  report.method = Method::Multistart;
  report.seed = seed;
  return report;
}

WitnessReport estimate_hardy_witness(const FiniteMetricMeasureSpace& space,
                                     double p, std::uint64_t seed,
                                     int threads) {
  if (!space.connected()) {
    throw Error(ErrorCode::Disconnected, "estimate_hardy_witness");
  }
  if (p < 1.0) throw Error(ErrorCode::InvalidArgument, "p >= 1");
  const std::size_t n = space.point_count();
  std::vector<double> lambda(n), mu(n);
  WeightPair pair = hardy_weights(p);
  for (std::size_t x = 0; x < n; ++x) {
    lambda[x] = pair.lambda(space, static_cast<PointId>(x));
    mu[x] = pair.mu(space, static_cast<PointId>(x));
  }
  QuotientProblem prob = weighted_problem(space, lambda, mu, p, p, 1.0,
                                          outermost_points(space));

  SweepBest sweep = radial_indicator_sweep(space, prob);
  WitnessReport report;
  report.bound = sweep.value;
  report.witness = sweep.witness;
  report.method = Method::Multistart;
  report.seed = seed;

  if (p > 1.0) {
    MultistartOptions options;
    options.seed = seed;
    options.threads = threads;
    options.starts = space.point_count() > 500 ? 4 : 16;
    options.max_iterations = space.point_count() > 500 ? 2000 : 10000;
    if (!sweep.witness.empty()) options.extra_seeds.push_back(sweep.witness);
    QuotientResult ascent = maximize_quotient(prob, options);
    if (ascent.value > report.bound) {
      report.bound = ascent.value;
      report.witness = std::move(ascent.witness);
    }
  }
  return report;
}

double sobolev_path_upper_bound(const FiniteMetricMeasureSpace& space,
                                const std::vector<double>& lambda,
                                const std::vector<double>& mu, int n,
                                const std::vector<PointId>& grounds) {
  if (grounds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one ground");
  }
  const std::size_t count = space.point_count();
  // Least path resistance to a ground, with edge resistance 1/w.
  std::vector<double> resistance(count,
                                 std::numeric_limits<double>::infinity());
  using Item = std::pair<double, PointId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  for (PointId g : grounds) {
    resistance[g] = 0.0;
    queue.push({0.0, g});
  }
  std::vector<std::vector<std::pair<PointId, double>>> incident(count);
  for (const auto& pair : space.neighbor_pairs()) {
    const double w = std::max(mu[pair.a], mu[pair.b]) /
                     (pair.length * pair.length);
    incident[pair.a].push_back({pair.b, 1.0 / w});
    incident[pair.b].push_back({pair.a, 1.0 / w});
  }
  while (!queue.empty()) {
    const auto [dist, v] = queue.top();
    queue.pop();
    if (dist > resistance[v]) continue;
    for (const auto& [w, cost] : incident[v]) {
      if (resistance[v] + cost < resistance[w]) {
        resistance[w] = resistance[v] + cost;
        queue.push({resistance[w], w});
      }
    }
  }
  const double q = 2.0 * n / (n - 2.0);
  double sum = 0.0;
  for (std::size_t x = 0; x < count; ++x) {
    if (x == space.base_point()) continue;
    sum += lambda[x] * std::pow(resistance[x], 0.5 * q);
  }
  return std::pow(sum, 2.0 / q);
}

SchrodingerCheck schrodinger_positivity(
    const FiniteMetricMeasureSpace& space,
    const std::vector<double>& potential_minus, double S, int n,
    const std::vector<double>& rho_at_point, double m) {
  if (!(S > 0.0) || !std::isfinite(S)) {
    throw Error(ErrorCode::InvalidS, "S must be a positive finite constant");
  }
  if (rho_at_point.size() != space.point_count() ||
      potential_minus.size() != space.point_count()) {
    throw Error(ErrorCode::MissingRho, "per-point arrays must match the space");
  }
  SchrodingerCheck check;
  check.s = S;
  check.m = m;
  check.threshold = epsilon_m(m);

  double nv_sum = 0.0;
  for (std::size_t x = 0; x < space.point_count(); ++x) {
    if (potential_minus[x] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "V_- must be nonnegative");
    }
    nv_sum += std::pow(potential_minus[x], 0.5 * n) * rho_at_point[x] *
              space.mu_weight(static_cast<PointId>(x));
  }
  check.nv = std::pow(nv_sum, 2.0 / n);

  // Quadratic form on the subspace vanishing at the outermost radius.
  const auto grounds = outermost_points(space);
  std::vector<char> grounded(space.point_count(), 0);
  for (PointId g : grounds) grounded[g] = 1;
  std::vector<int> to_free(space.point_count(), -1);
  std::vector<PointId> free_ids;
  for (std::size_t x = 0; x < space.point_count(); ++x) {
    if (!grounded[x]) {
      to_free[x] = static_cast<int>(free_ids.size());
      free_ids.push_back(static_cast<PointId>(x));
    }
  }
  const std::size_t fm = free_ids.size();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(fm, fm);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(fm, fm);
  for (const auto& pair : space.neighbor_pairs()) {
    const double w =
        std::max(space.mu_weight(pair.a), space.mu_weight(pair.b)) /
        (pair.length * pair.length);
    const int fa = to_free[pair.a];
    const int fb = to_free[pair.b];
    if (fa >= 0) Q(fa, fa) += w;
    if (fb >= 0) Q(fb, fb) += w;
    if (fa >= 0 && fb >= 0) {
      Q(fa, fb) -= w;
      Q(fb, fa) -= w;
    }
  }
  for (std::size_t j = 0; j < fm; ++j) {
    const PointId x = free_ids[j];
    const double vol = space.mu_weight(x);
    Q(j, j) -= potential_minus[x] * vol;
    M(j, j) = vol;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Q, M);
  check.min_eigenvalue = solver.eigenvalues()(0);

  const bool hypothesis = S * check.nv < check.threshold;
  check.verdict = hypothesis && check.min_eigenvalue >= -1e-8
                      ? PositivityVerdict::FormPositive
                      : PositivityVerdict::Inconclusive;
  return check;
}

// -- serialization ------------------------------------------------------------

std::string WitnessReport::to_json_string(const std::string& witness_file) const {
  nlohmann::ordered_json j;
  j["bound"] = bound;
  j["method"] = method_name(method);
  j["seed"] = seed;
  j["witnessFile"] = witness_file;
  return j.dump(2);
}

void write_witness_csv(std::ostream& out, const std::vector<double>& witness) {
  out << "point,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < witness.size(); ++i) {
    out << i << "," << witness[i] << "\n";
  }
}

std::string SchrodingerCheck::to_json_string() const {
  nlohmann::ordered_json j;
  j["nv"] = nv;
  j["s"] = s;
  j["m"] = m;
  j["threshold"] = threshold;
  j["minEigenvalue"] = min_eigenvalue;
  j["verdict"] = verdict == PositivityVerdict::FormPositive ? "form-positive"
                                                            : "inconclusive";
  return j.dump(2);
}

}  // namespace sobocert
