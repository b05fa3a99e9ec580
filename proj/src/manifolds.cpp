#include "sobocert/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace sobocert {

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int m) {
  return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

const char* profile_kind_name(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Euclidean: return "euclidean";
    case ProfileKind::Cone: return "cone";
    case ProfileKind::PowerLaw: return "powerlaw";
    case ProfileKind::Schwarzschild: return "schwarzschild";
  }
  return "unknown";
}

namespace {

constexpr int kNodesPerDecade = 64;

std::vector<double> geometric_grid(double r_min, double r_max) {
  std::vector<double> grid{0.0};
  const double ratio = std::pow(10.0, 1.0 / kNodesPerDecade);
  double r = r_min;
  while (r < r_max * (1.0 - 1e-12)) {
    grid.push_back(r);
    r *= ratio;
  }
  grid.push_back(r_max);
  return grid;
}

}  // namespace

double RadialProfile::first_integral_residual(std::size_t node) const {
  if (kind != ProfileKind::Schwarzschild) return 0.0;
  const double g = g_values[node];
  const double w = g_prime[node];
  return std::abs(w * w + std::pow(gamma_core / g, n - 3) - 1.0);
}

double RadialProfile::max_first_integral_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, first_integral_residual(i));
  }
  return worst;
}

RadialProfile make_euclidean_profile(int n, double r_max) {
  if (n < 3) throw Error(ErrorCode::DimensionTooLow, "need n >= 3");
  RadialProfile profile;
  profile.n = n;
  profile.kind = ProfileKind::Euclidean;
  profile.grid = geometric_grid(1e-6 * r_max, r_max);
  const double omega = unit_ball_volume(n);
  for (double r : profile.grid) {
    profile.g_values.push_back(r);
    profile.g_prime.push_back(1.0);
    profile.f_values.push_back(0.0);
    profile.volume.push_back(omega * std::pow(r, n));
  }
  return profile;
}

RadialProfile make_cone_profile(int n, double slope, double r_max) {
  if (n < 3) throw Error(ErrorCode::DimensionTooLow, "need n >= 3");
  if (!(slope > 0.0)) throw Error(ErrorCode::InvalidArgument, "slope > 0");
  RadialProfile profile;
  profile.n = n;
  profile.kind = ProfileKind::Cone;
  profile.cone_slope = slope;
  profile.grid = geometric_grid(1e-6, r_max);
  const double omega = unit_ball_volume(n);
  const double factor = std::pow(slope, n - 1) * omega;
  for (double r : profile.grid) {
    profile.g_values.push_back(slope * r);
    profile.g_prime.push_back(slope);
    profile.f_values.push_back(0.0);
    profile.volume.push_back(factor * std::pow(r, n));
  }
  return profile;
}

RadialProfile make_powerlaw_profile(int n, double nu, double r_max) {
  if (n < 3) throw Error(ErrorCode::DimensionTooLow, "need n >= 3");
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu > 0");
  RadialProfile profile;
  profile.n = n;
  profile.kind = ProfileKind::PowerLaw;
  profile.power_nu = nu;
  profile.grid = geometric_grid(1e-6, r_max);
  for (double r : profile.grid) {
    profile.g_values.push_back(0.0);
    profile.g_prime.push_back(0.0);
    profile.f_values.push_back(0.0);
    profile.volume.push_back(std::pow(r, nu));
  }
  return profile;
}

namespace {

struct OdeState {
  double g;
  double w;  // G'
};

/// Right-hand side of the second-order system.
double g_second(int n, double gamma, double g) {
  return 0.5 * (n - 3) * std::pow(gamma, n - 3) / std::pow(g, n - 2);
}

OdeState rk4_step(int n, double gamma, const OdeState& y, double h) {
  auto f = [&](const OdeState& s) {
    return OdeState{s.w, g_second(n, gamma, s.g)};
  };
  const OdeState k1 = f(y);
  const OdeState k2 = f({y.g + 0.5 * h * k1.g, y.w + 0.5 * h * k1.w});
  const OdeState k3 = f({y.g + 0.5 * h * k2.g, y.w + 0.5 * h * k2.w});
  const OdeState k4 = f({y.g + h * k3.g, y.w + h * k3.w});
  return {y.g + h / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g),
          y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

double first_integral(int n, double gamma, const OdeState& s) {
  return s.w * s.w + std::pow(gamma / s.g, n - 3) - 1.0;
}

}  // namespace

RadialProfile schwarzschild_solve(int n, double gamma_core, double r_max) {
  if (n < 4) {
    throw Error(ErrorCode::DimensionTooLow,
                "the warped family needs n >= 4 (the exponent vanishes at 3)");
  }
  if (!(gamma_core > 0.0) || !(r_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma_core and r_max must be > 0");
  }
  RadialProfile profile;
  profile.n = n;
  profile.kind = ProfileKind::Schwarzschild;
  profile.gamma_core = gamma_core;

  const double r_series = 1e-3 * gamma_core;
  profile.grid = geometric_grid(r_series, r_max);

  const double gamma = gamma_core;
  const double f_scale = 2.0 * gamma / (n - 3);
  const double sigma = unit_sphere_area(n - 2);
  const double vol_scale = 2.0 * M_PI * sigma;

  // Series start: G = gamma (1 + a x^2 + b x^4), x = r/gamma.
  const double a = 0.25 * (n - 3);
  const double b = -(n - 3.0) * (n - 3.0) * (n - 2.0) / 96.0;
  auto series_g = [&](double r) {
    const double x = r / gamma;
    return gamma * (1.0 + a * x * x + b * x * x * x * x);
  };
  auto series_w = [&](double r) {
    const double x = r / gamma;
    return 2.0 * a * x + 4.0 * b * x * x * x;
  };

  const std::size_t node_count = profile.grid.size();
  profile.g_values.resize(node_count);
  profile.g_prime.resize(node_count);
  profile.f_values.resize(node_count);
  profile.volume.resize(node_count);

  profile.g_values[0] = gamma;
  profile.g_prime[0] = 0.0;
  profile.f_values[0] = 0.0;
  profile.volume[0] = 0.0;

  OdeState state{series_g(r_series), series_w(r_series)};
  profile.g_values[1] = state.g;
  profile.g_prime[1] = state.w;
  profile.f_values[1] = f_scale * state.w;
  // Volume over the series region from the leading behavior
  // F ~ r, G ~ gamma: integrand ~ vol_scale * r * gamma^{n-2}.
  profile.volume[1] =
      vol_scale * std::pow(gamma, n - 2) * 0.5 * r_series * r_series;

  const double tolerance = 1e-13;
  for (std::size_t node = 2; node < node_count; ++node) {
    const double r0 = profile.grid[node - 1];
    const double r1 = profile.grid[node];
    int substeps = 4;
    OdeState end_state{};
    double segment_volume = 0.0;
    while (true) {
      OdeState current = state;
      const double h = (r1 - r0) / substeps;
      std::vector<double> integrand(substeps + 1);
      integrand[0] = f_scale * current.w * std::pow(current.g, n - 2);
      for (int s = 0; s < substeps; ++s) {
        current = rk4_step(n, gamma, current, h);
        integrand[s + 1] = f_scale * current.w * std::pow(current.g, n - 2);
      }
      const double drift = std::abs(first_integral(n, gamma, current) -
                                    first_integral(n, gamma, state));
      if (drift <= tolerance || substeps >= (1 << 20)) {
        if (substeps >= (1 << 20)) {
          throw Error(ErrorCode::StepFailure,
                      "substep doubling exhausted at r = " + std::to_string(r1));
        }
        // Composite Simpson over the uniform substeps (count is even).
        double sum = integrand[0] + integrand[substeps];
        for (int s = 1; s < substeps; ++s) {
          sum += integrand[s] * (s % 2 == 1 ? 4.0 : 2.0);
        }
        segment_volume = vol_scale * sum * h / 3.0;
        end_state = current;
        break;
      }
      substeps *= 2;
    }
    state = end_state;
    profile.g_values[node] = state.g;
    profile.g_prime[node] = state.w;
    profile.f_values[node] = f_scale * state.w;
    profile.volume[node] = profile.volume[node - 1] + segment_volume;
  }
  return profile;
}

RadialField volume_function(const RadialProfile& profile) {
  RadialField field;
  field.r = profile.grid;
  field.value = profile.volume;
  return field;
}

RhoResult rho_function(const RadialProfile& profile) {
  RhoResult result;
  result.rho.r = profile.grid;
  result.rho.value.resize(profile.grid.size());
  const int n = profile.n;
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    const double t = profile.grid[i];
    if (t == 0.0) {
      switch (profile.kind) {
        case ProfileKind::Euclidean:
          result.rho.value[i] = 1.0 / unit_ball_volume(n);
          break;
        case ProfileKind::Cone:
          result.rho.value[i] =
              1.0 / (std::pow(profile.cone_slope, n - 1) * unit_ball_volume(n));
          break;
        case ProfileKind::PowerLaw:
          result.rho.value[i] = profile.power_nu == n ? 1.0 : 0.0;
          break;
        case ProfileKind::Schwarzschild:
          result.rho.value[i] = 0.0;  // t^n / V ~ t^{n-2} near the core
          break;
      }
    } else {
      result.rho.value[i] = std::pow(t, n) / profile.volume[i];
    }
  }
  for (std::size_t i = 0; i + 1 < result.rho.value.size(); ++i) {
    const double here = result.rho.value[i];
    const double next = result.rho.value[i + 1];
    if (here > 0.0 && next < here) {
      const double drop = (here - next) / here;
      result.worst_drop = std::max(result.worst_drop, drop);
    }
  }
  result.monotone = result.worst_drop <= 1e-12;
  return result;
}

namespace {

std::vector<std::size_t> window_nodes(const RadialField& field, double lo,
                                      double hi) {
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < field.r.size(); ++i) {
    if (field.r[i] >= lo && field.r[i] <= hi && field.r[i] > 0.0) {
      nodes.push_back(i);
    }
  }
  return nodes;
}

}  // namespace

GrowthFit inverse_doubling_fit(const RadialField& volume, double window_lo,
                               double window_hi) {
  const auto nodes = window_nodes(volume, window_lo, window_hi);
  if (nodes.size() < 2) {
    throw Error(ErrorCode::WindowEmpty, "need at least two window nodes");
  }
  GrowthFit fit;
  fit.nu = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double slope =
          std::log(volume.value[nodes[b]] / volume.value[nodes[a]]) /
          std::log(volume.r[nodes[b]] / volume.r[nodes[a]]);
      fit.nu = std::min(fit.nu, slope);
    }
  }
  fit.c_o = volume_constant_for_nu(volume, window_lo, window_hi, fit.nu);
  fit.a_o = std::numeric_limits<double>::infinity();
  fit.b_o = 0.0;
  double log_sum = 0.0;
  for (std::size_t idx : nodes) {
    const double ratio = volume.value[idx] / std::pow(volume.r[idx], fit.nu);
    fit.a_o = std::min(fit.a_o, ratio);
    fit.b_o = std::max(fit.b_o, ratio);
    log_sum += std::log(ratio);
  }
  const double center = std::exp(log_sum / nodes.size());
  for (std::size_t idx : nodes) {
    const double ratio = volume.value[idx] / std::pow(volume.r[idx], fit.nu);
    fit.residual = std::max(fit.residual, std::abs(std::log(ratio / center)));
  }
  return fit;
}

double volume_constant_for_nu(const RadialField& volume, double window_lo,
                              double window_hi, double nu) {
  const auto nodes = window_nodes(volume, window_lo, window_hi);
  if (nodes.size() < 2) {
    throw Error(ErrorCode::WindowEmpty, "need at least two window nodes");
  }
  double c_o = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double ratio = volume.value[nodes[b]] / volume.value[nodes[a]];
      const double scale =
          std::pow(volume.r[nodes[a]] / volume.r[nodes[b]], nu);
      c_o = std::min(c_o, ratio * scale);
    }
  }
  return c_o;
}

CurvatureField curvature_field(const RadialProfile& profile) {
  CurvatureField field;
  field.riemann_norm.r = profile.grid;
  field.ricci_residual.r = profile.grid;
  const std::size_t count = profile.grid.size();
  field.riemann_norm.value.assign(count, 0.0);
  field.ricci_residual.value.assign(count, 0.0);
  const int n = profile.n;

  switch (profile.kind) {
    case ProfileKind::Euclidean:
      return field;  // flat
    case ProfileKind::PowerLaw:
      throw Error(ErrorCode::KindUnsupported,
                  "synthetic volume profiles carry no metric");
    case ProfileKind::Cone: {
      // Singly warped over S^{n-1}: only the sphere-sphere planes curve.
      const double c2 = profile.cone_slope * profile.cone_slope;
      const double planes = 0.5 * (n - 1) * (n - 2);
      for (std::size_t i = 0; i < count; ++i) {
        const double r = profile.grid[i];
        if (r == 0.0) continue;
        const double k4 = (1.0 - c2) / (c2 * r * r);
        field.riemann_norm.value[i] = std::sqrt(4.0 * planes * k4 * k4);
        field.ricci_residual.value[i] = std::abs((n - 2) * k4);
      }
      return field;
    }
    case ProfileKind::Schwarzschild:
      break;
  }

  const double gamma = profile.gamma_core;
  const double gpow = std::pow(gamma, n - 3);
  for (std::size_t i = 0; i < count; ++i) {
    const double g = profile.g_values[i];
    const double w = profile.g_prime[i];
    // Sectional curvatures; F = c G' makes the (r,t) and (t,sigma) planes
    // expressible through G alone, which keeps them regular at r = 0.
    const double k2 = -0.5 * (n - 3) * gpow / std::pow(g, n - 1);
    const double k1 = -(n - 2) * k2;
    const double k3 = k2;
    // Far out, 1 - G'^2 cancels catastrophically while the conserved
    // quantity pins it to (gamma/G)^{n-3}; the norm uses the stable branch,
    // the Ricci residual keeps the integrated G' so it still measures the
    // solver's drift.
    const double k4_honest = (1.0 - w * w) / (g * g);
    const double k4_stable = std::pow(gamma / g, n - 3) / (g * g);
    const double norm2 =
        4.0 * (k1 * k1 + (n - 2) * (k2 * k2 + k3 * k3) +
               0.5 * (n - 2) * (n - 3) * k4_stable * k4_stable);
    field.riemann_norm.value[i] = std::sqrt(norm2);
    const double ric_r = k1 + (n - 2) * k2;
    const double ric_t = k1 + (n - 2) * k3;
    const double ric_s = k2 + k3 + (n - 3) * k4_honest;
    field.ricci_residual.value[i] =
        std::max({std::abs(ric_r), std::abs(ric_t), std::abs(ric_s)});
  }
  return field;
}

DecayFit decay_fit(const RadialField& field, double window_lo,
                   double window_hi) {
  const auto nodes = window_nodes(field, window_lo, window_hi);
  if (nodes.size() < 2) {
    throw Error(ErrorCode::WindowEmpty, "need at least two window nodes");
  }
  for (std::size_t idx : nodes) {
    if (!(field.value[idx] > 0.0)) {
      throw Error(ErrorCode::NonPositiveField,
                  "field must be positive on the window");
    }
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(nodes.size());
  for (std::size_t idx : nodes) {
    const double x = std::log(field.r[idx]);
    const double y = std::log(field.value[idx]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  DecayFit fit;
  fit.exponent = -slope;
  for (std::size_t idx : nodes) {
    const double x = std::log(field.r[idx]);
    const double y = std::log(field.value[idx]);
    fit.residual = std::max(fit.residual, std::abs(y - (intercept + slope * x)));
  }
  return fit;
}

void export_profile_csv(std::ostream& out, const RadialProfile& profile) {
  RadialField vol = volume_function(profile);
  RhoResult rho = rho_function(profile);
  RadialField riemann;
  RadialField ricci;
  if (profile.kind == ProfileKind::PowerLaw) {
    riemann.value.assign(profile.grid.size(), 0.0);
    ricci.value.assign(profile.grid.size(), 0.0);
  } else {
    CurvatureField curvature = curvature_field(profile);
    riemann = std::move(curvature.riemann_norm);
    ricci = std::move(curvature.ricci_residual);
  }
  out << "r,F,G,V,rho,riemannNorm,ricciResidual\n";
  out.precision(17);
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    out << profile.grid[i] << "," << profile.f_values[i] << ","
        << profile.g_values[i] << "," << vol.value[i] << ","
        << rho.rho.value[i] << "," << riemann.value[i] << ","
        << ricci.value[i] << "\n";
  }
}

}  // namespace sobocert
