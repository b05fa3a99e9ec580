#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sobocert/errors.hpp"

namespace sobocert {

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);
/// Area of the unit m-sphere (in R^{m+1}).
double unit_sphere_area(int m);

enum class ProfileKind { Euclidean, Cone, PowerLaw, Schwarzschild };

const char* profile_kind_name(ProfileKind kind);

/// Radial model geometry on a graded grid. For the doubly-warped family
/// g = dr^2 + F^2 dt^2 + G^2 dsigma^2 the samples hold the integrated G,
/// its derivative, and F from the closed form; the conserved quantity
/// G'^2 + (gamma/G)^{n-3} = 1 measures integration accuracy at every node.
struct RadialProfile {
  int n = 3;
  ProfileKind kind = ProfileKind::Euclidean;
  double cone_slope = 1.0;
  double power_nu = 0.0;
  double gamma_core = 1.0;

  std::vector<double> grid;  // strictly increasing, grid[0] == 0
  std::vector<double> g_values;
  std::vector<double> g_prime;
  std::vector<double> f_values;
  std::vector<double> volume;  // filled by the solver / closed forms

  double first_integral_residual(std::size_t node) const;
  double max_first_integral_residual() const;
};

RadialProfile make_euclidean_profile(int n, double r_max);
RadialProfile make_cone_profile(int n, double slope, double r_max);
RadialProfile make_powerlaw_profile(int n, double nu, double r_max);

/// Integrates G'' = ((n-3)/2) gamma^{n-3} / G^{n-2} from the series start
/// G = gamma (1 + (n-3)/4 x^2 + O(x^4)), x = r/gamma, with substep doubling
/// until the first integral holds to tolerance at every node, then fills
/// F = (2 gamma / (n-3)) G' and the volume by quadrature along the way.
RadialProfile schwarzschild_solve(int n, double gamma_core, double r_max);

struct RadialField {
  std::vector<double> r;
  std::vector<double> value;
};

/// V(o,t) sampled on the profile grid.
RadialField volume_function(const RadialProfile& profile);

struct RhoResult {
  RadialField rho;  // t^n / V(t), with the limit value at t = 0
  bool monotone = true;
  double worst_drop = 0.0;  // largest relative decrease observed
};

RhoResult rho_function(const RadialProfile& profile);

struct GrowthFit {
  double nu = 0.0;
  double c_o = 1.0;
  double a_o = 0.0;
  double b_o = 0.0;
  double residual = 0.0;
};

/// nu = min over node pairs of log(V2/V1)/log(t2/t1) inside the window
/// (and C_o = 1 at that nu); A_o, B_o bound V(t)/t^nu on the window.
GrowthFit inverse_doubling_fit(const RadialField& volume, double window_lo,
                               double window_hi);

/// For a fixed target exponent: C_o = min over pairs of (V2/V1)(t1/t2)^nu.
double volume_constant_for_nu(const RadialField& volume, double window_lo,
                              double window_hi, double nu);

struct CurvatureField {
  RadialField riemann_norm;
  RadialField ricci_residual;
};

/// Sectional curvatures of the warped metric assembled into |R| with
/// multiplicities, plus the Ricci diagonal residual (zero for an exact
/// solution of the Ricci-flat system).
CurvatureField curvature_field(const RadialProfile& profile);

struct DecayFit {
  double exponent = 0.0;  // b in field ~ r^{-b}
  double residual = 0.0;  // max log deviation from the fit
};

/// Least-squares slope of log(field) against log(r) over window nodes.
DecayFit decay_fit(const RadialField& field, double window_lo,
                   double window_hi);

/// CSV columns: r,F,G,V,rho,riemannNorm,ricciResidual.
void export_profile_csv(std::ostream& out, const RadialProfile& profile);

}  // namespace sobocert
