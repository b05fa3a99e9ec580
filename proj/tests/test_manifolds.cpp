#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sobocert/analysis.hpp"
#include "sobocert/manifolds.hpp"

using namespace sobocert;

TEST_CASE("warped family endpoints and asymptotes") {
  RadialProfile profile = schwarzschild_solve(4, 1.0, 1.0e4);
  CHECK(profile.g_values.front() == 1.0);
  CHECK(profile.f_values.front() == 0.0);
  // F increases to 2 gamma/(n-3) = 2 and is within 1% at r >= 1e3 gamma.
  CHECK(profile.f_values.back() == doctest::Approx(2.0).epsilon(0.01));
  for (std::size_t i = 1; i < profile.f_values.size(); ++i) {
    CHECK(profile.f_values[i] > profile.f_values[i - 1]);
    CHECK(profile.g_values[i] > profile.g_values[i - 1]);
  }
  // G ~ r at infinity.
  CHECK(profile.g_values.back() / profile.grid.back() ==
        doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("first integral is conserved to tolerance") {
  RadialProfile profile = schwarzschild_solve(5, 2.0, 1.0e4);
  CHECK(profile.max_first_integral_residual() <= 1e-10);
}

TEST_CASE("quadrature volume matches the closed form") {
  // F = (2 gamma/(n-3)) G' gives V(t) proportional to G^{n-1} - gamma^{n-1}.
  for (int n : {4, 5}) {
    RadialProfile profile = schwarzschild_solve(n, 1.0, 1.0e3);
    const double scale = 2.0 * M_PI * unit_sphere_area(n - 2) * 2.0 /
                         ((n - 3.0) * (n - 1.0));
    for (std::size_t i = profile.grid.size() / 2; i < profile.grid.size();
         i += 13) {
      const double closed =
          scale * (std::pow(profile.g_values[i], n - 1) - 1.0);
      CHECK(profile.volume[i] == doctest::Approx(closed).epsilon(1e-6));
    }
  }
}

TEST_CASE("closed-form volumes for the simple kinds") {
  RadialProfile euclid = make_euclidean_profile(3, 1.0);
  CHECK(euclid.volume.back() ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));

  RadialProfile power = make_powerlaw_profile(3, 2.5, 4.0);
  CHECK(power.volume.back() == doctest::Approx(32.0).epsilon(1e-14));
}

TEST_CASE("rho is constant for euclidean and cone profiles") {
  RadialProfile euclid = make_euclidean_profile(3, 100.0);
  RhoResult rho = rho_function(euclid);
  const double expected = 3.0 / (4.0 * M_PI);
  for (double value : rho.rho.value) {
    CHECK(value == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(rho.monotone);

  RadialProfile cone = make_cone_profile(3, 0.5, 100.0);
  RhoResult cone_rho = rho_function(cone);
  const double cone_expected = 1.0 / (0.25 * unit_ball_volume(3));
  for (std::size_t i = 1; i < cone_rho.rho.value.size(); ++i) {
    CHECK(cone_rho.rho.value[i] ==
          doctest::Approx(cone_expected).epsilon(1e-12));
  }
  CHECK(cone_rho.monotone);
}

TEST_CASE("rho grows like t^{n-nu} on synthetic profiles") {
  RadialProfile power = make_powerlaw_profile(3, 2.5, 100.0);
  RhoResult rho = rho_function(power);
  CHECK(rho.monotone);
  for (std::size_t i = 1; i < rho.rho.r.size(); i += 17) {
    const double t = rho.rho.r[i];
    CHECK(rho.rho.value[i] == doctest::Approx(std::pow(t, 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("inverse doubling fits") {
  RadialProfile power = make_powerlaw_profile(3, 2.5, 100.0);
  GrowthFit fit = inverse_doubling_fit(volume_function(power), 0.01, 100.0);
  CHECK(fit.nu == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(fit.c_o == doctest::Approx(1.0).epsilon(1e-12));

  RadialProfile euclid = make_euclidean_profile(4, 100.0);
  GrowthFit efit = inverse_doubling_fit(volume_function(euclid), 0.01, 100.0);
  CHECK(efit.nu == doctest::Approx(4.0).epsilon(1e-12));

  RadialProfile schwarz = schwarzschild_solve(4, 1.0, 1.0e4);
  GrowthFit sfit =
      inverse_doubling_fit(volume_function(schwarz), 1.0e2, 1.0e4);
  CHECK(std::abs(sfit.nu - 3.0) <= 0.05);
  CHECK(sfit.a_o <= sfit.b_o);
}

TEST_CASE("decay fits") {
  RadialField cubic;
  for (int i = 0; i <= 200; ++i) {
    const double r = std::pow(10.0, 1.0 + 3.0 * i / 200.0);
    cubic.r.push_back(r);
    cubic.value.push_back(std::pow(r, -3.0));
  }
  DecayFit fit = decay_fit(cubic, 10.0, 1.0e4);
  CHECK(fit.exponent == doctest::Approx(3.0).epsilon(1e-12));

  RadialField perturbed;
  for (int i = 0; i <= 400; ++i) {
    const double r = std::pow(10.0, 3.0 + 2.0 * i / 400.0);
    perturbed.r.push_back(r);
    perturbed.value.push_back(0.7 * std::pow(r, -2.0) * (1.0 + 1.0 / r));
  }
  DecayFit pfit = decay_fit(perturbed, 1.0e3, 1.0e5);
  CHECK(std::abs(pfit.exponent - 2.0) <= 0.01);

  RadialProfile schwarz = schwarzschild_solve(4, 1.0, 1.0e4);
  CurvatureField curvature = curvature_field(schwarz);
  DecayFit cfit = decay_fit(curvature.riemann_norm, 1.0e2, 1.0e4);
  CHECK(std::abs(cfit.exponent - 3.0) <= 0.05);
}

TEST_CASE("decay fit rejects bad windows and nonpositive fields") {
  RadialField field;
  field.r = {1.0, 2.0, 4.0};
  field.value = {1.0, 0.5, 0.25};
  CHECK_THROWS_AS(decay_fit(field, 100.0, 200.0), Error);
  field.value[1] = 0.0;
  CHECK_THROWS_AS(decay_fit(field, 1.0, 4.0), Error);
}

TEST_CASE("curvature vanishes on flat space and is supported per kind") {
  RadialProfile euclid = make_euclidean_profile(3, 10.0);
  CurvatureField flat = curvature_field(euclid);
  for (double value : flat.riemann_norm.value) CHECK(value == 0.0);

  RadialProfile power = make_powerlaw_profile(3, 2.5, 10.0);
  CHECK_THROWS_AS(curvature_field(power), Error);
}

TEST_CASE("Ricci residual of the integrated solution stays tiny") {
  for (int n : {4, 6}) {
    RadialProfile profile = schwarzschild_solve(n, 0.5, 1.0e4);
    CurvatureField curvature = curvature_field(profile);
    double worst = 0.0;
    for (double value : curvature.ricci_residual.value) {
      worst = std::max(worst, value);
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("finite differences confirm the closed-form curvature inputs") {
  RadialProfile profile = schwarzschild_solve(4, 1.0, 1.0e3);
  const int n = profile.n;
  const double gamma = profile.gamma_core;
  // Non-uniform central differences on interior nodes.
  for (std::size_t i = 40; i + 40 < profile.grid.size(); i += 60) {
    const double h1 = profile.grid[i] - profile.grid[i - 1];
    const double h2 = profile.grid[i + 1] - profile.grid[i];
    const auto& g = profile.g_values;
    const auto& f = profile.f_values;
    const double g_second_fd =
        2.0 * (h1 * g[i + 1] - (h1 + h2) * g[i] + h2 * g[i - 1]) /
        (h1 * h2 * (h1 + h2));
    const double g_second_closed =
        0.5 * (n - 3) * std::pow(gamma, n - 3) / std::pow(g[i], n - 2);
    CHECK(g_second_fd ==
          doctest::Approx(g_second_closed).epsilon(2e-3));

    const double f_second_fd =
        2.0 * (h1 * f[i + 1] - (h1 + h2) * f[i] + h2 * f[i - 1]) /
        (h1 * h2 * (h1 + h2));
    const double f_prime_fd = (f[i + 1] - f[i - 1]) / (h1 + h2);
    const double g_prime = profile.g_prime[i];
    // Sectional inputs k1 = -F''/F and k3 = -F'G'/(F G) from differences.
    const double k1_fd = -f_second_fd / f[i];
    const double k3_fd = -f_prime_fd * g_prime / (f[i] * g[i]);
    const double k1_closed = 0.5 * (n - 3) * (n - 2) * std::pow(gamma, n - 3) /
                             std::pow(g[i], n - 1);
    const double k3_closed = -g_second_closed / g[i];
    CHECK(k1_fd == doctest::Approx(k1_closed).epsilon(2e-2));
    CHECK(k3_fd == doctest::Approx(k3_closed).epsilon(2e-2));
  }
}

TEST_CASE("growth, decay and the predicted exponent agree") {
  for (int n : {4, 5, 6}) {
    RadialProfile profile = schwarzschild_solve(n, 1.0, 1.0e4);
    GrowthFit growth =
        inverse_doubling_fit(volume_function(profile), 1.0e2, 1.0e4);
    CurvatureField curvature = curvature_field(profile);
    DecayFit decay = decay_fit(curvature.riemann_norm, 1.0e2, 1.0e4);
    const double predicted = decay_prediction(n, n - 1.0);
    CHECK(predicted == static_cast<double>(n - 1));
    CHECK(std::abs(growth.nu - (n - 1.0)) <= 0.05);
    CHECK(std::abs(decay.exponent - predicted) <= 0.05);
  }
}

TEST_CASE("solver rejects low dimensions and bad steps") {
  CHECK_THROWS_AS(schwarzschild_solve(3, 1.0, 10.0), Error);
  try {
    schwarzschild_solve(3, 1.0, 10.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooLow);
  }
}

TEST_CASE("CSV export carries all columns") {
  RadialProfile profile = schwarzschild_solve(4, 1.0, 10.0);
  std::ostringstream out;
  export_profile_csv(out, profile);
  const std::string text = out.str();
  CHECK(text.rfind("r,F,G,V,rho,riemannNorm,ricciResidual", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(profile.grid.size()) + 1);
}
