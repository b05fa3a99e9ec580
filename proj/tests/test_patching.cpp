#include <cmath>

#include "doctest.h"
#include "sobocert/analysis.hpp"
#include "sobocert/patching.hpp"
#include "sobocert/rng.hpp"
#include "sobocert/space.hpp"

using namespace sobocert;

namespace {

PatchInput ones_input(double p, double k) {
  PatchInput input;
  input.sc = input.sd = input.q1 = input.q2 = 1.0;
  input.p = p;
  input.k = k;
  return input;
}

/// Deterministic chain with a few points per dyadic level.
FiniteMetricMeasureSpace chain_fixture() {
  std::vector<double> radii{0.7, 1.3, 1.8, 2.5, 3.1, 3.9,
                            5.0, 6.5, 7.8, 9.5, 12.0, 15.5};
  std::vector<double> lambda(radii.size() + 1, 1.0);
  std::vector<double> mu(radii.size() + 1, 1.0);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    lambda[i] = 1.0 + 0.1 * static_cast<double>(i % 3);
    mu[i] = 1.0 + 0.05 * static_cast<double>(i % 4);
  }
  std::vector<double> radial{0.0};
  radial.insert(radial.end(), radii.begin(), radii.end());
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs;
  for (std::size_t i = 0; i + 1 < radial.size(); ++i) {
    pairs.push_back({static_cast<PointId>(i), static_cast<PointId>(i + 1),
                     1.0});
  }
  return FiniteMetricMeasureSpace(std::move(radial), std::move(lambda),
                                  std::move(mu), std::move(pairs));
}

}  // namespace

TEST_CASE("patched constants match the hand-evaluated spot values") {
  CHECK(patch_dirichlet_constant(ones_input(2.0, kOrderInf)) == 10.0);
  CHECK(patch_neumann_constant(ones_input(2.0, kOrderInf)) == 40.0);
  CHECK(patch_neumann_constant(ones_input(1.0, kOrderInf)) == 6.0);

  PatchInput conducting = ones_input(2.0, kOrderInf);
  conducting.sd = 0.0;
  CHECK(patch_dirichlet_constant(conducting) == 2.0);

  PatchInput big_k = ones_input(2.0, 1.0e9);
  const double near = patch_dirichlet_constant(big_k);
  CHECK(std::abs(near - 10.0) <= 1e-6 * 10.0);
}

TEST_CASE("the Neumann constant is exactly 2^p times the Dirichlet one") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    PatchInput input;
    input.sc = rng.next_double(0.1, 10.0);
    input.sd = rng.next_double(0.0, 10.0);
    input.q1 = rng.next_double(1.0, 30.0);
    input.q2 = rng.next_double(1.0, 30.0);
    input.p = rng.next_double(1.0, 4.0);
    input.k = trial % 2 == 0 ? kOrderInf : rng.next_double(input.p + 0.5, 20.0);
    CHECK(patch_neumann_constant(input) ==
          std::exp2(input.p) * patch_dirichlet_constant(input));
  }
}

TEST_CASE("patched constants increase in every argument") {
  SplitMix64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    PatchInput base;
    base.sc = rng.next_double(0.2, 5.0);
    base.sd = rng.next_double(0.1, 5.0);
    base.q1 = rng.next_double(1.0, 10.0);
    base.q2 = rng.next_double(1.0, 10.0);
    base.p = rng.next_double(1.0, 3.0);
    base.k = trial % 2 == 0 ? kOrderInf : rng.next_double(base.p + 1.0, 12.0);
    const double reference = patch_dirichlet_constant(base);
    for (int arg = 0; arg < 4; ++arg) {
      PatchInput bumped = base;
      (arg == 0 ? bumped.sc
                : arg == 1 ? bumped.sd : arg == 2 ? bumped.q1 : bumped.q2) *=
          1.1;
      CHECK(patch_dirichlet_constant(bumped) > reference);
    }
  }
}

TEST_CASE("mixed-order formula reduces to the single-order one") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const double p = rng.next_double(1.0, 3.0);
    const double sc = rng.next_double(0.2, 5.0);
    const double sd = rng.next_double(0.0, 5.0);
    const double q1 = rng.next_double(1.0, 10.0);
    const double q2 = rng.next_double(1.0, 10.0);
    PatchInput input;
    input.sc = sc;
    input.sd = sd;
    input.q1 = q1;
    input.q2 = q2;
    input.p = p;
    input.k = kOrderInf;
    const double direct = patch_dirichlet_constant(input);
    const double mixed =
        patch_mixed_constant(sc, sc, sd, q1, q2, p, p, kOrderInf);
    CHECK(mixed == doctest::Approx(direct).epsilon(1e-12));
  }

  CHECK(patch_mixed_constant(1, 1, 1, 1, 1, 2, 2, kOrderInf) == 10.0);
  CHECK(patch_mixed_constant(1, 1, 0, 1, 1, 2, 2, kOrderInf) == 2.0);
  CHECK_THROWS_AS(patch_mixed_constant(1, 1, 1, 1, 1, 3, 2, kOrderInf),
                  Error);
}

TEST_CASE("local Neumann constant on a two-point pair has a closed form") {
  // Two points, equal lambda; quotient ((a-b)^2/2) / ((a-b)^2 w).
  std::vector<double> radial{0.0, 1.0};
  std::vector<double> lambda{1.0, 1.0};
  std::vector<double> mu{1.0, 1.0};
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs{{0, 1, 1.0}};
  FiniteMetricMeasureSpace space(radial, lambda, mu, pairs);
  std::vector<PointId> both{0, 1};
  auto result = local_neumann_constant(space, space.lambda_weights(),
                                       space.mu_weights(), both, both, 2.0,
                                       kOrderInf);
  CHECK(result.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(result.method == Method::Eigen);
}

TEST_CASE("disconnected outer sets are rejected") {
  std::vector<double> radial{0.0, 1.0, 2.0};
  std::vector<double> w{1.0, 1.0, 1.0};
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs{{0, 1, 1.0},
                                                            {1, 2, 1.0}};
  FiniteMetricMeasureSpace space(radial, w, w, pairs);
  std::vector<PointId> outer{0, 2};  // not adjacent
  try {
    local_neumann_constant(space, space.lambda_weights(), space.mu_weights(),
                           outer, outer, 2.0, kOrderInf);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PieceDisconnected);
  }
}

TEST_CASE("certify_global on a chain is sound and exact") {
  FiniteMetricMeasureSpace space = chain_fixture();
  CertifyOptions options;
  options.kappa = 2.0;
  options.p = 2.0;
  options.k = kOrderInf;
  options.seed = 77;
  InequalityCertificate cert = certify_global(space, unit_lambda_builder(),
                                              unit_mu_builder(), options);
  CHECK(!cert.heuristic);
  CHECK(cert.constant > 0.0);
  REQUIRE(cert.cross_check.has_value());
  CHECK(cert.cross_check->method == Method::Eigen);
  CHECK(cert.cross_check->value <= cert.constant * (1.0 + 1e-9));

  const std::string json = cert.to_json_string();
  CHECK(json.find("provenance") != std::string::npos);
  CHECK(json.find("crossCheck") != std::string::npos);
  CHECK(json.find("sobolev-dirichlet") != std::string::npos);
}

TEST_CASE("certify_global with the mu_rho weight family") {
  FiniteMetricMeasureSpace space = chain_fixture();
  // Constant rho: the weighted pipeline must still produce a sound bound.
  WeightSpec spec;
  spec.n = 3;
  spec.beta = 0.0;
  std::vector<double> rho(space.point_count(), 0.3);
  WeightPair pair = mu_rho_weights(rho, spec);
  CertifyOptions options;
  options.kappa = 2.0;
  options.p = 2.0;
  options.k = 3.0;  // order n: the Sobolev (not Poincare) regime
  options.seed = 78;
  options.weight_tag = "murho(beta=0,n=3)";
  InequalityCertificate cert =
      certify_global(space, pair.lambda, pair.mu, options);
  CHECK(cert.kind == CertificateKind::SobolevDirichlet);
  CHECK(cert.constant > 0.0);
  // Order n uses a genuine L^q numerator, so locals are multistart bounds.
  CHECK(cert.heuristic);
}

TEST_CASE("certify_global stays sound on random branchy spaces") {
  SplitMix64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    // Random tree of points: each point hangs off the previous level or a
    // same-level sibling, so annuli can split into several components and
    // dead branches get merged.
    const int levels = 4 + static_cast<int>(rng.next_below(2));
    std::vector<double> radial{0.0};
    std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs;
    std::vector<std::vector<PointId>> per_level(levels + 1);
    for (int lvl = 1; lvl <= levels; ++lvl) {
      const double lo = std::pow(2.0, lvl - 1);
      const double hi = std::pow(2.0, lvl);
      const int count = 1 + static_cast<int>(rng.next_below(3));
      for (int c = 0; c < count; ++c) {
        const PointId id = static_cast<PointId>(radial.size());
        radial.push_back(rng.next_double(lo * 1.01, hi * 0.99));
        if (lvl == 1) {
          // Keep the central ball connected without the base point: chain
          // the level-1 points and spoke them to the base.
          pairs.push_back({0, id, 1.0});
          if (!per_level[1].empty()) {
            pairs.push_back({per_level[1].back(), id, 1.0});
          }
        } else if (!per_level[lvl].empty() && rng.next_below(2) == 0) {
          const auto& siblings = per_level[lvl];
          pairs.push_back({siblings[rng.next_below(siblings.size())], id, 1.0});
        } else {
          const auto& parents = per_level[lvl - 1];
          pairs.push_back({parents[rng.next_below(parents.size())], id, 1.0});
        }
        per_level[lvl].push_back(id);
      }
    }
    std::vector<double> lambda(radial.size()), mu(radial.size());
    for (auto& v : lambda) v = rng.next_double(0.5, 2.0);
    for (auto& v : mu) v = rng.next_double(0.5, 2.0);
    FiniteMetricMeasureSpace space(radial, lambda, mu, pairs);

    GoodCovering covering = build_annuli_covering(space, 2.0);
    CHECK(validate_covering(space, covering).ok());

    CertifyOptions options;
    options.kappa = 2.0;
    options.p = 2.0;
    options.k = kOrderInf;
    options.seed = rng.next_u64();
    InequalityCertificate cert = certify_global(space, unit_lambda_builder(),
                                                unit_mu_builder(), options);
    CHECK(!cert.heuristic);
    if (cert.cross_check) {
      CHECK(cert.cross_check->value <= cert.constant * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("certify_global surfaces disconnected pieces") {
  // Two arms meeting only at the base point: the ball piece minus the base
  // induces a disconnected subgraph, so its Neumann constant is infinite.
  std::vector<double> radial{0.0, 0.8, 0.9, 1.7, 1.8};
  std::vector<double> w(radial.size(), 1.0);
  std::vector<FiniteMetricMeasureSpace::NeighborPair> pairs{
      {0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 4, 1.0}};
  FiniteMetricMeasureSpace space(radial, w, w, pairs);
  CertifyOptions options;
  options.kappa = 2.0;
  try {
    certify_global(space, unit_lambda_builder(), unit_mu_builder(), options);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PieceDisconnected);
  }
}

TEST_CASE("certify_global Hardy pipeline on a chain") {
  FiniteMetricMeasureSpace space = chain_fixture();
  WeightPair pair = hardy_weights(1.0);
  CertifyOptions options;
  options.kappa = 2.0;
  options.p = 1.0;
  options.k = kOrderInf;
  options.kind = CertificateKind::Hardy;
  options.weight_tag = "hardy(p=1)";
  options.seed = 79;
  InequalityCertificate cert =
      certify_global(space, pair.lambda, pair.mu, options);
  CHECK(cert.kind == CertificateKind::Hardy);
  CHECK(!cert.heuristic);  // tree cuts and interval scans are exact here
  REQUIRE(cert.cross_check.has_value());
  CHECK(cert.cross_check->value <= cert.constant * (1.0 + 1e-9));
}
