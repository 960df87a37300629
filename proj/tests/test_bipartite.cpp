#include <cmath>
#include <numbers>
#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "nlq/bipartite.hpp"
#include "nlq/sampling.hpp"

using namespace nlq;

namespace {

const EnvironmentFlags kFlags{0, 1};
const MixtureWeight kHalf(0.5);

}  // namespace

TEST_CASE("make_correlated: reduced state and joint probabilities") {
  StateSampler sampler(40);
  DensityMatrix r1 = sampler.random_density(2);
  DensityMatrix r2 = sampler.random_density(2);

  SUBCASE("p = 1 is the product with |alpha⟩") {
    BipartiteState s = make_correlated(r1, r2, MixtureWeight(1.0), kFlags);
    BipartiteState prod = make_uncorrelated(r1, MixtureWeight(1.0), kFlags);
    CHECK((s.matrix - prod.matrix).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("partial trace over R reproduces the mixture") {
    for (int rep = 0; rep < 50; ++rep) {
      DensityMatrix a = sampler.random_density(2);
      DensityMatrix b = sampler.random_density(2);
      MixtureWeight p(sampler.random_weight());
      BipartiteState s = make_correlated(a, b, p, kFlags);
      CHECK(trace_distance(partial_trace_env(s), mixture(a, b, p)) < 1e-12);
    }
  }

  SUBCASE("joint probability decomposes as p Tr[Pρ1] + (1-p) Tr[Pρ2]") {
    for (int rep = 0; rep < 100; ++rep) {
      DensityMatrix a = sampler.random_density(2);
      DensityMatrix b = sampler.random_density(2);
      MixtureWeight p(sampler.random_weight());
      Projector proj = sampler.random_projector(2);
      BipartiteState s = make_correlated(a, b, p, kFlags);
      Matrix big = Eigen::kroneckerProduct(proj.elements(),
                                           Matrix::Identity(2, 2));
      double joint = (big * s.matrix).trace().real();
      double split = p.value() * expectation(proj.elements(), a) +
                     (1.0 - p.value()) * expectation(proj.elements(), b);
      CHECK(std::abs(joint - split) < 1e-12);

      // Single-sector joint probability Tr[P ⊗ |α⟩⟨α| Π̄] = p Tr[Pρ1].
      Matrix alpha_proj = Matrix::Zero(2, 2);
      alpha_proj(0, 0) = 1.0;
      Matrix sector = Eigen::kroneckerProduct(proj.elements(), alpha_proj);
      CHECK(std::abs((sector * s.matrix).trace().real() -
                     p.value() * expectation(proj.elements(), a)) < 1e-12);
    }
  }

  SUBCASE("invalid flags are rejected") {
    CHECK_THROWS_AS(make_correlated(r1, r2, kHalf, EnvironmentFlags{0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_correlated(r1, r2, kHalf, EnvironmentFlags{0, 5}),
                    std::invalid_argument);
  }
}

TEST_CASE("make_uncorrelated leaves the reduced state untouched") {
  StateSampler sampler(41);
  DensityMatrix rho = sampler.random_density(2);
  MixtureWeight p(0.3);
  BipartiteState s = make_uncorrelated(rho, p, kFlags);
  CHECK(trace_distance(partial_trace_env(s), rho) < 1e-12);

  auto [alpha, beta] = conditional_states(s, kFlags);
  CHECK(alpha.probability == doctest::Approx(0.3).epsilon(1e-12));
  REQUIRE(alpha.state);
  REQUIRE(beta.state);
  CHECK(trace_distance(*alpha.state, rho) < 1e-12);
  CHECK(trace_distance(*beta.state, rho) < 1e-12);

  // Same reduced state as the correlated construction built from ρ's parts.
  DensityMatrix r1 = sampler.random_density(2);
  DensityMatrix r2 = sampler.random_density(2);
  DensityMatrix mixed = mixture(r1, r2, p);
  BipartiteState correlated = make_correlated(r1, r2, p, kFlags);
  BipartiteState uncorrelated = make_uncorrelated(mixed, p, kFlags);
  CHECK(trace_distance(partial_trace_env(correlated),
                       partial_trace_env(uncorrelated)) < 1e-12);
}

TEST_CASE("conditional_states recovers the branches") {
  StateSampler sampler(42);
  DensityMatrix r1 = sampler.random_density(2);
  DensityMatrix r2 = sampler.random_density(2);
  MixtureWeight p(0.7);
  auto [alpha, beta] = conditional_states(make_correlated(r1, r2, p, kFlags),
                                          kFlags);
  CHECK(alpha.probability == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(beta.probability == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(trace_distance(*alpha.state, r1) < 1e-12);
  CHECK(trace_distance(*beta.state, r2) < 1e-12);

  // p = 0: the alpha branch is flagged empty, no division happens.
  auto [a0, b0] = conditional_states(
      make_correlated(r1, r2, MixtureWeight(0.0), kFlags), kFlags);
  CHECK(a0.probability == doctest::Approx(0.0));
  CHECK_FALSE(a0.state);
  REQUIRE(b0.state);
  CHECK(trace_distance(*b0.state, r2) < 1e-12);
}

TEST_CASE("singlet state") {
  BipartiteState s = singlet();
  CHECK(std::abs(s.matrix.squaredNorm() - 1.0) < 1e-14);  // pure
  CHECK(trace_distance(partial_trace_env(s),
                       DensityMatrix(0.5 * Matrix::Identity(2, 2))) < 1e-12);
  CHECK(trace_distance(partial_trace_sys(s),
                       DensityMatrix(0.5 * Matrix::Identity(2, 2))) < 1e-12);

  // Perfect anticorrelation along any common axis.
  StateSampler sampler(4);
  for (int rep = 0; rep < 20; ++rep) {
    StateVector dir3 = sampler.random_pure(2);
    Eigen::Vector3d n = [&] {
      BlochVector b = density_to_bloch(DensityMatrix::pure(dir3));
      return Eigen::Vector3d(b.s1, b.s2, b.s3);
    }();
    Matrix axis = n[0] * sigma1() + n[1] * sigma2() + n[2] * sigma3();
    Matrix plus = 0.5 * (Matrix::Identity(2, 2) + axis);
    Matrix same = Eigen::kroneckerProduct(plus, plus);
    CHECK(std::abs((same * s.matrix).trace().real()) < 1e-12);
  }
}

TEST_CASE("EPR scenario reproduces the paper's two settings") {
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  SUBCASE("z setting: Bob's ⟨Σ2⟩ vanishes for all t") {
    for (double t : {0.0, 0.4, 1.0, 3.0}) {
      EprOutcome o = epr_scenario(setting_z(), 1.0, t);
      CHECK(std::abs(o.ensemble_mean_sigma2) < 1e-12);
      CHECK(o.branch_probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
  }

  SUBCASE("45° setting: every branch gives (1/√2) sin(√2 ε t)") {
    double eps = 1.0;
    for (double t : {0.0, 0.3, 1.1, 2.0}) {
      EprOutcome o = epr_scenario(setting_45(), eps, t);
      double expected = inv_sqrt2 * std::sin(std::sqrt(2.0) * eps * t);
      CHECK(o.ensemble_mean_sigma2 == doctest::Approx(expected).epsilon(1e-12));
      CHECK(o.branch_means[0] == doctest::Approx(expected).epsilon(1e-12));
      CHECK(o.branch_means[1] == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("eps = 0: both settings are silent") {
    CHECK(std::abs(epr_scenario(setting_45(), 0.0, 2.0).ensemble_mean_sigma2) <
          1e-12);
    CHECK(std::abs(epr_scenario(setting_z(), 0.0, 2.0).ensemble_mean_sigma2) <
          1e-12);
  }
}

TEST_CASE("signaling statistic") {
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  SUBCASE("peaks at 1/√2 when √2 ε t = π/2") {
    double eps = 1.0;
    double t = std::numbers::pi / (2.0 * std::sqrt(2.0));
    CHECK(signaling_statistic(eps, t) ==
          doctest::Approx(inv_sqrt2).epsilon(1e-12));
  }

  SUBCASE("zero at t = 0") { CHECK(signaling_statistic(1.0, 0.0) < 1e-14); }

  SUBCASE("analytic law (1/√2)|sin(√2 ε t)| across a sweep") {
    for (double t = 0.0; t < 3.0; t += 0.17) {
      CHECK(signaling_statistic(1.0, t) ==
            doctest::Approx(inv_sqrt2 *
                            std::abs(std::sin(std::sqrt(2.0) * t)))
                .epsilon(1e-12));
    }
  }

  SUBCASE("no signaling under linear dynamics") {
    StateSampler sampler(90);
    for (int rep = 0; rep < 20; ++rep) {
      DynamicalMap u = UnitaryGenerator(sampler.random_hermitian(2));
      CHECK(signaling_statistic(u, 1.3) < 1e-12);
    }
    CHECK(signaling_statistic(DynamicalMap(depolarizing_channel(0.2)), 1.0) <
          1e-12);
  }
}

TEST_CASE("linear maps are decomposition independent") {
  // Two decompositions of the same reduced state give identical ensemble
  // statistics after any linear map.
  StateSampler sampler(91);
  for (int rep = 0; rep < 50; ++rep) {
    DensityMatrix r1 = sampler.random_density(2);
    DensityMatrix r2 = sampler.random_density(2);
    MixtureWeight p(sampler.random_weight());
    DensityMatrix reduced = mixture(r1, r2, p);
    auto decomp = spectral_decompose(reduced);

    DynamicalMap u = UnitaryGenerator(sampler.random_hermitian(2));
    Projector obs = sampler.random_projector(2);

    double via_branches = 0.0;
    via_branches += p.value() * expectation(obs.elements(), apply(u, r1, 0.8));
    via_branches +=
        (1.0 - p.value()) * expectation(obs.elements(), apply(u, r2, 0.8));
    double via_spectrum = 0.0;
    for (const auto& [w, v] : decomp) {
      via_spectrum +=
          w * expectation(obs.elements(),
                          apply(u, DensityMatrix::pure(v), 0.8));
    }
    CHECK(std::abs(via_branches - via_spectrum) < 1e-12);
  }
}

TEST_CASE("derivative consistency") {
  DensityMatrix rx = bloch_to_density({1, 0, 0});
  DensityMatrix rz = bloch_to_density({0, 0, 1});
  Projector py(0.5 * (Matrix::Identity(2, 2) + sigma2()));
  Projector px(0.5 * (Matrix::Identity(2, 2) + sigma1()));

  SUBCASE("zero for unitary maps") {
    StateSampler sampler(92);
    for (int rep = 0; rep < 50; ++rep) {
      DynamicalMap u = UnitaryGenerator(sampler.random_hermitian(2));
      DensityMatrix a = sampler.random_density(2);
      DensityMatrix b = sampler.random_density(2);
      MixtureWeight p(sampler.random_weight());
      Projector proj = sampler.random_projector(2);
      CHECK(derivative_consistency_residual(u, a, b, p, proj, 0.0, 1e-4) <
            1e-8);
    }
  }

  SUBCASE("Weinberg witness with P = (I+Σ2)/2 has residual 1/4") {
    DynamicalMap flow = WeinbergFlow{{1.0}};
    double r =
        derivative_consistency_residual(flow, rx, rz, kHalf, py, 0.0, 1e-4);
    CHECK(r == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(r > 0.05);
  }

  SUBCASE("the Σ1 projector is blind to this witness at t = 0") {
    // All three states have ⟨Σ2⟩ = 0 at t = 0, so d⟨Σ1⟩/dt vanishes for
    // mixture and branches alike.
    DynamicalMap flow = WeinbergFlow{{1.0}};
    CHECK(derivative_consistency_residual(flow, rx, rz, kHalf, px, 0.0, 1e-4) <
          1e-8);
  }

  SUBCASE("identical branches give zero residual") {
    DynamicalMap flow = WeinbergFlow{{1.0}};
    CHECK(derivative_consistency_residual(flow, rx, rx, kHalf, py, 0.0, 1e-4) <
          1e-10);
  }
}
