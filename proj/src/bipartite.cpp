#include "nlq/bipartite.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/KroneckerProduct>

namespace nlq {

namespace {

constexpr double kEmptyBranchTol = 1e-14;

Matrix basis_projector(int dim, int index) {
  Matrix p = Matrix::Zero(dim, dim);
  p(index, index) = 1.0;
  return p;
}

void require_flags(const EnvironmentFlags& flags, int dim_R) {
  if (flags.alpha_index < 0 || flags.alpha_index >= dim_R ||
      flags.beta_index < 0 || flags.beta_index >= dim_R ||
      flags.alpha_index == flags.beta_index) {
    throw std::invalid_argument("EnvironmentFlags: indices invalid");
  }
}

/// n·Σ for a unit 3-vector n.
Matrix axis_operator(const Eigen::Vector3d& n) {
  return n[0] * sigma1() + n[1] * sigma2() + n[2] * sigma3();
}

}  // namespace

EprSetting::EprSetting(Eigen::Vector3d dir) : direction(std::move(dir)) {
  if (std::abs(direction.norm() - 1.0) > kConstructTol) {
    throw std::invalid_argument("EprSetting: direction must be a unit vector");
  }
}

BipartiteState make_correlated(const DensityMatrix& rho1,
                               const DensityMatrix& rho2, MixtureWeight p,
                               const EnvironmentFlags& flags, int dim_R) {
  if (rho1.dim() != rho2.dim()) {
    throw std::invalid_argument("make_correlated: dimension mismatch");
  }
  require_flags(flags, dim_R);
  Matrix m =
      p.value() * Eigen::kroneckerProduct(
                      rho1.elements(), basis_projector(dim_R, flags.alpha_index))
                      .eval() +
      (1.0 - p.value()) *
          Eigen::kroneckerProduct(rho2.elements(),
                                  basis_projector(dim_R, flags.beta_index))
              .eval();
  return BipartiteState{rho1.dim(), dim_R, std::move(m)};
}

BipartiteState make_uncorrelated(const DensityMatrix& rho, MixtureWeight p,
                                 const EnvironmentFlags& flags, int dim_R) {
  require_flags(flags, dim_R);
  Matrix env = p.value() * basis_projector(dim_R, flags.alpha_index) +
               (1.0 - p.value()) * basis_projector(dim_R, flags.beta_index);
  Matrix m = Eigen::kroneckerProduct(rho.elements(), env);
  return BipartiteState{rho.dim(), dim_R, std::move(m)};
}

DensityMatrix partial_trace_env(const BipartiteState& state) {
  Matrix out = Matrix::Zero(state.dim_S, state.dim_S);
  for (int s = 0; s < state.dim_S; ++s) {
    for (int sp = 0; sp < state.dim_S; ++sp) {
      Complex acc = 0.0;
      for (int r = 0; r < state.dim_R; ++r) {
        acc += state.matrix(s * state.dim_R + r, sp * state.dim_R + r);
      }
      out(s, sp) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix partial_trace_sys(const BipartiteState& state) {
  Matrix out = Matrix::Zero(state.dim_R, state.dim_R);
  for (int r = 0; r < state.dim_R; ++r) {
    for (int rp = 0; rp < state.dim_R; ++rp) {
      Complex acc = 0.0;
      for (int s = 0; s < state.dim_S; ++s) {
        acc += state.matrix(s * state.dim_R + r, s * state.dim_R + rp);
      }
      out(r, rp) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

std::pair<ConditionalBranch, ConditionalBranch> conditional_states(
    const BipartiteState& state, const EnvironmentFlags& flags) {
  require_flags(flags, state.dim_R);
  auto branch = [&](int r) {
    Matrix block(state.dim_S, state.dim_S);
    for (int s = 0; s < state.dim_S; ++s) {
      for (int sp = 0; sp < state.dim_S; ++sp) {
        block(s, sp) = state.matrix(s * state.dim_R + r, sp * state.dim_R + r);
      }
    }
    double prob = block.trace().real();
    ConditionalBranch out;
    out.probability = prob;
    if (prob > kEmptyBranchTol) {
      out.state = DensityMatrix(block / prob);
    }
    return out;
  };
  return {branch(flags.alpha_index), branch(flags.beta_index)};
}

double derivative_consistency_residual(const DynamicalMap& map,
                                       const DensityMatrix& rho1,
                                       const DensityMatrix& rho2,
                                       MixtureWeight p, const Projector& p_obs,
                                       double t, double dt_fd) {
  if (!(dt_fd > 0.0)) {
    throw std::invalid_argument(
        "derivative_consistency_residual: dt_fd must be > 0");
  }
  // Realize the branches as the conditional states of the correlated
  // larger-system state, and the mixture as its reduced density matrix.
  EnvironmentFlags flags{0, 1};
  BipartiteState joint = make_correlated(rho1, rho2, p, flags);
  auto [alpha, beta] = conditional_states(joint, flags);
  DensityMatrix reduced = partial_trace_env(joint);

  auto rate = [&](const DensityMatrix& rho) {
    double plus = expectation(p_obs.elements(), apply(map, rho, t + dt_fd));
    double minus = expectation(p_obs.elements(), apply(map, rho, t - dt_fd));
    return (plus - minus) / (2.0 * dt_fd);
  };
  double branch_rate = 0.0;
  if (alpha.state) branch_rate += alpha.probability * rate(*alpha.state);
  if (beta.state) branch_rate += beta.probability * rate(*beta.state);
  return std::abs(rate(reduced) - branch_rate);
}

BipartiteState singlet() {
  Vector v = Vector::Zero(4);
  // Index s·2 + r: |+−⟩ at 1, |−+⟩ at 2.
  v[1] = 1.0 / std::sqrt(2.0);
  v[2] = -1.0 / std::sqrt(2.0);
  return BipartiteState{2, 2, v * v.adjoint()};
}

EprOutcome epr_scenario(const EprSetting& setting, const DynamicalMap& map,
                        double t) {
  BipartiteState pair = singlet();
  Matrix axis = axis_operator(setting.direction);
  EprOutcome out;
  for (double sign : {+1.0, -1.0}) {
    // Alice projects her spin (the S factor) onto ±n̂.
    Matrix proj_a = 0.5 * (Matrix::Identity(2, 2) + sign * axis);
    Matrix big = Eigen::kroneckerProduct(proj_a, Matrix::Identity(2, 2));
    Matrix collapsed = big * pair.matrix * big.adjoint();
    double prob = collapsed.trace().real();
    BipartiteState post{2, 2, collapsed / prob};
    DensityMatrix bob = partial_trace_sys(post);
    DensityMatrix evolved = apply(map, bob, t);
    out.branch_probabilities.push_back(prob);
    out.branch_means.push_back(expectation(sigma2(), evolved));
  }
  out.ensemble_mean_sigma2 =
      out.branch_probabilities[0] * out.branch_means[0] +
      out.branch_probabilities[1] * out.branch_means[1];
  return out;
}

EprOutcome epr_scenario(const EprSetting& setting, double eps, double t) {
  return epr_scenario(setting, DynamicalMap(WeinbergFlow{{eps}}), t);
}

EprSetting setting_z() { return EprSetting(Eigen::Vector3d(0, 0, 1)); }

EprSetting setting_45() {
  return EprSetting(Eigen::Vector3d(1, 0, 1).normalized());
}

double signaling_statistic(const DynamicalMap& map, double t) {
  return std::abs(epr_scenario(setting_45(), map, t).ensemble_mean_sigma2 -
                  epr_scenario(setting_z(), map, t).ensemble_mean_sigma2);
}

double signaling_statistic(double eps, double t) {
  return signaling_statistic(DynamicalMap(WeinbergFlow{{eps}}), t);
}

}  // namespace nlq
