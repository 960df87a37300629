#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "nlq/linearity.hpp"
#include "nlq/qcore.hpp"

namespace nlq {

/// Density matrix on S ⊗ R with basis index s·dim_R + r.
struct BipartiteState {
  int dim_S;
  int dim_R;
  Matrix matrix;
};

/// Two distinct, time-independent basis states of R.
struct EnvironmentFlags {
  int alpha_index = 0;
  int beta_index = 1;
};

/// Alice's measurement axis, unit 3-vector.
struct EprSetting {
  explicit EprSetting(Eigen::Vector3d dir);
  Eigen::Vector3d direction;
};

/// p ρ1 ⊗ |α⟩⟨α| + (1−p) ρ2 ⊗ |β⟩⟨β|.
BipartiteState make_correlated(const DensityMatrix& rho1,
                               const DensityMatrix& rho2, MixtureWeight p,
                               const EnvironmentFlags& flags, int dim_R = 2);

/// ρ ⊗ [p |α⟩⟨α| + (1−p) |β⟩⟨β|].
BipartiteState make_uncorrelated(const DensityMatrix& rho, MixtureWeight p,
                                 const EnvironmentFlags& flags, int dim_R = 2);

DensityMatrix partial_trace_env(const BipartiteState& state);
DensityMatrix partial_trace_sys(const BipartiteState& state);

struct ConditionalBranch {
  double probability = 0.0;
  std::optional<DensityMatrix> state;  // empty for a zero-probability branch
};

/// Conditional S states after a measurement on R distinguishing |α⟩, |β⟩.
std::pair<ConditionalBranch, ConditionalBranch> conditional_states(
    const BipartiteState& state, const EnvironmentFlags& flags);

/// Central finite difference of d/dt Tr_S[P ρ(t)] for the evolved mixture
/// against the weighted branch derivatives, where the branches are the
/// conditional states of the correlated bipartite construction. Zero for
/// every linear map.
double derivative_consistency_residual(const DynamicalMap& map,
                                       const DensityMatrix& rho1,
                                       const DensityMatrix& rho2,
                                       MixtureWeight p, const Projector& p_obs,
                                       double t, double dt_fd);

/// Two-qubit total-spin-zero state (|+−⟩ − |−+⟩)/√2 as a density matrix.
BipartiteState singlet();

struct EprOutcome {
  double ensemble_mean_sigma2 = 0.0;
  std::vector<double> branch_means;        // Alice +, then Alice −
  std::vector<double> branch_probabilities;
};

/// Alice measures the singlet along `setting`; Bob's conditional states are
/// evolved under `map` for time t; returns Bob's ⟨Σ2⟩ statistics.
EprOutcome epr_scenario(const EprSetting& setting, const DynamicalMap& map,
                        double t);
EprOutcome epr_scenario(const EprSetting& setting, double eps, double t);

EprSetting setting_z();
EprSetting setting_45();

/// |⟨Σ2⟩ with the 45° setting − ⟨Σ2⟩ with the z setting| after evolving
/// Bob's branches under the given dynamics.
double signaling_statistic(const DynamicalMap& map, double t);
double signaling_statistic(double eps, double t);

}  // namespace nlq
