#pragma once

#include <vector>

#include "nlq/qcore.hpp"

namespace nlq {

/// Nonlinearity strength of the state-dependent Hamiltonian ε⟨Σ3⟩Σ3.
struct WeinbergParams {
  double epsilon = 0.0;
};

struct SpinTrajectory {
  std::vector<double> times;
  std::vector<BlochVector> states;
};

/// H = ε⟨Σ3⟩Σ3, a 2×2 Hermitian matrix that depends on the state.
Matrix hamiltonian_of_state(const WeinbergParams& params, const BlochVector& s);

/// Exact solution: s3 constant, (s1, s2) rotated by angle 2ε·s3·t.
BlochVector closed_form(const WeinbergParams& params, const BlochVector& s0,
                        double t);

/// Fixed-step classical RK4 for the mean-value equations of motion
///   d⟨Σ1⟩/dt = −2ε⟨Σ3⟩⟨Σ2⟩,  d⟨Σ2⟩/dt = 2ε⟨Σ3⟩⟨Σ1⟩,  d⟨Σ3⟩/dt = 0.
SpinTrajectory evolve_numeric(const WeinbergParams& params,
                              const BlochVector& s0, double t_final,
                              double dt);

/// Nonlinear dynamical map on qubit density matrices: the Bloch vector of
/// mean values is run through the closed-form flow. |s| < 1 is allowed.
DensityMatrix weinberg_density_map(const WeinbergParams& params,
                                   const DensityMatrix& rho, double t);

/// Default step 1e-3/|ε| (1e-3 when ε = 0).
double default_spin_dt(double epsilon);

}  // namespace nlq
