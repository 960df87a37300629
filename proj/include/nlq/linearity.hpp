#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlq/qcore.hpp"
#include "nlq/weinberg.hpp"

namespace nlq {

/// ρ → exp(−iHt) ρ exp(iHt).
struct UnitaryGenerator {
  explicit UnitaryGenerator(Matrix h);
  Matrix hamiltonian;
};

/// ρ → Weinberg flow of the Bloch vector of mean values (qubits only).
struct WeinbergFlow {
  WeinbergParams params;
};

/// ρ → Σ K ρ K†, applied once (the duration argument is ignored).
struct KrausChannel {
  explicit KrausChannel(std::vector<Matrix> ops);
  std::vector<Matrix> operators;
};

using DynamicalMap = std::variant<UnitaryGenerator, WeinbergFlow, KrausChannel>;

/// Depolarizing channel {√(1−q) I, √(q/3) Σ1, √(q/3) Σ2, √(q/3) Σ3}.
KrausChannel depolarizing_channel(double q);

int map_dim(const DynamicalMap& map);

DensityMatrix apply(const DynamicalMap& map, const DensityMatrix& rho,
                    double t);

/// Trace distance between "evolve the mixture" and "mix the evolved
/// branches". Zero for every linear map.
double mixture_linearity_residual(const DynamicalMap& map,
                                  const DensityMatrix& rho1,
                                  const DensityMatrix& rho2, MixtureWeight p,
                                  double t);

/// (Tr[ρ²] before, Tr[ρ²] after).
std::pair<double, double> purity_chain_check(const DynamicalMap& map,
                                             const DensityMatrix& rho,
                                             double t);

/// Evolves the two pure states individually, reconstructs |⟨ψ'|φ'⟩|² from
/// the purity of the half-half mixture, and returns
/// | |⟨ψ'|φ'⟩|² − |⟨ψ|φ⟩|² |. Errors out if the map does not send these
/// pure states to pure states.
double overlap_preservation_residual(const DynamicalMap& map,
                                     const StateVector& psi,
                                     const StateVector& phi, double t);

/// (entropy before, entropy after).
std::pair<double, double> entropy_monotonicity_check(const DynamicalMap& map,
                                                     const DensityMatrix& rho,
                                                     double t);

/// Central finite difference of d/dt Tr[P ρ(t)] for the evolved mixture
/// against the p-weighted branch derivatives.
double mean_value_linearity_residual(const DynamicalMap& map,
                                     const Projector& p_obs,
                                     const DensityMatrix& rho1,
                                     const DensityMatrix& rho2,
                                     MixtureWeight p, double t, double dt_fd);

struct LinearityReport {
  double mixture_residual = 0.0;       // worst case over samples
  double purity_before = 0.0;          // pair with worst |before − after|
  double purity_after = 0.0;
  double overlap_residual = 0.0;
  double entropy_change = 0.0;         // most negative (largest decrease)
  double mean_value_residual = 0.0;
  bool mixture_linear = false;
  bool purity_preserving = false;
  bool overlap_preserving = false;
  bool overlap_applicable = true;      // false when pure → mixed
  bool entropy_monotone = false;
  bool mean_value_linear = false;
  // Injectivity can only be probed by sampling, never certified.
  std::string one_to_one_evidence = "sampled evidence only";
};

/// Runs all checks over seeded random samples at evolution time t.
/// Deterministic for a fixed seed.
LinearityReport classify(const DynamicalMap& map, int sample_count,
                         std::uint64_t rng_seed, double t = 1.0);

}  // namespace nlq
