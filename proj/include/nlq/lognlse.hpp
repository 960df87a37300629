#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nlq/qcore.hpp"

namespace nlq {

/// Uniform periodic 1-D grid. n_points must be a power of two ≥ 16.
struct Grid1D {
  Grid1D(int n_points, double x_min, double x_max);
  int n_points;
  double x_min;
  double x_max;
  double dx() const { return (x_max - x_min) / n_points; }
  double length() const { return x_max - x_min; }
  Eigen::VectorXd points() const;
  /// FFT-ordered wavenumbers 2π j / L, j = 0..n/2-1, -n/2..-1.
  Eigen::VectorXd wavenumbers() const;
};

/// ψ on a grid, normalized so Σ|ψ|² dx = 1.
struct WaveField {
  Grid1D grid;
  Vector amplitudes;
};

struct LogNlseParams {
  double mass = 1.0;
  double b = 0.0;                 // log-nonlinearity strength, ≥ 0
  Eigen::VectorXd potential;      // V on the grid; empty means V = 0
  double dt = 1e-3;
  double log_floor = 1e-30;       // |ψ|² is clamped below by this in ln
};

void validate(const LogNlseParams& params);

/// Discrete L² norm Σ|ψ|² dx.
double field_norm(const WaveField& psi);

/// rms width √(⟨x²⟩ − ⟨x⟩²) under the density |ψ|² dx.
double width(const WaveField& psi);

/// Energy functional ∫ [ |∇ψ|²/(2m) + V|ψ|² − b|ψ|²(ln|ψ|² − 1) ] dx.
double energy(const LogNlseParams& params, const WaveField& psi);

/// Normalized Gaussian exp(−a(x−x0)²) with a = m·b: the non-spreading
/// soliton of the logarithmic equation (V must be zero, b > 0).
WaveField make_gausson(const LogNlseParams& params, const Grid1D& grid,
                       double center);

/// Normalized Gaussian with density standard deviation sigma0.
WaveField make_gaussian(const Grid1D& grid, double center, double sigma0);

/// One Strang split step: half phase with V − b ln|ψ|², full spectral
/// kinetic step exp(−i dt k²/(2m)), half phase with re-evaluated |ψ|².
WaveField step(const LogNlseParams& params, const WaveField& psi);

struct EvolveDiagnostics {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> widths;
  std::vector<double> energies;
};

struct EvolveResult {
  WaveField psi;
  EvolveDiagnostics diagnostics;
};

/// Repeated Strang steps to t_final; diagnostics sampled every `stride`
/// steps (always including t = 0 and the final state). Aborts if the norm
/// drifts by more than 1e-6.
EvolveResult evolve(const LogNlseParams& params, const WaveField& psi0,
                    double t_final, int stride = 10);

}  // namespace nlq
