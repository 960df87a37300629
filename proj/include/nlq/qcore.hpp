#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

namespace nlq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Tolerances: construction-time validation vs. post-evolution drift.
inline constexpr double kConstructTol = 1e-12;
inline constexpr double kDriftTol = 1e-10;

/// Pure state: unit-norm complex amplitude vector (ħ = 1 throughout).
class StateVector {
 public:
  explicit StateVector(Vector amplitudes);
  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }

 private:
  Vector amps_;
};

/// Hermitian, positive, unit-trace matrix. Validated on construction;
/// eigenvalues in [-1e-10, 0) are tolerated (round-off) and clipped where
/// a spectrum is actually needed.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix elements);
  static DensityMatrix pure(const StateVector& psi);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& elements() const { return m_; }

 private:
  Matrix m_;
};

/// Hermitian idempotent matrix.
class Projector {
 public:
  explicit Projector(Matrix elements);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& elements() const { return m_; }

 private:
  Matrix m_;
};

/// Triple of spin mean values (⟨Σ1⟩, ⟨Σ2⟩, ⟨Σ3⟩). Length ≤ 1, pure iff = 1.
struct BlochVector {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double norm() const;
};

/// Probability weight p in [0, 1].
class MixtureWeight {
 public:
  explicit MixtureWeight(double p);
  double value() const { return p_; }

 private:
  double p_;
};

const Matrix& sigma1();
const Matrix& sigma2();
const Matrix& sigma3();

/// Tr[ρ²].
double purity(const DensityMatrix& rho);

/// −Σ λ ln λ over the spectrum, with 0·ln 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);

/// |⟨ψ|φ⟩|².
double overlap_sq(const StateVector& psi, const StateVector& phi);

/// p ρ1 + (1−p) ρ2.
DensityMatrix mixture(const DensityMatrix& rho1, const DensityMatrix& rho2,
                      MixtureWeight p);

/// Spectral decomposition ρ = Σ p_j |ψ_j⟩⟨ψ_j| with positive weights in
/// non-increasing order. Zero eigenvalues are dropped.
std::vector<std::pair<double, StateVector>> spectral_decompose(
    const DensityMatrix& rho);

/// ρ = (I + s·Σ)/2 for a qubit.
DensityMatrix bloch_to_density(const BlochVector& s);
BlochVector density_to_bloch(const DensityMatrix& rho);

/// Tr[O ρ] for Hermitian O.
double expectation(const Matrix& observable, const DensityMatrix& rho);

/// Half the sum of |eigenvalues| of ρ1 − ρ2.
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

}  // namespace nlq
