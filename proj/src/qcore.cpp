#include "nlq/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlq {

namespace {

constexpr double kEigNegTol = 1e-10;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) +
                                ": matrix must be square and non-empty");
  }
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

StateVector::StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) {
    throw std::invalid_argument("StateVector: dimension must be positive");
  }
  double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > kDriftTol) {
    throw std::invalid_argument("StateVector: squared norm " +
                                std::to_string(n2) + " is not 1");
  }
}

DensityMatrix::DensityMatrix(Matrix elements) : m_(std::move(elements)) {
  require_square(m_, "DensityMatrix");
  if (hermiticity_defect(m_) > kConstructTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::abs(m_.trace().real() - 1.0) > kConstructTol ||
      std::abs(m_.trace().imag()) > kConstructTol) {
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigNegTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
  double pur = m_.squaredNorm();
  if (pur > 1.0 + kConstructTol || pur <= 0.0) {
    throw std::invalid_argument("DensityMatrix: purity out of range");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const Vector& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

Projector::Projector(Matrix elements) : m_(std::move(elements)) {
  require_square(m_, "Projector");
  if (hermiticity_defect(m_) > kConstructTol) {
    throw std::invalid_argument("Projector: not Hermitian");
  }
  if ((m_ * m_ - m_).cwiseAbs().maxCoeff() > kConstructTol) {
    throw std::invalid_argument("Projector: not idempotent");
  }
}

double BlochVector::norm() const {
  return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

MixtureWeight::MixtureWeight(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("MixtureWeight: p must be in [0, 1]");
  }
}

const Matrix& sigma1() {
  static const Matrix s = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  return s;
}

const Matrix& sigma2() {
  static const Matrix s =
      (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return s;
}

const Matrix& sigma3() {
  static const Matrix s = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  return s;
}

double purity(const DensityMatrix& rho) {
  // Tr[ρ²] = ‖ρ‖_F² for Hermitian ρ.
  return rho.elements().squaredNorm();
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.elements(),
                                           Eigen::EigenvaluesOnly);
  Eigen::VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() < -kEigNegTol) {
    throw std::invalid_argument(
        "von_neumann_entropy: eigenvalue below tolerance");
  }
  // Clip round-off negatives and renormalize the spectrum.
  lam = lam.cwiseMax(0.0);
  lam /= lam.sum();
  double s = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] > 0.0) s -= lam[i] * std::log(lam[i]);
  }
  return std::max(s, 0.0);
}

double overlap_sq(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim()) {
    throw std::invalid_argument("overlap_sq: dimension mismatch");
  }
  return std::norm(psi.amplitudes().dot(phi.amplitudes()));
}

DensityMatrix mixture(const DensityMatrix& rho1, const DensityMatrix& rho2,
                      MixtureWeight p) {
  if (rho1.dim() != rho2.dim()) {
    throw std::invalid_argument("mixture: dimension mismatch");
  }
  double w = p.value();
  return DensityMatrix(w * rho1.elements() + (1.0 - w) * rho2.elements());
}

std::vector<std::pair<double, StateVector>> spectral_decompose(
    const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.elements());
  const Eigen::VectorXd& lam = es.eigenvalues();
  std::vector<std::pair<double, StateVector>> out;
  double total = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] > kConstructTol) total += lam[i];
  }
  // Eigen returns eigenvalues in increasing order; emit non-increasing.
  for (int i = static_cast<int>(lam.size()) - 1; i >= 0; --i) {
    if (lam[i] > kConstructTol) {
      out.emplace_back(lam[i] / total, StateVector(es.eigenvectors().col(i)));
    }
  }
  return out;
}

DensityMatrix bloch_to_density(const BlochVector& s) {
  if (s.norm() > 1.0 + kConstructTol) {
    throw std::invalid_argument("bloch_to_density: Bloch norm exceeds 1");
  }
  Matrix m = 0.5 * (Matrix::Identity(2, 2) + s.s1 * sigma1() +
                    s.s2 * sigma2() + s.s3 * sigma3());
  return DensityMatrix(std::move(m));
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("density_to_bloch: qubit expected");
  }
  return BlochVector{(sigma1() * rho.elements()).trace().real(),
                     (sigma2() * rho.elements()).trace().real(),
                     (sigma3() * rho.elements()).trace().real()};
}

double expectation(const Matrix& observable, const DensityMatrix& rho) {
  require_square(observable, "expectation");
  if (observable.rows() != rho.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  if (hermiticity_defect(observable) > kConstructTol) {
    throw std::invalid_argument("expectation: observable not Hermitian");
  }
  Complex v = (observable * rho.elements()).trace();
  if (std::abs(v.imag()) > kDriftTol) {
    throw std::runtime_error("expectation: imaginary residue too large");
  }
  return v.real();
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho1.elements() - rho2.elements(),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace nlq
