#include "nlq/sampling.hpp"

#include <stdexcept>

namespace nlq {

Complex StateSampler::gauss() {
  std::normal_distribution<double> n(0.0, 1.0);
  double re = n(rng_);
  double im = n(rng_);
  return Complex(re, im);
}

StateVector StateSampler::random_pure(int dim) {
  if (dim < 1) throw std::invalid_argument("random_pure: dim must be >= 1");
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss();
  v.normalize();
  return StateVector(std::move(v));
}

DensityMatrix StateSampler::random_density(int dim) {
  DensityMatrix pure = DensityMatrix::pure(random_pure(dim));
  double w = random_weight();
  Matrix m = w * pure.elements() +
             (1.0 - w) * Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(std::move(m));
}

Matrix StateSampler::random_hermitian(int dim) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = gauss();
  return 0.5 * (g + g.adjoint());
}

Matrix StateSampler::random_unitary(int dim) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = gauss();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the phase ambiguity so the distribution is Haar.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

Projector StateSampler::random_projector(int dim) {
  Vector v = random_pure(dim).amplitudes();
  return Projector(v * v.adjoint());
}

double StateSampler::random_weight() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng_);
}

}  // namespace nlq
