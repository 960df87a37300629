#pragma once

#include <cstdint>
#include <random>

#include "nlq/qcore.hpp"

namespace nlq {

/// Seeded sampler for states, unitaries and projectors. Pure states are
/// normalized standard-normal complex vectors; density matrices mix a
/// random pure state with the maximally mixed state using a uniform weight.
class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed) : rng_(seed) {}

  StateVector random_pure(int dim);
  DensityMatrix random_density(int dim);
  Matrix random_hermitian(int dim);
  Matrix random_unitary(int dim);
  /// Rank-one projector |χ⟩⟨χ| onto a random pure state.
  Projector random_projector(int dim);
  double random_weight();

 private:
  Complex gauss();
  std::mt19937_64 rng_;
};

}  // namespace nlq
