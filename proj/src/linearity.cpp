#include "nlq/linearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlq/sampling.hpp"

namespace nlq {

namespace {

constexpr double kPurePreservationTol = 1e-8;

Matrix evolution_operator(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(h.rows());
  for (int i = 0; i < h.rows(); ++i) {
    phases[i] = std::polar(1.0, -es.eigenvalues()[i] * t);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

UnitaryGenerator::UnitaryGenerator(Matrix h) : hamiltonian(std::move(h)) {
  if (hamiltonian.rows() == 0 || hamiltonian.rows() != hamiltonian.cols()) {
    throw std::invalid_argument("UnitaryGenerator: square matrix expected");
  }
  if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() >
      kConstructTol) {
    throw std::invalid_argument("UnitaryGenerator: Hamiltonian not Hermitian");
  }
}

KrausChannel::KrausChannel(std::vector<Matrix> ops) : operators(std::move(ops)) {
  if (operators.empty()) {
    throw std::invalid_argument("KrausChannel: no operators");
  }
  int d = static_cast<int>(operators.front().rows());
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& k : operators) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("KrausChannel: inconsistent dimensions");
    }
    sum += k.adjoint() * k;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kDriftTol) {
    throw std::invalid_argument("KrausChannel: completeness relation violated");
  }
}

KrausChannel depolarizing_channel(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("depolarizing_channel: q must be in [0, 1]");
  }
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(1.0 - q) * Matrix::Identity(2, 2));
  ops.push_back(std::sqrt(q / 3.0) * sigma1());
  ops.push_back(std::sqrt(q / 3.0) * sigma2());
  ops.push_back(std::sqrt(q / 3.0) * sigma3());
  return KrausChannel(std::move(ops));
}

int map_dim(const DynamicalMap& map) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UnitaryGenerator>) {
          return static_cast<int>(m.hamiltonian.rows());
        } else if constexpr (std::is_same_v<T, WeinbergFlow>) {
          return 2;
        } else {
          return static_cast<int>(m.operators.front().rows());
        }
      },
      map);
}

DensityMatrix apply(const DynamicalMap& map, const DensityMatrix& rho,
                    double t) {
  if (rho.dim() != map_dim(map)) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  return std::visit(
      [&](const auto& m) -> DensityMatrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UnitaryGenerator>) {
          Matrix u = evolution_operator(m.hamiltonian, t);
          Matrix out = u * rho.elements() * u.adjoint();
          // Symmetrize away round-off before revalidation.
          return DensityMatrix(0.5 * (out + out.adjoint().eval()));
        } else if constexpr (std::is_same_v<T, WeinbergFlow>) {
          return weinberg_density_map(m.params, rho, t);
        } else {
          Matrix out = Matrix::Zero(rho.dim(), rho.dim());
          for (const Matrix& k : m.operators) {
            out += k * rho.elements() * k.adjoint();
          }
          return DensityMatrix(0.5 * (out + out.adjoint().eval()));
        }
      },
      map);
}

double mixture_linearity_residual(const DynamicalMap& map,
                                  const DensityMatrix& rho1,
                                  const DensityMatrix& rho2, MixtureWeight p,
                                  double t) {
  DensityMatrix evolved_mixture = apply(map, mixture(rho1, rho2, p), t);
  DensityMatrix branch_mixture =
      mixture(apply(map, rho1, t), apply(map, rho2, t), p);
  return trace_distance(evolved_mixture, branch_mixture);
}

std::pair<double, double> purity_chain_check(const DynamicalMap& map,
                                             const DensityMatrix& rho,
                                             double t) {
  return {purity(rho), purity(apply(map, rho, t))};
}

double overlap_preservation_residual(const DynamicalMap& map,
                                     const StateVector& psi,
                                     const StateVector& phi, double t) {
  DensityMatrix rho_psi = DensityMatrix::pure(psi);
  DensityMatrix rho_phi = DensityMatrix::pure(phi);
  DensityMatrix psi_out = apply(map, rho_psi, t);
  DensityMatrix phi_out = apply(map, rho_phi, t);
  if (purity(psi_out) < 1.0 - kPurePreservationTol ||
      purity(phi_out) < 1.0 - kPurePreservationTol) {
    throw std::invalid_argument(
        "overlap_preservation_residual: map does not preserve pure states");
  }
  MixtureWeight half(0.5);
  // Tr[ρ²] = 1/2 + 1/2 |⟨ψ|φ⟩|² for an equal mixture of two pure states.
  double before = 2.0 * purity(mixture(rho_psi, rho_phi, half)) - 1.0;
  double after = 2.0 * purity(mixture(psi_out, phi_out, half)) - 1.0;
  return std::abs(after - before);
}

std::pair<double, double> entropy_monotonicity_check(const DynamicalMap& map,
                                                     const DensityMatrix& rho,
                                                     double t) {
  return {von_neumann_entropy(rho), von_neumann_entropy(apply(map, rho, t))};
}

double mean_value_linearity_residual(const DynamicalMap& map,
                                     const Projector& p_obs,
                                     const DensityMatrix& rho1,
                                     const DensityMatrix& rho2,
                                     MixtureWeight p, double t, double dt_fd) {
  if (!(dt_fd > 0.0)) {
    throw std::invalid_argument(
        "mean_value_linearity_residual: dt_fd must be > 0");
  }
  auto rate = [&](const DensityMatrix& rho) {
    double plus = expectation(p_obs.elements(), apply(map, rho, t + dt_fd));
    double minus = expectation(p_obs.elements(), apply(map, rho, t - dt_fd));
    return (plus - minus) / (2.0 * dt_fd);
  };
  double mixture_rate = rate(mixture(rho1, rho2, p));
  double branch_rate =
      p.value() * rate(rho1) + (1.0 - p.value()) * rate(rho2);
  return std::abs(mixture_rate - branch_rate);
}

LinearityReport classify(const DynamicalMap& map, int sample_count,
                         std::uint64_t rng_seed, double t) {
  if (sample_count < 1) {
    throw std::invalid_argument("classify: sample_count must be >= 1");
  }
  StateSampler sampler(rng_seed);
  int dim = map_dim(map);
  double dt_fd = 1e-4;

  LinearityReport rep;
  double worst_purity_gap = -1.0;
  double worst_entropy_change = 0.0;

  for (int i = 0; i < sample_count; ++i) {
    DensityMatrix rho1 = sampler.random_density(dim);
    DensityMatrix rho2 = sampler.random_density(dim);
    MixtureWeight p(sampler.random_weight());
    Projector proj = sampler.random_projector(dim);

    rep.mixture_residual =
        std::max(rep.mixture_residual,
                 mixture_linearity_residual(map, rho1, rho2, p, t));

    auto [pin, pout] = purity_chain_check(map, rho1, t);
    if (std::abs(pin - pout) > worst_purity_gap) {
      worst_purity_gap = std::abs(pin - pout);
      rep.purity_before = pin;
      rep.purity_after = pout;
    }

    auto [ein, eout] = entropy_monotonicity_check(map, rho1, t);
    worst_entropy_change = std::min(worst_entropy_change, eout - ein);

    rep.mean_value_residual = std::max(
        rep.mean_value_residual,
        mean_value_linearity_residual(map, proj, rho1, rho2, p, t, dt_fd));

    if (rep.overlap_applicable) {
      try {
        rep.overlap_residual = std::max(
            rep.overlap_residual,
            overlap_preservation_residual(map, sampler.random_pure(dim),
                                          sampler.random_pure(dim), t));
      } catch (const std::invalid_argument&) {
        rep.overlap_applicable = false;
        rep.overlap_residual = 0.0;
      }
    }
  }

  rep.entropy_change = worst_entropy_change;
  rep.mixture_linear = rep.mixture_residual <= 1e-10;
  rep.purity_preserving = worst_purity_gap <= 1e-10;
  rep.overlap_preserving =
      rep.overlap_applicable && rep.overlap_residual <= 1e-9;
  rep.entropy_monotone = worst_entropy_change >= -1e-10;
  rep.mean_value_linear = rep.mean_value_residual <= 1e-8;
  return rep;
}

}  // namespace nlq
