#include "nlq/weinberg.hpp"

#include <cmath>
#include <stdexcept>

namespace nlq {

namespace {

void require_valid(const BlochVector& s) {
  if (!std::isfinite(s.s1) || !std::isfinite(s.s2) || !std::isfinite(s.s3)) {
    throw std::invalid_argument("BlochVector: non-finite component");
  }
  if (s.norm() > 1.0 + kConstructTol) {
    throw std::invalid_argument("BlochVector: norm exceeds 1");
  }
}

struct Rates {
  double d1, d2, d3;
};

Rates rhs(double eps, const BlochVector& s) {
  return {-2.0 * eps * s.s3 * s.s2, 2.0 * eps * s.s3 * s.s1, 0.0};
}

}  // namespace

Matrix hamiltonian_of_state(const WeinbergParams& params,
                            const BlochVector& s) {
  require_valid(s);
  return params.epsilon * s.s3 * sigma3();
}

BlochVector closed_form(const WeinbergParams& params, const BlochVector& s0,
                        double t) {
  require_valid(s0);
  double angle = 2.0 * params.epsilon * s0.s3 * t;
  double c = std::cos(angle);
  double sn = std::sin(angle);
  return BlochVector{s0.s1 * c - s0.s2 * sn, s0.s2 * c + s0.s1 * sn, s0.s3};
}

SpinTrajectory evolve_numeric(const WeinbergParams& params,
                              const BlochVector& s0, double t_final,
                              double dt) {
  if (dt <= 0.0) throw std::invalid_argument("evolve_numeric: dt must be > 0");
  if (t_final < 0.0) {
    throw std::invalid_argument("evolve_numeric: t_final must be >= 0");
  }
  require_valid(s0);

  SpinTrajectory traj;
  double t = 0.0;
  BlochVector s = s0;
  traj.times.push_back(t);
  traj.states.push_back(s);

  double eps = params.epsilon;
  auto rk4 = [&](const BlochVector& y, double h) {
    Rates k1 = rhs(eps, y);
    Rates k2 = rhs(eps, {y.s1 + 0.5 * h * k1.d1, y.s2 + 0.5 * h * k1.d2,
                         y.s3 + 0.5 * h * k1.d3});
    Rates k3 = rhs(eps, {y.s1 + 0.5 * h * k2.d1, y.s2 + 0.5 * h * k2.d2,
                         y.s3 + 0.5 * h * k2.d3});
    Rates k4 = rhs(eps, {y.s1 + h * k3.d1, y.s2 + h * k3.d2, y.s3 + h * k3.d3});
    return BlochVector{
        y.s1 + h / 6.0 * (k1.d1 + 2 * k2.d1 + 2 * k3.d1 + k4.d1),
        y.s2 + h / 6.0 * (k1.d2 + 2 * k2.d2 + 2 * k3.d2 + k4.d2),
        y.s3 + h / 6.0 * (k1.d3 + 2 * k2.d3 + 2 * k3.d3 + k4.d3)};
  };

  long long n = static_cast<long long>(std::floor(t_final / dt + 0.5));
  for (long long i = 0; i < n; ++i) {
    s = rk4(s, dt);
    t = (i + 1) * dt;
    traj.times.push_back(t);
    traj.states.push_back(s);
  }
  double rem = t_final - t;
  if (rem > 1e-12) {
    s = rk4(s, rem);
    traj.times.push_back(t_final);
    traj.states.push_back(s);
  }
  return traj;
}

DensityMatrix weinberg_density_map(const WeinbergParams& params,
                                   const DensityMatrix& rho, double t) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("weinberg_density_map: qubit expected");
  }
  return bloch_to_density(closed_form(params, density_to_bloch(rho), t));
}

double default_spin_dt(double epsilon) {
  double e = std::abs(epsilon);
  return e > 0.0 ? 1e-3 / e : 1e-3;
}

}  // namespace nlq
