#include "nlq/lognlse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace nlq {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::VectorXd density(const WaveField& psi) {
  return psi.amplitudes.cwiseAbs2();
}

/// Phase factor exp(−i (dt/2) [V − b ln(max(|ψ|², floor))]) applied in place.
void half_phase(const LogNlseParams& params, Vector& amps) {
  int n = static_cast<int>(amps.size());
  for (int j = 0; j < n; ++j) {
    double rho = std::norm(amps[j]);
    double v = params.potential.size() > 0 ? params.potential[j] : 0.0;
    double phase =
        -(params.dt / 2.0) *
        (v - params.b * std::log(std::max(rho, params.log_floor)));
    amps[j] *= std::polar(1.0, phase);
  }
}

struct KineticOp {
  explicit KineticOp(const LogNlseParams& params, const Grid1D& grid) {
    Eigen::VectorXd k = grid.wavenumbers();
    factor.resize(k.size());
    for (int j = 0; j < k.size(); ++j) {
      factor[j] = std::polar(1.0, -params.dt * k[j] * k[j] / (2.0 * params.mass));
    }
  }
  void apply(Eigen::FFT<double>& fft, Vector& amps) const {
    Vector spec;
    fft.fwd(spec, amps);
    spec.array() *= factor.array();
    fft.inv(amps, spec);
  }
  Vector factor;
};

void strang_step(const LogNlseParams& params, const KineticOp& kin,
                 Eigen::FFT<double>& fft, Vector& amps) {
  half_phase(params, amps);
  kin.apply(fft, amps);
  half_phase(params, amps);
  if (!amps.allFinite()) {
    throw std::runtime_error("lognlse: non-finite amplitudes after step");
  }
}

}  // namespace

Grid1D::Grid1D(int n, double x0, double x1)
    : n_points(n), x_min(x0), x_max(x1) {
  if (n < 16 || !is_power_of_two(n)) {
    throw std::invalid_argument("Grid1D: n_points must be a power of two >= 16");
  }
  if (!(x_max > x_min)) {
    throw std::invalid_argument("Grid1D: x_max must exceed x_min");
  }
}

Eigen::VectorXd Grid1D::points() const {
  Eigen::VectorXd x(n_points);
  for (int j = 0; j < n_points; ++j) x[j] = x_min + j * dx();
  return x;
}

Eigen::VectorXd Grid1D::wavenumbers() const {
  Eigen::VectorXd k(n_points);
  double base = 2.0 * std::numbers::pi / length();
  for (int j = 0; j < n_points; ++j) {
    int m = j < n_points / 2 ? j : j - n_points;
    k[j] = base * m;
  }
  return k;
}

void validate(const LogNlseParams& params) {
  if (!(params.mass > 0.0)) {
    throw std::invalid_argument("LogNlseParams: mass must be > 0");
  }
  if (params.b < 0.0) {
    throw std::invalid_argument("LogNlseParams: b must be >= 0");
  }
  if (!(params.dt > 0.0)) {
    throw std::invalid_argument("LogNlseParams: dt must be > 0");
  }
  if (!(params.log_floor > 0.0)) {
    throw std::invalid_argument("LogNlseParams: log_floor must be > 0");
  }
}

double field_norm(const WaveField& psi) {
  return psi.amplitudes.squaredNorm() * psi.grid.dx();
}

double width(const WaveField& psi) {
  Eigen::VectorXd x = psi.grid.points();
  Eigen::VectorXd rho = density(psi) * psi.grid.dx();
  double total = rho.sum();
  double mean = x.dot(rho) / total;
  double second = x.cwiseAbs2().dot(rho) / total;
  return std::sqrt(std::max(second - mean * mean, 0.0));
}

double energy(const LogNlseParams& params, const WaveField& psi) {
  Eigen::FFT<double> fft;
  Vector spec;
  Vector amps = psi.amplitudes;
  fft.fwd(spec, amps);
  Eigen::VectorXd k = psi.grid.wavenumbers();
  for (int j = 0; j < k.size(); ++j) spec[j] *= Complex(0.0, k[j]);
  Vector grad;
  fft.inv(grad, spec);

  double e = 0.0;
  for (int j = 0; j < psi.amplitudes.size(); ++j) {
    double rho = std::norm(psi.amplitudes[j]);
    double v = params.potential.size() > 0 ? params.potential[j] : 0.0;
    double lg = std::log(std::max(rho, params.log_floor));
    e += std::norm(grad[j]) / (2.0 * params.mass) + v * rho -
         params.b * rho * (lg - 1.0);
  }
  return e * psi.grid.dx();
}

WaveField make_gausson(const LogNlseParams& params, const Grid1D& grid,
                       double center) {
  validate(params);
  if (!(params.b > 0.0)) {
    throw std::invalid_argument("make_gausson: b must be > 0");
  }
  if (params.potential.size() > 0 &&
      params.potential.cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("make_gausson: potential must be zero");
  }
  double a = params.mass * params.b;
  Eigen::VectorXd x = grid.points();
  Vector amps(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) {
    double d = x[j] - center;
    amps[j] = std::exp(-a * d * d);
  }
  amps /= std::sqrt(amps.squaredNorm() * grid.dx());
  return WaveField{grid, std::move(amps)};
}

WaveField make_gaussian(const Grid1D& grid, double center, double sigma0) {
  if (!(sigma0 > 0.0)) {
    throw std::invalid_argument("make_gaussian: sigma0 must be > 0");
  }
  // Density std sigma0 means amplitude exp(-x²/(4 sigma0²)).
  double a = 1.0 / (4.0 * sigma0 * sigma0);
  Eigen::VectorXd x = grid.points();
  Vector amps(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) {
    double d = x[j] - center;
    amps[j] = std::exp(-a * d * d);
  }
  amps /= std::sqrt(amps.squaredNorm() * grid.dx());
  return WaveField{grid, std::move(amps)};
}

WaveField step(const LogNlseParams& params, const WaveField& psi) {
  validate(params);
  Eigen::FFT<double> fft;
  KineticOp kin(params, psi.grid);
  Vector amps = psi.amplitudes;
  strang_step(params, kin, fft, amps);
  return WaveField{psi.grid, std::move(amps)};
}

EvolveResult evolve(const LogNlseParams& params, const WaveField& psi0,
                    double t_final, int stride) {
  validate(params);
  if (t_final < 0.0) {
    throw std::invalid_argument("evolve: t_final must be >= 0");
  }
  if (stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
  long long n = static_cast<long long>(std::floor(t_final / params.dt + 0.5));
  if (std::abs(n * params.dt - t_final) > params.dt) {
    throw std::invalid_argument("evolve: dt does not divide t_final");
  }

  Eigen::FFT<double> fft;
  KineticOp kin(params, psi0.grid);
  WaveField psi{psi0.grid, psi0.amplitudes};
  EvolveDiagnostics diag;

  auto sample = [&](double t) {
    diag.times.push_back(t);
    double nrm = field_norm(psi);
    diag.norms.push_back(nrm);
    diag.widths.push_back(width(psi));
    diag.energies.push_back(energy(params, psi));
    if (std::abs(nrm - 1.0) > 1e-6) {
      throw std::runtime_error("evolve: norm drift " +
                               std::to_string(std::abs(nrm - 1.0)) +
                               " at t = " + std::to_string(t));
    }
  };

  sample(0.0);
  for (long long i = 1; i <= n; ++i) {
    strang_step(params, kin, fft, psi.amplitudes);
    if (i % stride == 0 || i == n) sample(i * params.dt);
  }
  return EvolveResult{std::move(psi), std::move(diag)};
}

}  // namespace nlq
