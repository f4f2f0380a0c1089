#include "dephasing/bloch.hpp"

#include <cmath>
#include <string>

namespace dephasing {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ZeroCoherence: return "ZeroCoherence";
    case ErrorKind::NoPurityReserve: return "NoPurityReserve";
    case ErrorKind::OverdampedRegime: return "OverdampedRegime";
    case ErrorKind::PlaneViolation: return "PlaneViolation";
    case ErrorKind::OutOfHorizon: return "OutOfHorizon";
    case ErrorKind::InvalidStep: return "InvalidStep";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NoRecoveryAtThisField: return "NoRecoveryAtThisField";
    case ErrorKind::NoLimitSolution: return "NoLimitSolution";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

BlochState::BlochState(double vx, double vy, double vz) : v_{vx, vy, vz} {
  if (!std::isfinite(vx) || !std::isfinite(vy) || !std::isfinite(vz)) {
    throw Error(ErrorKind::InvalidState, "Bloch components must be finite");
  }
  const double norm2 = vx * vx + vy * vy + vz * vz;
  if (norm2 > 1.0 + kNormTolerance) {
    throw Error(ErrorKind::InvalidState,
                "Bloch vector outside the unit ball (|v|^2 = " + std::to_string(norm2) + ")");
  }
}

double purity(const BlochState& s) noexcept {
  return s.vx() * s.vx() + s.vy() * s.vy() + s.vz() * s.vz();
}

double coherence(const BlochState& s) noexcept { return s.vx() * s.vx() + s.vy() * s.vy(); }

BlochState rotate_z(const BlochState& s, double angle) {
  if (angle == 0.0) return s;
  const double c = std::cos(angle);
  const double sn = std::sin(angle);
  return {c * s.vx() - sn * s.vy(), sn * s.vx() + c * s.vy(), s.vz()};
}

DensityMatrix to_density_matrix(const BlochState& s) {
  using cd = std::complex<double>;
  DensityMatrix rho;
  rho.entries[0] = cd(0.5 * (1.0 + s.vz()), 0.0);
  rho.entries[1] = cd(0.5 * s.vx(), -0.5 * s.vy());
  rho.entries[2] = cd(0.5 * s.vx(), 0.5 * s.vy());
  rho.entries[3] = cd(0.5 * (1.0 - s.vz()), 0.0);
  return rho;
}

BlochState from_density_matrix(const DensityMatrix& rho) {
  constexpr double tol = 1e-12;
  const auto a = rho(0, 0);
  const auto b = rho(0, 1);
  const auto c = rho(1, 0);
  const auto d = rho(1, 1);
  for (const auto& z : rho.entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::InvalidDensityMatrix, "non-finite entry");
    }
  }
  if (std::abs(a.imag()) > tol || std::abs(d.imag()) > tol || std::abs(b - std::conj(c)) > tol) {
    throw Error(ErrorKind::InvalidDensityMatrix, "matrix is not Hermitian");
  }
  if (std::abs(a.real() + d.real() - 1.0) > tol) {
    throw Error(ErrorKind::InvalidDensityMatrix, "trace differs from 1");
  }
  if (a.real() * d.real() - std::norm(c) < -tol) {
    throw Error(ErrorKind::InvalidDensityMatrix, "matrix is not positive semidefinite");
  }
  // Average the two off-diagonal readings so Hermitian round-off cancels.
  const double vx = b.real() + c.real();
  const double vy = c.imag() - b.imag();
  const double vz = a.real() - d.real();
  return {vx, vy, vz};
}

double breakdown_time(double p, double c, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be positive");
  }
  if (!(c >= 0.0) || !(p <= 1.0 + kNormTolerance) || c > p) {
    throw Error(ErrorKind::InvalidState, "need 0 <= c <= p <= 1");
  }
  if (c == 0.0) {
    throw Error(ErrorKind::ZeroCoherence, "initial coherence is zero");
  }
  return (p - c) / (gamma * c);
}

void ModelParams::validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(gamma)) throw Error(ErrorKind::InvalidParams, "gamma must be positive");
  if (!positive(root_tol)) throw Error(ErrorKind::InvalidParams, "root_tol must be positive");
  if (!positive(ode_step)) throw Error(ErrorKind::InvalidParams, "ode_step must be positive");
}

}  // namespace dephasing
