#pragma once

#include <array>
#include <complex>

#include "dephasing/errors.hpp"

namespace dephasing {

/// Slack on unit-ball membership; absorbs propagator round-off.
inline constexpr double kNormTolerance = 1e-9;

/// Bloch vector of a single qubit, rho = (I + vx sx + vy sy + vz sz) / 2.
///
/// Construction validates finiteness and ball membership; every other
/// operation assumes a valid state.
class BlochState {
 public:
  BlochState() = default;
  BlochState(double vx, double vy, double vz);

  double vx() const noexcept { return v_[0]; }
  double vy() const noexcept { return v_[1]; }
  double vz() const noexcept { return v_[2]; }
  const std::array<double, 3>& components() const noexcept { return v_; }

  friend bool operator==(const BlochState&, const BlochState&) = default;

 private:
  std::array<double, 3> v_{0.0, 0.0, 0.0};
};

/// Squared Bloch norm. Note this is not Tr(rho^2) = (1 + |v|^2) / 2.
double purity(const BlochState& s) noexcept;

/// Squared transverse component vx^2 + vy^2; zero exactly on the z axis.
double coherence(const BlochState& s) noexcept;

/// Rotation by `angle` about the z axis.
BlochState rotate_z(const BlochState& s, double angle);

/// 2x2 density matrix, row-major.
struct DensityMatrix {
  std::array<std::complex<double>, 4> entries{};

  std::complex<double> operator()(int row, int col) const { return entries[2 * row + col]; }
};

DensityMatrix to_density_matrix(const BlochState& s);

/// Throws InvalidDensityMatrix unless rho is Hermitian with unit trace and
/// nonnegative determinant (all within 1e-12).
BlochState from_density_matrix(const DensityMatrix& rho);

/// (p - c) / (gamma c): the longest span over which unitary control can hold
/// the coherence constant.
double breakdown_time(double p, double c, double gamma);

struct ModelParams {
  double gamma = 0.0;
  double root_tol = 1e-12;
  double ode_step = 1e-3;

  /// Throws InvalidParams when any field is non-positive or non-finite.
  void validate() const;
};

}  // namespace dephasing
