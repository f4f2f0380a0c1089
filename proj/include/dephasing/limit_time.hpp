#pragma once

#include <array>

#include "dephasing/bloch.hpp"
#include "dephasing/dynamics.hpp"
#include "dephasing/synthesis.hpp"

namespace dephasing {

/// Longest recovery span at a single field, and that field.
///
/// At u_tilde the steer-out stage lands on the z = 0 plane exactly when the
/// coherence is back to c, i.e. the purity has been used up completely.
struct LimitSolution {
  double u_tilde = 0.0;
  double dt1_tilde = 0.0;
  double dt3_tilde = 0.0;
  double T_tilde = 0.0;
  /// Steer-in tangent equation, steer-out sine equation, vz = 0 tangent equation.
  std::array<double, 3> residuals{0.0, 0.0, 0.0};
  /// Sign changes of the outer residual seen on the scanned field range; >1
  /// means other limit fields exist and the smallest was returned.
  int multiplicity = 1;
  /// Forward-simulated end state of the limit schedule.
  BlochState final_state;
};

/// Closed-form upper bound xi on u_tilde.
struct FieldBound {
  double xi = 0.0;
  double residual = 0.0;
};

/// Throws ZeroCoherence / NoPurityReserve on degenerate states and
/// NoLimitSolution when the outer bracket cannot be closed.
LimitSolution solve_limit_system(double gamma, const BlochState& initial,
                                 double root_tol = 1e-12);

/// The limit schedule (dt2 = 0) built from a solution and its initial state.
ControlSchedule limit_schedule(const LimitSolution& limit, const BlochState& initial);

FieldBound u_upper_bound(double gamma, double p, double c);

enum class LimitRegime { Relaxed, Tight };

/// Relaxed when T >= T_tilde (u_tilde suffices), Tight otherwise.
LimitRegime limit_regime_check(const SynthesisProblem& problem, const LimitSolution& limit);

}  // namespace dephasing
