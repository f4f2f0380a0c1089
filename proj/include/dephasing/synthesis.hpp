#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "dephasing/bloch.hpp"
#include "dephasing/dynamics.hpp"

namespace dephasing {

/// Recover the initial coherence of `initial` after `horizon` time units.
struct SynthesisProblem {
  double gamma = 0.0;
  BlochState initial;
  double horizon = 0.0;
  std::optional<double> fixed_u;

  /// Throws ZeroCoherence, NoPurityReserve or InvalidParams.
  void validate() const;
};

struct SynthesisResult {
  ControlSchedule schedule;
  double dt1 = 0.0;
  double dt3 = 0.0;
  double slack = 0.0;  ///< T - dt1 - dt3
  /// Residuals of the steer-in (tangent) and steer-out (sine) equations.
  std::array<double, 2> residuals{0.0, 0.0};
};

/// -1 for vz0 > 0, +1 for vz0 < 0. Throws NoPurityReserve at vz0 == 0.
int epsilon_sign(double vz0);

/// atan2(vy0, vx0) mapped into [0, 2pi). Throws ZeroCoherence at the origin.
double phase_theta(double vx0, double vy0);

/// Time to steer (sqrt(c), 0, sqrt(p - c)) onto the z axis at field u.
double dt1_exact(double u, double gamma, double c, double p);

/// vz at the end of the steer-in stage, from the closed-form propagator.
double vz_after_stage1(double u, double gamma, double vx0, double vz0, double dt1, int epsilon);

/// Smallest dt3 > 0 on which the steer-out stage restores vx^2 = c.
/// Throws NoRecoveryAtThisField when the field is too weak.
double dt3_solve(double u, double gamma, double c, double p, double dt1,
                 double root_tol = 1e-12);

/// Large-field estimates, only meaningful for u >> gamma/2.
double approx_dt1(double u, double vx0, double vz0);
double approx_dt3(double u, double vx0, double vz0);

/// Residuals (tangent form, sine form) of the stage-time system at (u, dt1, dt3).
std::array<double, 2> stage_residuals(double u, double gamma, double c, double p, double dt1,
                                      double dt3);

SynthesisResult synthesize(const SynthesisProblem& problem, double root_tol = 1e-12);

struct VerificationReport {
  double initial_coherence = 0.0;
  double final_coherence = 0.0;       ///< closed form
  double final_purity = 0.0;          ///< closed form
  double final_coherence_rk4 = 0.0;
  double coherence_error = 0.0;       ///< |C(T) - c|, closed form
  double coherence_error_rk4 = 0.0;   ///< |C(T) - c|, RK4 oracle
  double oracle_gap = 0.0;            ///< max per-component gap at T
  double max_residual = 0.0;
};

VerificationReport verify(const SynthesisResult& result, const SynthesisProblem& problem,
                          double ode_step = 1e-3);

/// Batch synthesis, OpenMP-parallel over problems. Problems that throw are
/// reported as std::nullopt.
std::vector<std::optional<SynthesisResult>> synthesize_batch(
    std::span<const SynthesisProblem> problems, double root_tol = 1e-12);

/// Serial reference for synthesize_batch.
std::vector<std::optional<SynthesisResult>> synthesize_batch_serial(
    std::span<const SynthesisProblem> problems, double root_tol = 1e-12);

}  // namespace dephasing
