#include "dephasing/limit_time.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dephasing/roots.hpp"

namespace dephasing {

namespace {

constexpr double kPi = std::numbers::pi;

struct LimitParts {
  double dt1;
  double dt3;
  double log_gap;  // > 0 iff the steer-out sine equation has positive residual
};

// Steer-in time from its closed form, steer-out time from vz(T) = 0 on the
// first branch where the tangent is negative. What remains is the sine
// equation, written in log form: with sin(w dt3) = S / (2u) it reduces to
// sqrt(p + gamma sqrt(c (p - c)) / u) = exp(gamma T / 4) sqrt(c).
LimitParts limit_parts(double u, double gamma, double c, double p) {
  const double root = std::sqrt(4.0 * u * u - gamma * gamma);
  const double omega = 0.25 * root;
  const double dt1 = dt1_exact(u, gamma, c, p);
  const double dt3 = (kPi - std::atan(root / gamma)) / omega;
  const double log_gap = 0.5 * std::log(p + gamma * std::sqrt(c * (p - c)) / u) -
                         0.25 * gamma * (dt1 + dt3) - 0.5 * std::log(c);
  return {dt1, dt3, log_gap};
}

std::array<double, 3> limit_residuals(double u, double gamma, double c, double p, double dt1,
                                      double dt3) {
  const double root = std::sqrt(4.0 * u * u - gamma * gamma);
  const auto lines = stage_residuals(u, gamma, c, p, dt1, dt3);
  return {lines[0], lines[1], std::tan(0.25 * root * dt3) + root / gamma};
}

}  // namespace

LimitSolution solve_limit_system(double gamma, const BlochState& initial, double root_tol) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be positive");
  }
  const double c = coherence(initial);
  if (c == 0.0) throw Error(ErrorKind::ZeroCoherence, "initial coherence is zero");
  if (initial.vz() == 0.0) throw Error(ErrorKind::NoPurityReserve, "purity equals coherence (vz = 0)");
  const double p = c + initial.vz() * initial.vz();

  const auto outer = [&](double u) { return limit_parts(u, gamma, c, p).log_gap; };

  const double lo = 0.5 * gamma * (1.0 + 1e-6);
  double hi = gamma;
  int doublings = 0;
  while (!(outer(hi) > 0.0)) {
    if (++doublings > 60) {
      throw Error(ErrorKind::NoLimitSolution, "outer bracket not closed after 60 doublings");
    }
    hi *= 2.0;
  }
  const SignChangeScan scan = scan_sign_changes(outer, {lo, hi}, 512);
  if (!scan.found) {
    throw Error(ErrorKind::NoLimitSolution, "limit-field residual never changes sign");
  }

  LimitSolution sol;
  sol.u_tilde = bisect(outer, scan.first);
  const LimitParts parts = limit_parts(sol.u_tilde, gamma, c, p);
  sol.dt1_tilde = parts.dt1;
  sol.dt3_tilde = parts.dt3;
  sol.T_tilde = parts.dt1 + parts.dt3;
  sol.residuals = limit_residuals(sol.u_tilde, gamma, c, p, parts.dt1, parts.dt3);
  sol.multiplicity = scan.changes;

  const ControlSchedule schedule = limit_schedule(sol, initial);
  sol.final_state = state_at(schedule, initial, gamma, schedule.horizon());
  const double vz_end = std::abs(sol.final_state.vz());
  const double coherence_gap = std::abs(coherence(sol.final_state) - c);
  if (vz_end > 1e-9 || coherence_gap > 1e-9) {
    throw Error(ErrorKind::NoLimitSolution,
                "forward simulation rejects the limit schedule (|vz| = " + std::to_string(vz_end) +
                    ", |C - c| = " + std::to_string(coherence_gap) + ")");
  }
  for (double r : sol.residuals) {
    if (!(std::abs(r) <= root_tol)) {
      throw Error(ErrorKind::NoLimitSolution, "limit system residual " + std::to_string(r) +
                                                  " above tolerance");
    }
  }
  return sol;
}

ControlSchedule limit_schedule(const LimitSolution& limit, const BlochState& initial) {
  return ControlSchedule{epsilon_sign(initial.vz()), phase_theta(initial.vx(), initial.vy()),
                         limit.u_tilde,              limit.dt1_tilde,
                         0.0,                        limit.dt3_tilde};
}

FieldBound u_upper_bound(double gamma, double p, double c) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be positive");
  }
  if (!(c > 0.0)) throw Error(ErrorKind::ZeroCoherence, "coherence is zero");
  if (!(p > c)) throw Error(ErrorKind::NoPurityReserve, "purity equals coherence");
  if (p > 1.0 + kNormTolerance) throw Error(ErrorKind::InvalidState, "purity exceeds 1");

  // With s = sqrt(4 xi^2 - gamma^2) and k = (p - c) / (8 gamma c) the bound
  // solves tan(k s) = -s / gamma with k s in (pi/2, pi). Multiplying through
  // by gamma cos(k s) removes the pole and leaves a monotone function.
  const double k = (p - c) / (8.0 * gamma * c);
  const auto h = [&](double s) { return gamma * std::sin(k * s) + s * std::cos(k * s); };
  const double s = bisect(h, {0.5 * kPi / k, kPi / k});
  FieldBound bound;
  bound.xi = 0.5 * std::sqrt(s * s + gamma * gamma);
  bound.residual = std::tan(k * s) + s / gamma;
  return bound;
}

LimitRegime limit_regime_check(const SynthesisProblem& problem, const LimitSolution& limit) {
  return problem.horizon >= limit.T_tilde ? LimitRegime::Relaxed : LimitRegime::Tight;
}

}  // namespace dephasing
