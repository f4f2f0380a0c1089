#include "dephasing/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dephasing/roots.hpp"

namespace dephasing {

namespace {

void require_oscillatory(double u, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be positive");
  }
  if (!(u > 0.5 * gamma) || !std::isfinite(u)) {
    throw Error(ErrorKind::OverdampedRegime,
                "u = " + std::to_string(u) + " does not exceed gamma/2 = " + std::to_string(0.5 * gamma));
  }
}

void require_reserve(double c, double p) {
  if (!(c > 0.0)) throw Error(ErrorKind::ZeroCoherence, "initial coherence is zero");
  if (!(p > c)) throw Error(ErrorKind::NoPurityReserve, "purity equals coherence (vz = 0)");
  if (p > 1.0 + kNormTolerance) throw Error(ErrorKind::InvalidState, "purity exceeds 1");
}

// Steer-out equation: sin(w t) = exp(gamma (dt1 + t) / 4) * amplitude.
struct SteerOutEquation {
  double omega;
  double gamma;
  double dt1;
  double amplitude;

  SteerOutEquation(double u, double g, double c, double p, double stage1)
      : omega(0.25 * std::sqrt(4.0 * u * u - g * g)), gamma(g), dt1(stage1) {
    const double root = 4.0 * omega;
    amplitude = root * std::sqrt(c) / (2.0 * std::sqrt(u * u * p + g * u * std::sqrt(c * (p - c))));
  }

  double rhs(double t) const { return std::exp(0.25 * gamma * (dt1 + t)) * amplitude; }
  double residual(double t) const { return std::sin(omega * t) - rhs(t); }
  double slope(double t) const { return omega * std::cos(omega * t) - 0.25 * gamma * rhs(t); }
};

}  // namespace

void SynthesisProblem::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidParams, "gamma must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::InvalidParams, "horizon T must be positive");
  }
  if (fixed_u && (!(*fixed_u > 0.0) || !std::isfinite(*fixed_u))) {
    throw Error(ErrorKind::InvalidParams, "fixed u must be positive");
  }
  if (coherence(initial) == 0.0) throw Error(ErrorKind::ZeroCoherence, "initial coherence is zero");
  if (initial.vz() == 0.0) throw Error(ErrorKind::NoPurityReserve, "purity equals coherence (vz = 0)");
}

int epsilon_sign(double vz0) {
  if (vz0 == 0.0 || std::isnan(vz0)) {
    throw Error(ErrorKind::NoPurityReserve, "vz(0) = 0: purity equals coherence");
  }
  return vz0 > 0.0 ? -1 : 1;
}

double phase_theta(double vx0, double vy0) {
  if (vx0 == 0.0 && vy0 == 0.0) throw Error(ErrorKind::ZeroCoherence, "initial coherence is zero");
  double theta = std::atan2(vy0, vx0);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  // atan2 of a tiny negative vy can round up to exactly 2pi.
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return theta;
}

double dt1_exact(double u, double gamma, double c, double p) {
  require_oscillatory(u, gamma);
  require_reserve(c, p);
  const double root = std::sqrt(4.0 * u * u - gamma * gamma);
  const double sc = std::sqrt(c);
  return 4.0 / root * std::atan(root * sc / (gamma * sc + 2.0 * u * std::sqrt(p - c)));
}

double vz_after_stage1(double u, double gamma, double vx0, double vz0, double dt1, int epsilon) {
  return propagate_constant_y(BlochState(vx0, 0.0, vz0), u, epsilon, gamma, dt1).vz();
}

double dt3_solve(double u, double gamma, double c, double p, double dt1, double root_tol) {
  require_oscillatory(u, gamma);
  require_reserve(c, p);
  const SteerOutEquation eq(u, gamma, c, p, dt1);
  const auto no_root = [&] {
    return Error(ErrorKind::NoRecoveryAtThisField,
                 "field u = " + std::to_string(u) + " cannot restore the coherence; increase u");
  };

  // On the first half-period the residual is concave and negative at 0, so
  // it has a root iff its maximum is nonnegative, and the first root lies
  // left of that maximum.
  if (!(eq.slope(0.0) > 0.0)) throw no_root();
  const double quarter = 0.5 * std::numbers::pi / eq.omega;
  const double peak = eq.slope(quarter) >= 0.0
                          ? quarter
                          : bisect([&](double t) { return eq.slope(t); }, {0.0, quarter});
  const double peak_value = eq.residual(peak);
  if (!(peak_value >= 0.0)) throw no_root();
  if (peak_value == 0.0) return peak;

  double lo = 0.0;
  double hi = std::min(approx_dt3(u, std::sqrt(c), std::sqrt(p - c)), peak);
  while (eq.residual(hi) < 0.0) {
    lo = hi;
    hi = std::min(2.0 * hi, peak);
  }
  const double dt3 = bisect([&](double t) { return eq.residual(t); }, {lo, hi});
  if (std::abs(eq.residual(dt3)) > root_tol) {
    throw Error(ErrorKind::NoRecoveryAtThisField,
                "steer-out residual " + std::to_string(eq.residual(dt3)) + " above tolerance");
  }
  return dt3;
}

double approx_dt1(double u, double vx0, double vz0) {
  if (vz0 == 0.0) throw Error(ErrorKind::NoPurityReserve, "vz(0) = 0");
  return 2.0 / u * std::atan(std::abs(vx0 / vz0));
}

double approx_dt3(double u, double vx0, double vz0) {
  if (vz0 == 0.0) throw Error(ErrorKind::NoPurityReserve, "vz(0) = 0");
  return 2.0 / u * std::asin(std::abs(vx0) / std::sqrt(vz0 * vz0 + vx0 * vx0));
}

std::array<double, 2> stage_residuals(double u, double gamma, double c, double p, double dt1,
                                      double dt3) {
  const double root = std::sqrt(4.0 * u * u - gamma * gamma);
  const double sc = std::sqrt(c);
  const double line1 =
      std::tan(0.25 * root * dt1) - root * sc / (gamma * sc + 2.0 * u * std::sqrt(p - c));
  const SteerOutEquation eq(u, gamma, c, p, dt1);
  return {line1, eq.residual(dt3)};
}

SynthesisResult synthesize(const SynthesisProblem& problem, double root_tol) {
  problem.validate();
  const BlochState& s0 = problem.initial;
  const double gamma = problem.gamma;
  const double c = coherence(s0);
  const double p = c + s0.vz() * s0.vz();
  const int epsilon = epsilon_sign(s0.vz());
  const double theta = phase_theta(s0.vx(), s0.vy());

  struct Times {
    double dt1;
    double dt3;
  };
  const auto stage_times = [&](double u) {
    const double t1 = dt1_exact(u, gamma, c, p);
    return Times{t1, dt3_solve(u, gamma, c, p, t1, root_tol)};
  };

  double u = 0.0;
  Times times{};
  if (problem.fixed_u) {
    u = *problem.fixed_u;
    times = stage_times(u);
    if (times.dt1 + times.dt3 > problem.horizon) {
      throw Error(ErrorKind::Infeasible,
                  "dt1 + dt3 = " + std::to_string(times.dt1 + times.dt3) + " exceeds T = " +
                      std::to_string(problem.horizon) + " at u = " + std::to_string(u));
    }
  } else {
    // Stage times shrink monotonically with u; keep 0.1% of T for the hold.
    const double budget = 0.999 * problem.horizon;
    const auto feasible = [&](double trial) {
      try {
        const Times t = stage_times(trial);
        return t.dt1 + t.dt3 <= budget;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoRecoveryAtThisField) return false;
        throw;
      }
    };
    double lo = 0.5 * gamma * (1.0 + 1e-6);
    double hi = lo;
    if (!feasible(lo)) {
      int doublings = 0;
      do {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) {
          throw Error(ErrorKind::Infeasible, "no feasible field found for T = " +
                                                 std::to_string(problem.horizon));
        }
      } while (!feasible(hi));
      while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (feasible(mid) ? hi : lo) = mid;
      }
    }
    u = hi;
    // If the edge comes from stage-3 recovery itself (a tangent double root)
    // rather than the time budget, dt3 is ill-conditioned there. Step off it.
    if (lo != hi) {
      try {
        stage_times(lo);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoRecoveryAtThisField) throw;
        u = hi * (1.0 + 1e-6);
      }
    }
    times = stage_times(u);
  }

  SynthesisResult result;
  result.dt1 = times.dt1;
  result.dt3 = times.dt3;
  result.slack = std::max(0.0, problem.horizon - times.dt1 - times.dt3);
  result.schedule = ControlSchedule{epsilon, theta, u, times.dt1, result.slack, times.dt3};
  // Correct the rounding of dt1 + dt2 + dt3 so the schedule covers T. An exact
  // hit is not always representable; then end one or two ulps past T.
  ControlSchedule& sched = result.schedule;
  for (int i = 0; i < 4 && sched.horizon() != problem.horizon; ++i) {
    sched.dt2 = std::max(0.0, sched.dt2 + (problem.horizon - sched.horizon()));
  }
  const double ulp = std::nextafter(problem.horizon, 2.0 * problem.horizon) - problem.horizon;
  for (int i = 0; i < 8 && sched.horizon() < problem.horizon; ++i) sched.dt2 += ulp;
  result.residuals = stage_residuals(u, gamma, c, p, times.dt1, times.dt3);
  return result;
}

VerificationReport verify(const SynthesisResult& result, const SynthesisProblem& problem,
                          double ode_step) {
  const ControlSchedule& schedule = result.schedule;
  const double horizon = schedule.horizon();
  const BlochState closed = state_at(schedule, problem.initial, problem.gamma, horizon);

  VerificationReport report;
  report.initial_coherence = coherence(problem.initial);
  report.final_coherence = coherence(closed);
  report.final_purity = purity(closed);
  report.coherence_error = std::abs(report.final_coherence - report.initial_coherence);
  report.max_residual = std::max(std::abs(result.residuals[0]), std::abs(result.residuals[1]));

  if (horizon > 0.0) {
    const Trajectory oracle =
        integrate_rk4(problem.initial, schedule, problem.gamma, 0.0, horizon, ode_step);
    const BlochState& end = oracle.back().state;
    report.final_coherence_rk4 = coherence(end);
    for (int i = 0; i < 3; ++i) {
      report.oracle_gap =
          std::max(report.oracle_gap, std::abs(end.components()[i] - closed.components()[i]));
    }
  } else {
    report.final_coherence_rk4 = report.final_coherence;
  }
  report.coherence_error_rk4 = std::abs(report.final_coherence_rk4 - report.initial_coherence);
  return report;
}

std::vector<std::optional<SynthesisResult>> synthesize_batch(
    std::span<const SynthesisProblem> problems, double root_tol) {
  std::vector<std::optional<SynthesisResult>> out(problems.size());
  const auto n = static_cast<long>(problems.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = synthesize(problems[i], root_tol);
    } catch (const Error&) {
      out[i] = std::nullopt;
    }
  }
  return out;
}

std::vector<std::optional<SynthesisResult>> synthesize_batch_serial(
    std::span<const SynthesisProblem> problems, double root_tol) {
  std::vector<std::optional<SynthesisResult>> out;
  out.reserve(problems.size());
  for (const auto& problem : problems) {
    try {
      out.emplace_back(synthesize(problem, root_tol));
    } catch (const Error&) {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace dephasing
