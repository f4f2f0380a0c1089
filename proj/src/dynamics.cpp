#include "dephasing/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dephasing {

namespace {

// Boundary states of the three stages, expressed in the frame rotated by
// -theta where the drive points along +y.
struct StagePlan {
  BlochState start[3];
  double offset[3];
  double field_y[3];
  double theta;
};

StagePlan make_plan(const ControlSchedule& schedule, const BlochState& state0, double gamma) {
  schedule.validate(gamma);
  StagePlan plan{};
  plan.theta = schedule.theta;
  const double drive = schedule.epsilon * schedule.u;
  plan.field_y[0] = drive;
  plan.field_y[1] = 0.0;
  plan.field_y[2] = -drive;
  plan.offset[0] = 0.0;
  plan.offset[1] = schedule.hold_start();
  plan.offset[2] = schedule.steer_out_start();
  plan.start[0] = rotate_z(state0, -schedule.theta);
  plan.start[1] = schedule.dt1 > 0.0
                      ? propagate_y_field(plan.start[0], drive, gamma, schedule.dt1)
                      : plan.start[0];
  plan.start[2] = free_propagate(plan.start[1], gamma, schedule.dt2);
  return plan;
}

BlochState evaluate(const StagePlan& plan, Stage stage, double t, double gamma) {
  const int k = static_cast<int>(stage) - 1;
  const double local = std::max(0.0, t - plan.offset[k]);
  const BlochState rotated = stage == Stage::Hold
                                 ? free_propagate(plan.start[k], gamma, local)
                                 : propagate_y_field(plan.start[k], plan.field_y[k], gamma, local);
  return rotate_z(rotated, plan.theta);
}

using Vec3 = std::array<double, 3>;

Vec3 rhs(const Vec3& v, const ControlField& f, double gamma) {
  return {0.5 * (-gamma * v[0] + f.uy * v[2] - f.uz * v[1]),
          0.5 * (-gamma * v[1] - f.ux * v[2] + f.uz * v[0]),
          0.5 * (f.ux * v[1] - f.uy * v[0])};
}

Vec3 axpy(const Vec3& v, double a, const Vec3& k) {
  return {v[0] + a * k[0], v[1] + a * k[1], v[2] + a * k[2]};
}

Vec3 rk4_step(const Vec3& v, const ControlField& f, double gamma, double h) {
  const Vec3 k1 = rhs(v, f, gamma);
  const Vec3 k2 = rhs(axpy(v, 0.5 * h, k1), f, gamma);
  const Vec3 k3 = rhs(axpy(v, 0.5 * h, k2), f, gamma);
  const Vec3 k4 = rhs(axpy(v, h, k3), f, gamma);
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

ControlField stage_field(const ControlSchedule& schedule, Stage stage) {
  if (stage == Stage::Hold) return {};
  const double sign = stage == Stage::SteerIn ? 1.0 : -1.0;
  const double amp = sign * schedule.epsilon * schedule.u;
  return {-amp * std::sin(schedule.theta), amp * std::cos(schedule.theta), 0.0};
}

}  // namespace

void ControlSchedule::validate(double gamma) const {
  if (epsilon != 1 && epsilon != -1) {
    throw Error(ErrorKind::InvalidParams, "epsilon must be +1 or -1");
  }
  if (!std::isfinite(theta) || theta < 0.0 || theta >= 2.0 * std::numbers::pi) {
    throw Error(ErrorKind::InvalidParams, "theta must lie in [0, 2pi)");
  }
  if (!std::isfinite(u) || !(u > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "field magnitude u must be positive");
  }
  for (double d : {dt1, dt2, dt3}) {
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorKind::InvalidParams, "stage durations must be finite and nonnegative");
    }
  }
  if ((dt1 > 0.0 || dt3 > 0.0) && !(u > 0.5 * gamma)) {
    throw Error(ErrorKind::OverdampedRegime,
                "u = " + std::to_string(u) + " does not exceed gamma/2 = " + std::to_string(0.5 * gamma));
  }
}

Stage stage_at(const ControlSchedule& schedule, double t) {
  const double horizon = schedule.horizon();
  if (!(t >= 0.0) || t > horizon) {
    throw Error(ErrorKind::OutOfHorizon,
                "t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon) + "]");
  }
  if (t < schedule.hold_start()) return Stage::SteerIn;
  if (t < schedule.steer_out_start()) return Stage::Hold;
  if (t < horizon || schedule.dt3 > 0.0) return Stage::SteerOut;
  // t == T with an empty last stage: the last non-empty stage is closed at T.
  if (schedule.dt2 > 0.0) return Stage::Hold;
  if (schedule.dt1 > 0.0) return Stage::SteerIn;
  return Stage::Hold;
}

ControlField control_field_at(const ControlSchedule& schedule, double t) {
  return stage_field(schedule, stage_at(schedule, t));
}

BlochVelocity derivative(const BlochState& s, const ControlField& field, double gamma) noexcept {
  return rhs(s.components(), field, gamma);
}

BlochState free_propagate(const BlochState& s, double gamma, double dt) {
  if (dt == 0.0) return s;
  const double decay = std::exp(-0.5 * gamma * dt);
  return {s.vx() * decay, s.vy() * decay, s.vz()};
}

BlochState propagate_y_field(const BlochState& s, double uy, double gamma, double dt) {
  const double u = std::abs(uy);
  if (!(u > 0.5 * gamma)) {
    throw Error(ErrorKind::OverdampedRegime,
                "closed form requires u > gamma/2 (u = " + std::to_string(u) + ")");
  }
  if (dt == 0.0) return s;
  const double root = std::sqrt(4.0 * u * u - gamma * gamma);
  const double phase = 0.25 * root * dt;
  const double decay = std::exp(-0.25 * gamma * dt);
  const double cs = std::cos(phase);
  const double sn = std::sin(phase) / root;
  const double vx = decay * (s.vx() * cs + (2.0 * uy * s.vz() - gamma * s.vx()) * sn);
  const double vz = decay * (s.vz() * cs - (2.0 * uy * s.vx() - gamma * s.vz()) * sn);
  const double vy = s.vy() == 0.0 ? 0.0 : s.vy() * std::exp(-0.5 * gamma * dt);
  return {vx, vy, vz};
}

BlochState propagate_constant_y(const BlochState& s, double u, int epsilon, double gamma,
                                double dt) {
  if (epsilon != 1 && epsilon != -1) {
    throw Error(ErrorKind::InvalidParams, "epsilon must be +1 or -1");
  }
  if (!(u > 0.5 * gamma)) {
    throw Error(ErrorKind::OverdampedRegime,
                "closed form requires u > gamma/2 (u = " + std::to_string(u) + ")");
  }
  if (s.vy() != 0.0) {
    throw Error(ErrorKind::PlaneViolation, "state must lie in the xz-plane");
  }
  if (!(dt >= 0.0)) throw Error(ErrorKind::InvalidParams, "dt must be nonnegative");
  return propagate_y_field(s, epsilon * u, gamma, dt);
}

TrajectorySample make_sample(const ControlSchedule& schedule, double t, const BlochState& s) {
  return {t, s, control_field_at(schedule, t), purity(s), coherence(s)};
}

Trajectory integrate_rk4(const BlochState& state, const ControlSchedule& schedule, double gamma,
                         double t0, double t1, double step) {
  if (!std::isfinite(step) || !(step > 0.0)) {
    throw Error(ErrorKind::InvalidStep, "integration step must be positive");
  }
  schedule.validate(gamma);
  const double horizon = schedule.horizon();
  if (!(t0 >= 0.0) || !(t1 <= horizon) || !(t0 < t1)) {
    throw Error(ErrorKind::OutOfHorizon, "need 0 <= t0 < t1 <= T");
  }

  std::vector<double> edges{t0};
  for (double b : {schedule.hold_start(), schedule.steer_out_start()}) {
    if (b > t0 && b < t1) edges.push_back(b);
  }
  edges.push_back(t1);

  Trajectory out;
  out.reserve(static_cast<std::size_t>((t1 - t0) / step) + edges.size() + 1);
  out.push_back(make_sample(schedule, t0, state));
  Vec3 v = state.components();
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e];
    const double b = edges[e + 1];
    if (b <= a) continue;
    const ControlField field = stage_field(schedule, stage_at(schedule, 0.5 * (a + b)));
    const auto n = static_cast<long>(std::ceil((b - a) / step - 1e-9));
    for (long k = 1; k <= n; ++k) {
      const double ta = a + static_cast<double>(k - 1) * step;
      const double tb = k == n ? b : a + static_cast<double>(k) * step;
      v = rk4_step(v, field, gamma, tb - ta);
      out.push_back(make_sample(schedule, tb, BlochState(v[0], v[1], v[2])));
    }
  }
  return out;
}

BlochState state_at(const ControlSchedule& schedule, const BlochState& state0, double gamma,
                    double t) {
  const StagePlan plan = make_plan(schedule, state0, gamma);
  return evaluate(plan, stage_at(schedule, t), t, gamma);
}

std::vector<double> sample_times(const ControlSchedule& schedule, double sample_step) {
  if (!std::isfinite(sample_step) || !(sample_step > 0.0)) {
    throw Error(ErrorKind::InvalidStep, "sample step must be positive");
  }
  const double horizon = schedule.horizon();
  const double merge_tol = 1e-12 * std::max(1.0, horizon);
  const double boundaries[] = {0.0, schedule.hold_start(), schedule.steer_out_start(), horizon};

  std::vector<double> times;
  const auto n = static_cast<long>(std::floor(horizon / sample_step));
  times.reserve(static_cast<std::size_t>(n) + 4);
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * sample_step;
    const bool near_boundary = std::any_of(std::begin(boundaries), std::end(boundaries),
                                           [&](double b) { return std::abs(t - b) <= merge_tol; });
    if (!near_boundary && t < horizon) times.push_back(t);
  }
  times.insert(times.end(), std::begin(boundaries), std::end(boundaries));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

Trajectory simulate(const ControlSchedule& schedule, const BlochState& state0, double gamma,
                    double sample_step) {
  const StagePlan plan = make_plan(schedule, state0, gamma);
  const std::vector<double> times = sample_times(schedule, sample_step);
  Trajectory out(times.size());
  const auto n = static_cast<long>(times.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const double t = times[i];
    out[i] = make_sample(schedule, t, evaluate(plan, stage_at(schedule, t), t, gamma));
  }
  return out;
}

Trajectory simulate_serial(const ControlSchedule& schedule, const BlochState& state0,
                           double gamma, double sample_step) {
  const StagePlan plan = make_plan(schedule, state0, gamma);
  const std::vector<double> times = sample_times(schedule, sample_step);
  Trajectory out;
  out.reserve(times.size());
  for (double t : times) {
    out.push_back(make_sample(schedule, t, evaluate(plan, stage_at(schedule, t), t, gamma)));
  }
  return out;
}

}  // namespace dephasing
