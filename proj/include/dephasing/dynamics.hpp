#pragma once

#include <array>
#include <vector>

#include "dephasing/bloch.hpp"

namespace dephasing {

/// Real control components (u1, u2, u3) entering the Bloch equations.
struct ControlField {
  double ux = 0.0;
  double uy = 0.0;
  double uz = 0.0;

  friend bool operator==(const ControlField&, const ControlField&) = default;
};

using BlochVelocity = std::array<double, 3>;

enum class Stage { SteerIn = 1, Hold = 2, SteerOut = 3 };

/// Three-stage piecewise-constant schedule.
///
/// Stage 1 on [0, dt1) applies epsilon*u along (-sin theta, cos theta, 0),
/// stage 2 on [dt1, dt1+dt2) is field free, stage 3 on [dt1+dt2, T] applies
/// the negated stage-1 field. Intervals are half-open except the last
/// non-empty one, which is closed at T.
struct ControlSchedule {
  int epsilon = -1;
  double theta = 0.0;
  double u = 0.0;
  double dt1 = 0.0;
  double dt2 = 0.0;
  double dt3 = 0.0;

  double horizon() const noexcept { return dt1 + dt2 + dt3; }
  double hold_start() const noexcept { return dt1; }
  double steer_out_start() const noexcept { return dt1 + dt2; }

  /// Throws InvalidParams on malformed fields and OverdampedRegime when a
  /// driven stage has u <= gamma/2.
  void validate(double gamma) const;
};

Stage stage_at(const ControlSchedule& schedule, double t);

ControlField control_field_at(const ControlSchedule& schedule, double t);

/// Right-hand side of the controlled dephasing Bloch equations.
BlochVelocity derivative(const BlochState& s, const ControlField& field, double gamma) noexcept;

BlochState free_propagate(const BlochState& s, double gamma, double dt);

/// Closed-form evolution under a constant y-directed field epsilon*u with
/// u > gamma/2. The state must lie in the xz-plane (vy == 0).
BlochState propagate_constant_y(const BlochState& s, double u, int epsilon, double gamma,
                                double dt);

/// Same propagator without the plane restriction; vy decays on its own.
BlochState propagate_y_field(const BlochState& s, double uy, double gamma, double dt);

struct TrajectorySample {
  double t = 0.0;
  BlochState state;
  ControlField field;
  double purity = 0.0;
  double coherence = 0.0;
};

using Trajectory = std::vector<TrajectorySample>;

TrajectorySample make_sample(const ControlSchedule& schedule, double t, const BlochState& s);

/// Fixed-step classical RK4 from `state` at time t0 to t1. Steps are cut at
/// stage boundaries, and the last step in each stage is shortened to land
/// on the boundary exactly.
Trajectory integrate_rk4(const BlochState& state, const ControlSchedule& schedule, double gamma,
                         double t0, double t1, double step);

/// Closed-form state at time t in [0, T].
BlochState state_at(const ControlSchedule& schedule, const BlochState& state0, double gamma,
                    double t);

/// Sample times: multiples of sample_step in [0, T] merged with the stage
/// boundaries, strictly increasing.
std::vector<double> sample_times(const ControlSchedule& schedule, double sample_step);

/// Closed-form trajectory, OpenMP-parallel over samples.
Trajectory simulate(const ControlSchedule& schedule, const BlochState& state0, double gamma,
                    double sample_step);

/// Single-threaded reference for `simulate`; results are bitwise identical.
Trajectory simulate_serial(const ControlSchedule& schedule, const BlochState& state0,
                           double gamma, double sample_step);

}  // namespace dephasing
