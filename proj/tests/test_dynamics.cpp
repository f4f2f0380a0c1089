#include "doctest.h"

#include <cmath>
#include <random>

#include "dephasing/dynamics.hpp"
#include "test_support.hpp"

using namespace dephasing;
using namespace dephasing::testing;
using doctest::Approx;

namespace {

ControlSchedule example_schedule() { return {-1, 0.0, 0.2, 5.79, 5.10, 9.11}; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidConfig;
}

}  // namespace

TEST_CASE("control field follows the three stages") {
  const ControlSchedule s = example_schedule();
  CHECK(control_field_at(s, 1.0) == ControlField{0.0, -0.2, 0.0});
  CHECK(control_field_at(s, 8.0) == ControlField{0.0, 0.0, 0.0});
  CHECK(control_field_at(s, 15.0) == ControlField{0.0, 0.2, 0.0});

  // Half-open stages: boundaries belong to the later stage, T to the last.
  CHECK(stage_at(s, 0.0) == Stage::SteerIn);
  CHECK(stage_at(s, 5.79) == Stage::Hold);
  CHECK(stage_at(s, 5.79 + 5.10) == Stage::SteerOut);
  CHECK(stage_at(s, s.horizon()) == Stage::SteerOut);

  CHECK(kind_of([&] { control_field_at(s, -0.1); }) == ErrorKind::OutOfHorizon);
  CHECK(kind_of([&] { control_field_at(s, s.horizon() + 1e-9); }) == ErrorKind::OutOfHorizon);

  // General phase: field along (-sin theta, cos theta), scaled by epsilon u.
  const ControlSchedule rotated{1, std::numbers::pi / 2, 0.5, 1.0, 1.0, 1.0};
  const ControlField f = control_field_at(rotated, 0.5);
  CHECK(f.ux == Approx(-0.5));
  CHECK(std::abs(f.uy) < 1e-15);
  CHECK(f.uz == 0.0);
}

TEST_CASE("empty trailing stage closes the previous one at T") {
  const ControlSchedule s{-1, 0.0, 0.2, 1.0, 2.0, 0.0};
  CHECK(stage_at(s, 3.0) == Stage::Hold);
  const ControlSchedule only_steer{-1, 0.0, 0.2, 1.0, 0.0, 0.0};
  CHECK(stage_at(only_steer, 1.0) == Stage::SteerIn);
}

TEST_CASE("derivative matches the Bloch equations") {
  const auto zero = derivative(BlochState(0, 0, 1), {}, 0.7);
  CHECK(zero == BlochVelocity{0, 0, 0});
  const auto decay = derivative(BlochState(1, 0, 0), {}, 0.1);
  CHECK(decay[0] == Approx(-0.05));
  CHECK(decay[1] == 0.0);
  CHECK(decay[2] == 0.0);
  const auto tilt = derivative(BlochState(0, 0, 1), {0, 0.3, 0}, 0.1);
  CHECK(tilt[0] == Approx(0.15));
  CHECK(tilt[1] == 0.0);
  CHECK(tilt[2] == 0.0);
  // uz rotates about z.
  const auto spin = derivative(BlochState(1, 0, 0), {0, 0, 2.0}, 0.0);
  CHECK(spin[1] == Approx(1.0));
}

TEST_CASE("free propagation") {
  const BlochState s(0.3, -0.2, 0.5);
  CHECK(free_propagate(s, 0.4, 0.0) == s);
  const BlochState d = free_propagate(BlochState(1, 0, 0), 1.0, 2.0);
  CHECK(d.vx() == Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(free_propagate(BlochState(0, 0, 0.7), 3.0, 11.0) == BlochState(0, 0, 0.7));
}

TEST_CASE("closed-form y-field propagator") {
  const BlochState s0 = ref::initial();
  CHECK(propagate_constant_y(s0, 0.2, -1, 0.1, 0.0) == s0);

  const BlochState s = propagate_constant_y(s0, 0.2, -1, 0.1, 5.796);
  CHECK(std::abs(s.vx() - ref::kVxAt5796) <= 1e-12);
  CHECK(s.vy() == 0.0);
  CHECK(std::abs(s.vz() - ref::kVzAt5796) <= 1e-12);

  // At the exact steer-in time the state sits on the z axis.
  const BlochState on_axis = propagate_constant_y(s0, 0.2, -1, 0.1, ref::kDt1);
  CHECK(std::abs(on_axis.vx()) <= 1e-12);
  CHECK(std::abs(on_axis.vz() - ref::kVzAfterStage1) <= 1e-12);

  // Cross-check against the RK4 oracle.
  const ControlSchedule one_stage{-1, 0.0, 0.2, 5.796, 0.0, 0.0};
  const Trajectory rk = integrate_rk4(s0, one_stage, 0.1, 0.0, 5.796, 1e-3);
  CHECK(max_component_gap(rk.back().state, s) <= 1e-6);

  CHECK(kind_of([&] { propagate_constant_y(s0, 0.05, -1, 0.1, 1.0); }) ==
        ErrorKind::OverdampedRegime);
  CHECK(kind_of([&] { propagate_constant_y(BlochState(0.3, 0.1, 0.2), 0.5, -1, 0.1, 1.0); }) ==
        ErrorKind::PlaneViolation);
}

TEST_CASE("property: y-field propagator semigroup and vanishing-damping rotation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double gamma = 0.01 + unit(rng);
    const double u = 0.5 * gamma * (1.01 + 20.0 * unit(rng));
    const int eps = unit(rng) < 0.5 ? -1 : 1;
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    const double r = unit(rng);
    const BlochState s(r * std::cos(angle), 0.0, r * std::sin(angle));
    const double a = 5.0 * unit(rng), b = 5.0 * unit(rng);
    const BlochState whole = propagate_constant_y(s, u, eps, gamma, a + b);
    const BlochState split =
        propagate_constant_y(propagate_constant_y(s, u, eps, gamma, a), u, eps, gamma, b);
    CHECK(max_component_gap(whole, split) <= 1e-12);

    const BlochState rigid = propagate_constant_y(s, u, eps, 1e-15, a + b);  // damping below rounding
    CHECK(std::abs(std::sqrt(purity(rigid)) - r) <= 1e-12);
  }
}

TEST_CASE("RK4 oracle") {
  const ControlSchedule free_only{-1, 0.0, 1.0, 0.0, 2.0, 0.0};
  const Trajectory t = integrate_rk4(BlochState(1, 0, 0), free_only, 1.0, 0.0, 2.0, 1e-3);
  CHECK(t.front().t == 0.0);
  CHECK(t.back().t == 2.0);
  CHECK(std::abs(t.back().state.vx() - std::exp(-1.0)) <= 1e-8);

  CHECK(kind_of([&] { integrate_rk4(BlochState(1, 0, 0), free_only, 1.0, 0.0, 2.0, 0.0); }) ==
        ErrorKind::InvalidStep);
  CHECK(kind_of([&] { integrate_rk4(BlochState(1, 0, 0), free_only, 1.0, 0.0, 2.0, -1.0); }) ==
        ErrorKind::InvalidStep);
  CHECK(kind_of([&] { integrate_rk4(BlochState(1, 0, 0), free_only, 1.0, 1.0, 3.0, 1e-3); }) ==
        ErrorKind::OutOfHorizon);

  // Steps never straddle a switching time.
  const ControlSchedule s = example_schedule();
  const Trajectory full = integrate_rk4(ref::initial(), s, 0.1, 0.0, s.horizon(), 0.07);
  bool has_hold = false, has_out = false;
  for (std::size_t i = 1; i < full.size(); ++i) {
    REQUIRE(full[i].t > full[i - 1].t);
    has_hold |= full[i].t == s.hold_start();
    has_out |= full[i].t == s.steer_out_start();
  }
  CHECK(has_hold);
  CHECK(has_out);

  // Starting mid-horizon from the matching state.
  const BlochState mid = state_at(s, ref::initial(), 0.1, 7.0);
  const Trajectory tail = integrate_rk4(mid, s, 0.1, 7.0, s.horizon(), 1e-3);
  CHECK(tail.front().t == 7.0);
  CHECK(max_component_gap(tail.back().state, state_at(s, ref::initial(), 0.1, s.horizon())) <= 1e-6);
}

TEST_CASE("simulate the worked example") {
  const SynthesisResult r = synthesize({ref::kGamma, ref::initial(), ref::kHorizon, ref::kU});
  const Trajectory traj = simulate(r.schedule, ref::initial(), ref::kGamma, 0.01);
  CHECK(traj.front().t == 0.0);
  CHECK(traj.front().state == ref::initial());
  CHECK(std::abs(traj.back().coherence - ref::kC) <= 1e-9);
  CHECK(std::abs(traj.back().purity - 0.63) <= 0.005);
  CHECK(std::abs(traj.back().purity - ref::kFinalPurity) <= 1e-12);
  CHECK(std::abs(traj.back().state.vz() - ref::kFinalVz) <= 1e-12);

  const ControlSchedule& s = r.schedule;
  double hold_purity = -1.0;
  for (const auto& sample : traj) {
    REQUIRE(std::abs(sample.purity - purity(sample.state)) <= 1e-14);
    REQUIRE(std::abs(sample.coherence - coherence(sample.state)) <= 1e-14);
    if (sample.t >= s.hold_start() && sample.t < s.steer_out_start()) {
      CHECK(sample.coherence <= 1e-12);
      CHECK(sample.field == ControlField{});
      if (hold_purity < 0.0) hold_purity = sample.purity;
      CHECK(sample.purity == hold_purity);
    }
  }
}

TEST_CASE("sample times include every stage boundary") {
  const ControlSchedule s = example_schedule();
  const auto times = sample_times(s, 0.5);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == s.horizon());
  for (std::size_t i = 1; i < times.size(); ++i) REQUIRE(times[i] > times[i - 1]);
  CHECK(std::find(times.begin(), times.end(), s.hold_start()) != times.end());
  CHECK(std::find(times.begin(), times.end(), s.steer_out_start()) != times.end());
  CHECK_THROWS_AS(sample_times(s, 0.0), Error);

  // Zero-length stages collapse onto a single sample.
  const ControlSchedule no_hold{-1, 0.0, 0.2, 1.0, 0.0, 1.0};
  const auto t2 = sample_times(no_hold, 0.25);
  CHECK(std::count(t2.begin(), t2.end(), 1.0) == 1);
}

TEST_CASE("property: purity changes only through the coherence term") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    const FeasibleCase fc = random_feasible(rng);
    const ControlSchedule& s = fc.result.schedule;
    const double gamma = fc.problem.gamma;
    const double h = 1e-5;
    std::uniform_real_distribution<double> when(h, s.horizon() - h);
    for (int k = 0; k < 20; ++k) {
      const double t = when(rng);
      if (std::abs(t - s.hold_start()) < 2 * h || std::abs(t - s.steer_out_start()) < 2 * h) continue;
      const double fd = (purity(state_at(s, fc.problem.initial, gamma, t + h)) -
                         purity(state_at(s, fc.problem.initial, gamma, t - h))) / (2 * h);
      const double law = -gamma * coherence(state_at(s, fc.problem.initial, gamma, t));
      CHECK(std::abs(fd - law) <= 1e-6 * gamma);
    }
  }
}

TEST_CASE("schedule validation") {
  CHECK(kind_of([] { ControlSchedule{0, 0.0, 0.2, 1, 1, 1}.validate(0.1); }) ==
        ErrorKind::InvalidParams);
  CHECK(kind_of([] { ControlSchedule{1, 7.0, 0.2, 1, 1, 1}.validate(0.1); }) ==
        ErrorKind::InvalidParams);
  CHECK(kind_of([] { ControlSchedule{1, 0.0, 0.2, -1, 1, 1}.validate(0.1); }) ==
        ErrorKind::InvalidParams);
  CHECK(kind_of([] { ControlSchedule{1, 0.0, 0.04, 1, 1, 1}.validate(0.1); }) ==
        ErrorKind::OverdampedRegime);
  // No driven stage: a weak field is harmless.
  CHECK_NOTHROW(ControlSchedule({1, 0.0, 0.04, 0, 1, 0}).validate(0.1));
}
