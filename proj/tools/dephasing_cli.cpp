// Command-line front end: breakdown time, schedule synthesis, trajectory
// simulation, limit-time analysis and the built-in worked example.
//
// Exit codes: 0 success, 1 reproduction mismatch, 2 config error,
// 3 infeasible, 4 degenerate initial state, 5 limit-solver failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "dephasing/bloch.hpp"
#include "dephasing/dynamics.hpp"
#include "dephasing/io.hpp"
#include "dephasing/limit_time.hpp"
#include "dephasing/synthesis.hpp"

namespace {

using namespace dephasing;

enum Exit : int {
  kOk = 0,
  kMismatch = 1,
  kConfig = 2,
  kInfeasible = 3,
  kDegenerate = 4,
  kLimitFailure = 5,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
    case ErrorKind::NoRecoveryAtThisField:
    case ErrorKind::OverdampedRegime:
      return kInfeasible;
    case ErrorKind::ZeroCoherence:
    case ErrorKind::NoPurityReserve:
      return kDegenerate;
    case ErrorKind::NoLimitSolution:
      return kLimitFailure;
    default:
      return kConfig;
  }
}

struct Options {
  std::string config;
  std::string schedule;
  std::string out;
  double step = 0.0;
};

std::string num(double x) { return io::format_number(x); }

io::Scenario require_config(const Options& opt) {
  if (opt.config.empty()) throw Error(ErrorKind::InvalidConfig, "--config <path> is required");
  return io::load_scenario(opt.config);
}

std::string output_path(const Options& opt, const io::Scenario* sc, const char* fallback) {
  if (!opt.out.empty()) return opt.out;
  if (sc && sc->output_path) return *sc->output_path;
  return fallback;
}

double sample_step(const Options& opt, const io::Scenario* sc) {
  if (opt.step != 0.0) {
    if (!(opt.step > 0.0)) throw Error(ErrorKind::InvalidConfig, "--step must be positive");
    return opt.step;
  }
  return sc ? sc->sample_step : 0.01;
}

void print_state(const char* label, const BlochState& s) {
  fmt::print("{:<22}({}, {}, {})\n", label, num(s.vx()), num(s.vy()), num(s.vz()));
}

void print_schedule(const ControlSchedule& s) {
  fmt::print("{:<22}{}\n", "epsilon", s.epsilon);
  fmt::print("{:<22}{}\n", "theta", num(s.theta));
  fmt::print("{:<22}{}\n", "u", num(s.u));
  fmt::print("{:<22}{}\n", "dt1", num(s.dt1));
  fmt::print("{:<22}{}\n", "dt2", num(s.dt2));
  fmt::print("{:<22}{}\n", "dt3", num(s.dt3));
  fmt::print("{:<22}{}\n", "stage 1", fmt::format("[0, {})", num(s.hold_start())));
  fmt::print("{:<22}{}\n", "stage 2",
             fmt::format("[{}, {})", num(s.hold_start()), num(s.steer_out_start())));
  fmt::print("{:<22}{}\n", "stage 3",
             fmt::format("[{}, {}]", num(s.steer_out_start()), num(s.horizon())));
}

int cmd_breakdown(const Options& opt) {
  const io::Scenario sc = require_config(opt);
  const double c = coherence(sc.initial);
  const double p = c + sc.initial.vz() * sc.initial.vz();
  const double tb = breakdown_time(p, c, sc.gamma);
  if (tb == 0.0) {
    fmt::print(stderr,
               "warning: purity equals coherence (vz = 0); unitary control cannot recover the "
               "coherence of this state\n");
  }
  fmt::print("{:#.6g}\n", tb);
  return kOk;
}

int cmd_synthesize(const Options& opt) {
  const io::Scenario sc = require_config(opt);
  const SynthesisProblem problem = io::to_problem(sc);
  const SynthesisResult result = synthesize(problem);
  const VerificationReport report = verify(result, problem);

  const std::string path = output_path(opt, &sc, "schedule.json");
  io::write_file(path, io::schedule_to_json({result.schedule, sc.gamma, sc.initial}));

  const double c = coherence(sc.initial);
  fmt::print("{:<22}{}\n", "gamma", num(sc.gamma));
  print_state("initial state", sc.initial);
  fmt::print("{:<22}{}\n", "horizon T", num(problem.horizon));
  fmt::print("{:<22}{}\n", "field mode", problem.fixed_u ? "fixed u" : "auto u");
  fmt::print("{:<22}{}\n", "breakdown time", num(breakdown_time(purity(sc.initial), c, sc.gamma)));
  print_schedule(result.schedule);
  fmt::print("{:<22}{}\n", "dt1 + dt3", num(result.dt1 + result.dt3));
  fmt::print("{:<22}{}\n", "residual (steer-in)", num(result.residuals[0]));
  fmt::print("{:<22}{}\n", "residual (steer-out)", num(result.residuals[1]));
  fmt::print("{:<22}{}\n", "final purity", num(report.final_purity));
  fmt::print("{:<22}{}\n", "final coherence", num(report.final_coherence));
  fmt::print("{:<22}{}\n", "|C(T) - c|", num(report.coherence_error));
  fmt::print("{:<22}{}\n", "|C(T) - c| (RK4)", num(report.coherence_error_rk4));
  fmt::print("{:<22}{}\n", "oracle gap", num(report.oracle_gap));
  fmt::print("{:<22}{}\n", "schedule file", path);
  return kOk;
}

int cmd_simulate(const Options& opt) {
  std::optional<io::Scenario> sc;
  if (!opt.config.empty()) sc = io::load_scenario(opt.config);

  ControlSchedule schedule;
  double gamma = 0.0;
  BlochState state0;
  if (!opt.schedule.empty()) {
    const io::ScheduleRecord rec = io::load_schedule(opt.schedule);
    schedule = rec.schedule;
    gamma = rec.gamma;
    if (sc) {
      state0 = sc->initial;
    } else if (rec.initial) {
      state0 = *rec.initial;
    } else {
      throw Error(ErrorKind::InvalidConfig,
                  "schedule has no 'initial' state; pass --config for the initial state");
    }
  } else if (sc) {
    const SynthesisResult result = synthesize(io::to_problem(*sc));
    schedule = result.schedule;
    gamma = sc->gamma;
    state0 = sc->initial;
  } else {
    throw Error(ErrorKind::InvalidConfig, "simulate needs --schedule <path> or --config <path>");
  }

  const Trajectory traj = simulate(schedule, state0, gamma, sample_step(opt, sc ? &*sc : nullptr));
  const std::string path = output_path(opt, sc ? &*sc : nullptr, "trajectory.csv");
  io::write_file(path, io::trajectory_csv(traj));
  const auto& last = traj.back();
  fmt::print("{:<22}{}\n", "rows", traj.size());
  fmt::print("{:<22}{}\n", "final time", num(last.t));
  fmt::print("{:<22}{}\n", "final purity", num(last.purity));
  fmt::print("{:<22}{}\n", "final coherence", num(last.coherence));
  fmt::print("{:<22}{}\n", "trajectory file", path);
  return kOk;
}

const char* mark(bool ok) { return ok ? "✓" : "✗"; }

int cmd_limit(const Options& opt) {
  const io::Scenario sc = require_config(opt);
  const double c = coherence(sc.initial);
  const double p = purity(sc.initial);
  const LimitSolution limit = solve_limit_system(sc.gamma, sc.initial);
  const FieldBound bound = u_upper_bound(sc.gamma, p, c);
  const double tb = breakdown_time(p, c, sc.gamma);

  fmt::print("{:<24}{}\n", "u_tilde", num(limit.u_tilde));
  fmt::print("{:<24}{}\n", "dt1_tilde", num(limit.dt1_tilde));
  fmt::print("{:<24}{}\n", "dt3_tilde", num(limit.dt3_tilde));
  fmt::print("{:<24}{}\n", "T_tilde", num(limit.T_tilde));
  fmt::print("{:<24}{}, {}, {}\n", "residuals", num(limit.residuals[0]), num(limit.residuals[1]),
             num(limit.residuals[2]));
  fmt::print("{:<24}{}\n", "sign changes scanned", limit.multiplicity);
  fmt::print("{:<24}{}\n", "vz(T_tilde)", num(limit.final_state.vz()));
  fmt::print("{:<24}{}\n", "coherence(T_tilde)", num(coherence(limit.final_state)));
  fmt::print("{:<24}{}\n", "xi", num(bound.xi));
  fmt::print("{:<24}{}\n", "xi residual", num(bound.residual));
  fmt::print("{:<24}{}\n", "breakdown time", num(tb));
  fmt::print("T_tilde > t_b            {}\n", mark(limit.T_tilde > tb));
  fmt::print("u_tilde <= xi            {}\n", mark(limit.u_tilde <= bound.xi));
  if (sc.horizon_T) {
    const auto regime = limit_regime_check(io::to_problem(sc), limit);
    fmt::print("{:<24}{}\n", "regime at T",
               regime == LimitRegime::Relaxed ? "relaxed (u_tilde suffices)"
                                              : "tight (needs u > u_tilde)");
  }
  return kOk;
}

struct Comparison {
  const char* name;
  double computed;
  double expected;
  double tolerance;
};

int cmd_reproduce(const Options& opt) {
  const double gamma = 0.1;
  const BlochState initial(std::sqrt(0.3), 0.0, std::sqrt(0.5));
  const SynthesisProblem problem{gamma, initial, 20.0, 0.2};
  const SynthesisResult result = synthesize(problem);
  const double step = sample_step(opt, nullptr);
  const Trajectory traj = simulate(result.schedule, initial, gamma, step);

  const std::string csv_path = opt.out.empty() ? "reproduce_example.csv" : opt.out;
  const std::string dat_path = std::filesystem::path(csv_path).replace_extension(".dat").string();
  io::write_file(csv_path, io::trajectory_csv(traj));
  io::write_file(dat_path, io::plot_data(traj, result.schedule.theta));

  const auto& last = traj.back();
  const Comparison rows[] = {
      {"breakdown time t_b", breakdown_time(purity(initial), coherence(initial), gamma), 16.67, 0.005},
      {"dt1", result.dt1, 5.79, 0.01},
      {"dt3", result.dt3, 9.11, 0.01},
      {"final purity", last.purity, 0.63, 0.005},
      {"final coherence", last.coherence, 0.3, 1e-9},
  };
  bool all_ok = true;
  fmt::print("{:<20} {:>18} {:>10} {:>10}  {}\n", "quantity", "computed", "reference", "tolerance",
             "status");
  for (const auto& r : rows) {
    const bool ok = std::abs(r.computed - r.expected) <= r.tolerance;
    all_ok = all_ok && ok;
    fmt::print("{:<20} {:>18} {:>10} {:>10}  {}\n", r.name, num(r.computed), r.expected,
               r.tolerance, ok ? "ok" : "MISMATCH");
  }
  fmt::print("trajectory: {}\nplot data:  {}\n", csv_path, dat_path);
  return all_ok ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-loop coherence recovery for a dephasing qubit"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "scenario JSON file");
    sub->add_option("--out", opt.out, "output file");
    sub->add_option("--step", opt.step, "trajectory sample step");
  };
  auto* breakdown = app.add_subcommand("breakdown", "print the breakdown time");
  breakdown->add_option("--config", opt.config, "scenario JSON file");
  auto* synth = app.add_subcommand("synthesize", "synthesize a control schedule");
  add_common(synth);
  auto* sim = app.add_subcommand("simulate", "write the controlled trajectory as CSV");
  add_common(sim);
  sim->add_option("--schedule", opt.schedule, "schedule JSON file");
  auto* limit = app.add_subcommand("limit", "limit time, limit field and its upper bound");
  limit->add_option("--config", opt.config, "scenario JSON file");
  auto* repro = app.add_subcommand("reproduce-example", "run the built-in worked example");
  repro->add_option("--out", opt.out, "trajectory CSV path (plot data goes next to it)");
  repro->add_option("--step", opt.step, "trajectory sample step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*breakdown) return cmd_breakdown(opt);
    if (*synth) return cmd_synthesize(opt);
    if (*sim) return cmd_simulate(opt);
    if (*limit) return cmd_limit(opt);
    if (*repro) return cmd_reproduce(opt);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfig;
  }
  return kConfig;
}
