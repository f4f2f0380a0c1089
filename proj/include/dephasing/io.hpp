#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dephasing/bloch.hpp"
#include "dephasing/dynamics.hpp"
#include "dephasing/synthesis.hpp"

namespace dephasing::io {

/// One run configuration, read from a flat JSON object.
///
/// The initial state is given either explicitly (vx, vy, vz) or as
/// (purity, coherence, theta, vz_sign); exactly one form is allowed.
struct Scenario {
  double gamma = 0.0;
  BlochState initial;
  std::optional<double> horizon_T;
  std::optional<double> u;
  double sample_step = 0.01;
  std::optional<std::string> output_path;
};

/// Throws Error(InvalidConfig) naming the offending key.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);

/// Synthesis problem for a scenario; requires horizon_T.
SynthesisProblem to_problem(const Scenario& scenario);

/// Schedule record: epsilon, theta, u, dt1, dt2, dt3, gamma, plus the
/// initial state when known so the record can be simulated on its own.
struct ScheduleRecord {
  ControlSchedule schedule;
  double gamma = 0.0;
  std::optional<BlochState> initial;
};

std::string schedule_to_json(const ScheduleRecord& record);
ScheduleRecord parse_schedule(std::string_view json_text);
ScheduleRecord load_schedule(const std::string& path);

inline constexpr std::string_view kCsvHeader = "t,vx,vy,vz,purity,coherence,ux,uy,uz";

/// 12 significant digits, '.' decimal point regardless of locale, no
/// negative zero.
std::string format_number(double x);

/// Trajectory as CSV; one row per sample, header kCsvHeader.
std::string trajectory_csv(const Trajectory& trajectory);

/// Whitespace-separated plot columns with a '#' header:
/// t, field along the drive axis, vx, vz, purity, coherence.
std::string plot_data(const Trajectory& trajectory, double theta);

void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

}  // namespace dephasing::io
