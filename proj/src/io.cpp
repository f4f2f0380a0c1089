#include "dephasing/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace dephasing::io {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); }

json parse_object(std::string_view text, std::string_view what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) config_error(std::string(what) + " must be a JSON object");
  return doc;
}

std::optional<double> number(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) config_error(std::string("key '") + key + "' must be a number");
  return it->get<double>();
}

double required_number(const json& doc, const char* key, std::string_view what) {
  const auto v = number(doc, key);
  if (!v) config_error(std::string("missing required key '") + key + "' in " + std::string(what));
  return *v;
}

BlochState checked_state(double vx, double vy, double vz) {
  try {
    return BlochState(vx, vy, vz);
  } catch (const Error& e) {
    config_error(std::string("invalid initial state: ") + e.what());
  }
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  const json doc = parse_object(json_text, "scenario");
  static const std::set<std::string> known{"gamma",   "vx",        "vy",      "vz",
                                           "purity",  "coherence", "theta",   "vz_sign",
                                           "horizon_T", "u",       "sample_step", "output_path"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) config_error("unknown scenario key '" + item.key() + "'");
  }

  Scenario sc;
  sc.gamma = required_number(doc, "gamma", "scenario");
  if (!(sc.gamma > 0.0)) config_error("'gamma' must be positive");

  const bool explicit_form = doc.contains("vx") || doc.contains("vy") || doc.contains("vz");
  const bool derived_form = doc.contains("purity") || doc.contains("coherence") ||
                            doc.contains("theta") || doc.contains("vz_sign");
  if (explicit_form == derived_form) {
    config_error(
        "give the initial state either as (vx, vy, vz) or as (purity, coherence, theta, vz_sign)");
  }
  if (explicit_form) {
    sc.initial = checked_state(required_number(doc, "vx", "scenario"),
                               required_number(doc, "vy", "scenario"),
                               required_number(doc, "vz", "scenario"));
  } else {
    const double p = required_number(doc, "purity", "scenario");
    const double c = required_number(doc, "coherence", "scenario");
    const double theta = number(doc, "theta").value_or(0.0);
    const double sign = number(doc, "vz_sign").value_or(1.0);
    if (sign != 1.0 && sign != -1.0) config_error("'vz_sign' must be +1 or -1");
    if (!(c >= 0.0) || c > p || p > 1.0) config_error("need 0 <= coherence <= purity <= 1");
    const double rc = std::sqrt(c);
    sc.initial = checked_state(rc * std::cos(theta), rc * std::sin(theta), sign * std::sqrt(p - c));
  }

  sc.horizon_T = number(doc, "horizon_T");
  if (sc.horizon_T && !(*sc.horizon_T > 0.0)) config_error("'horizon_T' must be positive");
  sc.u = number(doc, "u");
  if (sc.u && !(*sc.u > 0.0)) config_error("'u' must be positive");
  sc.sample_step = number(doc, "sample_step").value_or(0.01);
  if (!(sc.sample_step > 0.0)) config_error("'sample_step' must be positive");
  if (const auto it = doc.find("output_path"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) config_error("'output_path' must be a string");
    sc.output_path = it->get<std::string>();
  }
  return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

SynthesisProblem to_problem(const Scenario& scenario) {
  if (!scenario.horizon_T) config_error("missing required key 'horizon_T' in scenario");
  return SynthesisProblem{scenario.gamma, scenario.initial, *scenario.horizon_T, scenario.u};
}

std::string schedule_to_json(const ScheduleRecord& record) {
  nlohmann::ordered_json doc;
  const ControlSchedule& s = record.schedule;
  doc["epsilon"] = s.epsilon;
  doc["theta"] = s.theta;
  doc["u"] = s.u;
  doc["dt1"] = s.dt1;
  doc["dt2"] = s.dt2;
  doc["dt3"] = s.dt3;
  doc["gamma"] = record.gamma;
  if (record.initial) {
    doc["initial"] = {{"vx", record.initial->vx()}, {"vy", record.initial->vy()},
                      {"vz", record.initial->vz()}};
  }
  return doc.dump(2) + "\n";
}

ScheduleRecord parse_schedule(std::string_view json_text) {
  const json doc = parse_object(json_text, "schedule");
  ScheduleRecord rec;
  const double eps = required_number(doc, "epsilon", "schedule");
  if (eps != 1.0 && eps != -1.0) config_error("'epsilon' must be +1 or -1");
  rec.schedule.epsilon = static_cast<int>(eps);
  rec.schedule.theta = required_number(doc, "theta", "schedule");
  rec.schedule.u = required_number(doc, "u", "schedule");
  rec.schedule.dt1 = required_number(doc, "dt1", "schedule");
  rec.schedule.dt2 = required_number(doc, "dt2", "schedule");
  rec.schedule.dt3 = required_number(doc, "dt3", "schedule");
  rec.gamma = required_number(doc, "gamma", "schedule");
  if (!(rec.gamma > 0.0)) config_error("'gamma' must be positive");
  if (const auto it = doc.find("initial"); it != doc.end()) {
    if (!it->is_object()) config_error("'initial' must be an object with vx, vy, vz");
    rec.initial = checked_state(required_number(*it, "vx", "schedule.initial"),
                                required_number(*it, "vy", "schedule.initial"),
                                required_number(*it, "vz", "schedule.initial"));
  }
  try {
    rec.schedule.validate(rec.gamma);
  } catch (const Error& e) {
    config_error(std::string("invalid schedule: ") + e.what());
  }
  return rec;
}

ScheduleRecord load_schedule(const std::string& path) { return parse_schedule(read_file(path)); }

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;
  return fmt::format("{:#.12g}", x);
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : trajectory) {
    const double cols[] = {s.t,        s.state.vx(), s.state.vy(), s.state.vz(), s.purity,
                           s.coherence, s.field.ux, s.field.uy,    s.field.uz};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ',';
      out += format_number(cols[i]);
    }
    out += '\n';
  }
  return out;
}

std::string plot_data(const Trajectory& trajectory, double theta) {
  const double ax = -std::sin(theta);
  const double ay = std::cos(theta);
  std::string out = "# t u_drive v_transverse vz purity coherence\n";
  for (const auto& s : trajectory) {
    const double drive = ax * s.field.ux + ay * s.field.uy;
    const double transverse = ay * s.state.vx() - ax * s.state.vy();
    const double cols[] = {s.t, drive, transverse, s.state.vz(), s.purity, s.coherence};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ' ';
      out += format_number(cols[i]);
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) config_error("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) config_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) config_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace dephasing::io
