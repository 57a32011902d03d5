// Copyright 2026 The exosim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "exosim/session.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "exosim/config.hpp"
#include "exosim/errors.hpp"
#include "exosim/format.hpp"

namespace exosim::signals {
namespace fs = std::filesystem;
namespace {

constexpr const char* kKineticsHeader = "t,theta_rad,fx_N,fy_N,fz_N";
constexpr const char* kEmgHeader = "t,fdi_mV,ei_mV,edc_mV,fds_mV";

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

// Reads a numeric CSV with an exact header. Problems are appended to
// `issues` (at most a handful per file) and an empty table is returned.
std::vector<std::vector<double>> read_table(const fs::path& path, const std::string& header,
                                            std::vector<std::string>& issues) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string name = path.filename().string();
  const std::size_t width = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    issues.push_back(name + ": header must be '" + header + "'");
    return {};
  }
  std::vector<std::vector<double>> cols(width);
  const std::size_t before = issues.size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::size_t field = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    bool ok = true;
    while (ok) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto r = std::from_chars(p, comma, v);
      if (r.ec != std::errc() || r.ptr != comma || !std::isfinite(v) || field >= width) {
        ok = false;
        break;
      }
      cols[field++].push_back(v);
      if (comma == end) break;
      p = comma + 1;
    }
    if (!ok || field != width) {
      issues.push_back(name + " line " + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " numeric fields");
      if (issues.size() - before >= 5) break;
    }
  }
  if (issues.size() != before) return {};
  if (cols.front().size() < 2) {
    issues.push_back(name + ": needs at least 2 rows");
    return {};
  }
  return cols;
}

double inferred_rate(const std::vector<double>& t, const std::string& name,
                     std::vector<std::string>& issues) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      issues.push_back(name + ": time column must increase strictly (row " + std::to_string(i + 1) +
                       ")");
      return 1.0;
    }
  }
  return static_cast<double>(t.size() - 1) / (t.back() - t.front());
}

void write_averages(const fs::path& path, const std::vector<const CycleAverage*>& cols,
                    const std::vector<std::string>& units) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "phase";
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& n = cols[c]->name;
    const auto& u = units[c];
    out << ',' << n << "_mean" << u << ',' << n << "_var" << (u.empty() ? "" : u + "2") << ','
        << n << "_std" << u;
  }
  out << '\n';
  const std::size_t len = cols.front()->mean.size();
  for (std::size_t j = 0; j < len; ++j) {
    out << format_number(static_cast<double>(j) / static_cast<double>(len));
    for (const auto* c : cols) {
      out << ',' << format_number(c->mean[j]) << ',' << format_number(c->variance[j]) << ','
          << format_number(c->stddev[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

SessionData load_session(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("session directory " + dir.string() + " not found");
  std::vector<std::string> issues;
  SessionData s;

  double kin_rate = 0.0, emg_rate = 0.0;
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    const Json doc = load_json_file(manifest.string());
    if (!doc.is_object()) {
      issues.push_back("manifest.json: must be an object");
    } else {
      for (const auto& [key, value] : doc.items()) {
        if (key == "bpm" && value.is_number()) {
          s.bpm = value.get<double>();
        } else if (key == "subject" && value.is_string()) {
          s.subject = value.get<std::string>();
        } else if (key == "kinetics_rate_hz" && value.is_number() && value.get<double>() > 0.0) {
          kin_rate = value.get<double>();
        } else if (key == "emg_rate_hz" && value.is_number() && value.get<double>() > 0.0) {
          emg_rate = value.get<double>();
        } else {
          issues.push_back("manifest.json: key '" + key + "' unknown or of the wrong type");
        }
      }
    }
  }

  const auto kin = read_table(dir / "kinetics.csv", kKineticsHeader, issues);
  if (!kin.empty()) {
    if (kin_rate == 0.0) kin_rate = inferred_rate(kin[0], "kinetics.csv", issues);
    s.theta = {kin_rate, kin[1], "rad"};
    s.fx = {kin_rate, kin[2], "N"};
    s.fy = {kin_rate, kin[3], "N"};
    s.fz = {kin_rate, kin[4], "N"};
  }
  if (fs::exists(dir / "emg.csv")) {
    const auto emg = read_table(dir / "emg.csv", kEmgHeader, issues);
    if (!emg.empty()) {
      if (emg_rate == 0.0) emg_rate = inferred_rate(emg[0], "emg.csv", issues);
      s.has_emg = true;
      s.fdi = {emg_rate, emg[1], "mV"};
      s.ei = {emg_rate, emg[2], "mV"};
      s.edc = {emg_rate, emg[3], "mV"};
      s.fds = {emg_rate, emg[4], "mV"};
    }
  }
  if (!issues.empty()) throw ValidationError(issues);
  return s;
}

void write_session(const SessionData& s, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "kinetics.csv");
    if (!out) throw IoError("cannot write " + (dir / "kinetics.csv").string());
    out << kKineticsHeader << '\n';
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
      out << format_number(static_cast<double>(i) / s.theta.fs) << ','
          << format_number(s.theta.samples[i]) << ',' << format_number(s.fx.samples[i]) << ','
          << format_number(s.fy.samples[i]) << ',' << format_number(s.fz.samples[i]) << '\n';
    }
  }
  if (s.has_emg) {
    std::ofstream out(dir / "emg.csv");
    if (!out) throw IoError("cannot write " + (dir / "emg.csv").string());
    out << kEmgHeader << '\n';
    for (std::size_t i = 0; i < s.fdi.size(); ++i) {
      out << format_number(static_cast<double>(i) / s.fdi.fs) << ','
          << format_number(s.fdi.samples[i]) << ',' << format_number(s.ei.samples[i]) << ','
          << format_number(s.edc.samples[i]) << ',' << format_number(s.fds.samples[i]) << '\n';
    }
  }
  Json m = {{"bpm", s.bpm}, {"subject", s.subject}, {"kinetics_rate_hz", s.theta.fs}};
  if (s.has_emg) m["emg_rate_hz"] = s.fdi.fs;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

SessionResult process_session(const SessionData& s, const PipelineOptions& o) {
  const auto lowpass = [&](double fc, double rate) {
    return design_filter(o.order, fc, FilterKind::lowpass, rate);
  };
  const auto kinetic = [&](const Channel& raw, double fc, bool bias) {
    Channel c = bias && o.bias_samples > 0 ? remove_bias(raw, o.bias_samples) : raw;
    c = resample(c, o.rate);
    return filter_zero_phase(lowpass(fc, c.fs), c);
  };

  SessionResult r;
  r.bpm = s.bpm;
  r.subject = s.subject;
  const Channel theta = kinetic(s.theta, o.position_cutoff, false);
  r.cycles = segment_cycles(theta, o.min_separation, o.prominence);
  r.theta = average_cycles(r.cycles, theta, "theta");
  r.theta_rate = average_cycles(r.cycles, derivative(theta), "rate");
  r.fx = average_cycles(r.cycles, kinetic(s.fx, o.force_cutoff, true), "fx");
  r.fy = average_cycles(r.cycles, kinetic(s.fy, o.force_cutoff, true), "fy");
  r.fz = average_cycles(r.cycles, kinetic(s.fz, o.force_cutoff, true), "fz");

  double range_sum = 0.0;
  for (const auto& c : r.cycles.cycles) {
    const auto first = theta.samples.begin() + static_cast<long>(c.start);
    const auto [lo, hi] = std::minmax_element(first, theta.samples.begin() + static_cast<long>(c.end) + 1);
    range_sum += *hi - *lo;
  }
  r.mean_range = range_sum / static_cast<double>(r.cycles.cycles.size());

  if (s.has_emg) {
    const Sos hp = design_filter(o.order, o.emg_highpass, FilterKind::highpass, s.fdi.fs);
    const Sos lp = lowpass(o.emg_lowpass, s.fdi.fs);
    const double center = 0.5 * static_cast<double>(o.envelope_window - 1);
    std::vector<CycleAverage> env;
    const std::pair<const char*, const Channel*> muscles[] = {
        {"fdi", &s.fdi}, {"ei", &s.ei}, {"edc", &s.edc}, {"fds", &s.fds}};
    for (const auto& [name, raw] : muscles) {
      Channel c = filter_zero_phase(lp, filter_zero_phase(hp, *raw));
      c = rectify(resample(c, o.rate));
      env.push_back(average_cycles(r.cycles, rms_envelope(c, o.envelope_window, o.envelope_overlap),
                                   name, center));
    }
    r.emg = normalize_emg(env, o.reference);
  }
  return r;
}

void write_session_result(const SessionResult& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_averages(dir / "position.csv", {&r.theta}, {"_rad"});
  write_averages(dir / "velocity.csv", {&r.theta_rate}, {"_rad_s"});
  write_averages(dir / "force.csv", {&r.fx, &r.fy, &r.fz}, {"_N", "_N", "_N"});
  if (!r.emg.empty()) {
    std::vector<const CycleAverage*> cols;
    for (const auto& e : r.emg) cols.push_back(&e);
    write_averages(dir / "emg.csv", cols, std::vector<std::string>(cols.size(), ""));
  }
  Json report;
  report["cycles"] = r.cycles.cycles.size();
  report["rate_hz"] = r.cycles.fs;
  report["bpm"] = r.bpm;
  report["subject"] = r.subject;
  report["mean_range_deg"] = r.mean_range * 180.0 / std::numbers::pi;
  Json starts = Json::array(), durations = Json::array();
  for (const auto& c : r.cycles.cycles) {
    starts.push_back(static_cast<double>(c.start) / r.cycles.fs);
    durations.push_back(static_cast<double>(c.end - c.start) / r.cycles.fs);
  }
  report["cycle_start_s"] = starts;
  report["cycle_duration_s"] = durations;
  std::ofstream out(dir / "cycles.json");
  if (!out) throw IoError("cannot write " + (dir / "cycles.json").string());
  out << report.dump(2) << '\n';
}

}  // namespace exosim::signals
