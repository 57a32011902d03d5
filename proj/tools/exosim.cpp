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


// exosim command-line entry point.
//
// Exit codes: 0 success, 1 invalid input (configuration, calibration target,
// session data), 2 instability in a single-scenario run, 3 I/O failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "exosim/cli.hpp"
#include "exosim/config.hpp"
#include "exosim/dynamics.hpp"
#include "exosim/errors.hpp"
#include "exosim/format.hpp"
#include "exosim/session.hpp"

namespace fs = std::filesystem;
using namespace exosim;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kUnstable = 2, kIo = 3 };

// --out beats EXOSIM_OUT, which beats the default.
fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("EXOSIM_OUT"); env && *env) return env;
  return "out";
}

// Sweep documents carry the scenario under "base"; overlays apply there.
Json load_config(const std::string& path, const std::vector<std::string>& overlays) {
  Json doc = load_json_file(path);
  const bool sweep = doc.is_object() && doc.contains("base");
  for (const auto& o : overlays) {
    if (sweep)
      doc["base"] = merge_config(std::move(doc["base"]), load_json_file(o));
    else
      doc = merge_config(std::move(doc), load_json_file(o));
  }
  return doc;
}

void report(const ValidationError& e) {
  std::cerr << "invalid input:\n";
  for (const auto& issue : e.issues()) std::cerr << "  " << issue << '\n';
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    report(e);
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand exoskeleton admittance-control simulator and signal pipeline"};
  app.require_subcommand(1);

  std::string out_flag;
  std::vector<std::string> overlays;
  cli::OscillationCriterion osc;
  const auto add_common = [&](CLI::App* sub, bool oscillation) {
    sub->add_option("-o,--out", out_flag, "Output directory (default: $EXOSIM_OUT or ./out)");
    sub->add_option("--overlay", overlays, "JSON document merged over the config (repeatable)");
    if (oscillation) {
      sub->add_option("--osc-extrema", osc.min_extrema,
                      "Prominent extrema per cycle that flag oscillation")
          ->capture_default_str();
      sub->add_option("--osc-prominence", osc.prominence_fraction,
                      "Extremum prominence as a fraction of the cycle peak force")
          ->capture_default_str();
    }
  };

  std::string config;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario; writes trace, load-cell stream and metrics");
  simulate->add_option("config", config, "Scenario JSON")->required();
  add_common(simulate, true);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid; writes sweep.csv");
  sweep->add_option("config", config, "Sweep JSON")->required();
  int jobs = 1;
  sweep->add_option("-j,--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  add_common(sweep, true);

  auto* calibrate = app.add_subcommand("calibrate", "Fit passive damping to a target peak force");
  calibrate->add_option("config", config, "Scenario JSON")->required();
  double target = 1.45, lower = 1e-4, upper = 5.0;
  calibrate->add_option("--target", target, "Target passive peak |f_z| in N")->capture_default_str();
  calibrate->add_option("--lower", lower, "Lower damping bracket")->capture_default_str();
  calibrate->add_option("--upper", upper, "Upper damping bracket")->capture_default_str();
  add_common(calibrate, false);

  auto* sig = app.add_subcommand("signals", "Process a recorded session into cycle averages");
  std::string session_dir;
  sig->add_option("session", session_dir, "Session directory")->required();
  signals::PipelineOptions po;
  sig->add_option("--rate", po.rate, "Analysis rate in Hz")->capture_default_str();
  sig->add_option("--order", po.order, "Butterworth order (2 or 4)")->capture_default_str();
  sig->add_option("--position-cutoff", po.position_cutoff, "Angle lowpass in Hz")->capture_default_str();
  sig->add_option("--force-cutoff", po.force_cutoff, "Force lowpass in Hz")->capture_default_str();
  sig->add_option("--emg-highpass", po.emg_highpass, "EMG highpass in Hz")->capture_default_str();
  sig->add_option("--emg-lowpass", po.emg_lowpass, "EMG lowpass in Hz")->capture_default_str();
  sig->add_option("--bias-samples", po.bias_samples, "Force bias window, 0 to skip")->capture_default_str();
  sig->add_option("--window", po.envelope_window, "RMS window in samples")->capture_default_str();
  sig->add_option("--overlap", po.envelope_overlap, "RMS window overlap in samples")->capture_default_str();
  sig->add_option("--min-separation", po.min_separation, "Minimum cycle length in s")->capture_default_str();
  sig->add_option("--prominence", po.prominence, "Cycle extreme prominence, fraction of range")
      ->capture_default_str();
  sig->add_option("--reference", po.reference, "EMG normalization reference")->capture_default_str();
  sig->add_option("-o,--out", out_flag, "Output directory (default: $EXOSIM_OUT or ./out)");

  auto* validate = app.add_subcommand("validate", "Check a scenario or sweep config and list every problem");
  validate->add_option("config", config, "Scenario or sweep JSON")->required();
  validate->add_option("--overlay", overlays, "JSON document merged over the config (repeatable)");

  auto* columns = app.add_subcommand("columns", "Run a scenario and print the trace as gnuplot columns");
  columns->add_option("config", config, "Scenario JSON")->required();
  columns->add_option("--overlay", overlays, "JSON document merged over the config (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (*simulate) {
    return guarded([&] {
      const auto scenario = dynamics::parse_scenario(load_config(config, overlays));
      const auto run = cli::run_scenario(scenario, osc);
      const auto dir = output_dir(out_flag);
      cli::write_run(run, dir);
      const auto& m = run.metrics;
      std::cout << "peak |f_z| " << format_number(m.peak_fz) << " N";
      if (m.reduction_pct && !m.passive) std::cout << ", reduction " << format_number(*m.reduction_pct) << " %";
      if (m.torque_sign) std::cout << ", " << cli::torque_sign_name(*m.torque_sign);
      std::cout << "\nwrote " << dir.string() << '\n';
      if (m.unstable) {
        std::cerr << "unstable: " << m.diagnostic << '\n';
        return static_cast<int>(kUnstable);
      }
      return static_cast<int>(kOk);
    });
  }
  if (*sweep) {
    return guarded([&] {
      const auto grid = cli::parse_sweep(load_config(config, overlays));
      const auto rows = cli::run_sweep(grid, jobs, osc);
      const auto dir = output_dir(out_flag);
      fs::create_directories(dir);
      std::ofstream out(dir / "sweep.csv");
      if (!out) throw IoError("cannot write " + (dir / "sweep.csv").string());
      cli::write_sweep_csv(rows, out);
      if (!out) throw IoError("failed writing " + (dir / "sweep.csv").string());
      std::cout << rows.size() << " rows, wrote " << (dir / "sweep.csv").string() << '\n';
      return static_cast<int>(kOk);
    });
  }
  if (*calibrate) {
    return guarded([&] {
      const auto scenario = dynamics::parse_scenario(load_config(config, overlays));
      const auto cal = cli::calibrate_passive(scenario, target, lower, upper);
      const auto dir = output_dir(out_flag);
      fs::create_directories(dir);
      const Json overlay = {{"assembly", {{"passive_damping", cal.passive_damping}}}};
      write_text(dir / "calibration.json", overlay.dump(2) + "\n");
      std::cout << "passive_damping " << format_number(cal.passive_damping) << " N·m·s/rad, peak |f_z| "
                << format_number(cal.peak_fz) << " N after " << cal.iterations << " iterations\nwrote "
                << (dir / "calibration.json").string() << '\n';
      return static_cast<int>(kOk);
    });
  }
  if (*sig) {
    return guarded([&] {
      const auto session = signals::load_session(session_dir);
      const auto result = signals::process_session(session, po);
      const auto dir = output_dir(out_flag);
      signals::write_session_result(result, dir);
      std::cout << result.cycles.cycles.size() << " complete cycles, mean range "
                << format_number(result.mean_range * 180.0 / std::numbers::pi) << " deg\nwrote "
                << dir.string() << '\n';
      return static_cast<int>(kOk);
    });
  }
  if (*validate) {
    return guarded([&] {
      const Json doc = load_config(config, overlays);
      if (doc.is_object() && doc.contains("base")) {
        const auto grid = cli::parse_sweep(doc);
        std::cout << "ok: sweep with " << grid.points.size() << " points\n";
      } else {
        dynamics::parse_scenario(doc);
        std::cout << "ok: scenario\n";
      }
      return static_cast<int>(kOk);
    });
  }
  if (*columns) {
    return guarded([&] {
      const auto trace = dynamics::simulate(dynamics::parse_scenario(load_config(config, overlays)));
      write_trace_columns(trace, std::cout);
      return static_cast<int>(trace.unstable ? kUnstable : kOk);
    });
  }
  return kInvalid;
}
