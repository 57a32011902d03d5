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


#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exosim/config.hpp"
#include "exosim/dynamics.hpp"
#include "exosim/trace.hpp"

namespace exosim::cli {

enum class TorqueSign { assistive, resistive, mixed };
const char* torque_sign_name(TorqueSign sign);

/// Thresholds of the oscillation flag. A cycle oscillates when its force
/// has at least `min_extrema` local extrema with prominence above
/// `prominence_fraction` of the cycle's peak absolute force.
struct OscillationCriterion {
  int min_extrema = 5;
  double prominence_fraction = 0.1;
};

struct ScenarioMetrics {
  bool passive = false;
  double peak_fz = 0.0;       // N, in-motion samples
  double peak_force = 0.0;    // N, |f| over the same samples
  std::optional<double> reduction_pct;
  double mean_tau = 0.0;      // N·m
  double peak_tau = 0.0;      // N·m, largest |τ_motor|
  double closing_work = 0.0;  // J, ∫τ_motor·θ̇ over closing phases
  std::optional<TorqueSign> torque_sign;  // absent in passive mode
  double mean_flexor_act = 0.0;    // closing phases
  double mean_extensor_act = 0.0;  // opening phases
  double amplitude = 0.0;          // rad, max - min motor angle in motion
  int max_extrema = 0;             // most prominent extrema in any cycle
  bool oscillation = false;
  bool unstable = false;
  std::string diagnostic;
};

/// Counts local maxima and minima of x whose topographic prominence
/// exceeds `threshold`.
int count_prominent_extrema(const std::vector<double>& x, double threshold);

/// Evaluates the oscillation criterion cycle by cycle on the load-cell
/// tangential force. Returns the largest per-cycle extrema count.
int max_cycle_extrema(const SimulationTrace& trace, const OscillationCriterion& criterion = {});

/// `passive_peak_fz` (N) enables the reduction percentage. Work within 1% of
/// the closing-phase absolute motor work counts as mixed.
ScenarioMetrics compute_metrics(const SimulationTrace& trace,
                                std::optional<double> passive_peak_fz = std::nullopt,
                                const OscillationCriterion& criterion = {});
Json to_json(const ScenarioMetrics& metrics);

/// The same scenario with the controller switched to passive mode.
dynamics::Scenario passive_twin(const dynamics::Scenario& scenario);

struct ScenarioRun {
  dynamics::Scenario scenario;
  SimulationTrace trace;
  ScenarioMetrics metrics;
};

/// Simulates a scenario and, unless it is passive itself, its passive twin
/// as the reduction baseline.
ScenarioRun run_scenario(const dynamics::Scenario& scenario,
                         const OscillationCriterion& criterion = {});

/// Writes trace.csv, kinetics.csv (load-cell stream), metrics.json and the
/// resolved scenario.json into `dir`.
void write_run(const ScenarioRun& run, const std::filesystem::path& dir);

struct GridPoint {
  double m = 0.0;
  double kp = 0.0;
  double kd = 0.0;
  double c = 0.0;
  auto operator<=>(const GridPoint&) const = default;
};

/// Sweep definition. `points` holds the cartesian product of the axis lists
/// plus any explicit points, sorted lexicographically by (m, kp, kd, c).
struct SweepGrid {
  dynamics::Scenario base;
  std::vector<GridPoint> points;
  bool passive_baseline = true;
  std::size_t cap = 1000;
};

/// Document layout: {"base": <scenario>, "grid": {"m": [...], "kp": [...],
/// "kd": [...], "c": [...]}, "points": [{"m", "kp", "kd", "c"}...],
/// "passive_baseline": bool, "cap": int}. Missing axes default to the base
/// scenario's value. Problems are reported together as a ValidationError.
SweepGrid parse_sweep(const Json& config);

struct SweepRow {
  bool passive = false;
  GridPoint point;
  ScenarioMetrics metrics;
};

/// Runs every grid point on `jobs` worker threads. Rows come back in grid
/// order after the passive baseline row (when enabled) whatever the
/// completion order. A point that throws is reported as unstable.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, int jobs = 1,
                                const OscillationCriterion& criterion = {});

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct Calibration {
  double passive_damping = 0.0;  // N·m·s/rad
  double peak_fz = 0.0;          // N, passive run at the returned damping
  int iterations = 0;
};

/// Bisection on passive_damping over [lower, upper] until the passive peak
/// |f_z| is within `tolerance` (relative) of the target. Throws
/// CalibrationError when the target lies outside the bracket or the peak
/// force is not monotonic in the damping.
Calibration calibrate_passive(const dynamics::Scenario& scenario, double target,
                              double lower = 1e-4, double upper = 5.0, double tolerance = 1e-4);

}  // namespace exosim::cli
