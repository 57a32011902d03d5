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


#include "exosim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "exosim/errors.hpp"
#include "exosim/format.hpp"
#include "exosim/muscles.hpp"

namespace exosim::cli {
namespace {

// Prominence of the maximum of x at i (scipy's definition: height above the
// higher of the two lowest points reachable before a higher sample).
double prominence(const std::vector<double>& x, std::size_t i) {
  double left = x[i];
  for (std::size_t j = i; j-- > 0;) {
    if (x[j] > x[i]) break;
    left = std::min(left, x[j]);
  }
  double right = x[i];
  for (std::size_t j = i + 1; j < x.size(); ++j) {
    if (x[j] > x[i]) break;
    right = std::min(right, x[j]);
  }
  return x[i] - std::max(left, right);
}

int count_maxima(const std::vector<double>& x, double threshold) {
  int count = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(x[i - 1] < x[i])) continue;
    std::size_t ahead = i + 1;
    while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
    if (x[ahead] < x[i] && prominence(x, (i + ahead - 1) / 2) > threshold) ++count;
    i = ahead - 1;
  }
  return count;
}

std::string cell(double v) { return std::isfinite(v) ? format_number(v) : ""; }

}  // namespace

const char* torque_sign_name(TorqueSign sign) {
  switch (sign) {
    case TorqueSign::assistive:
      return "assistive";
    case TorqueSign::resistive:
      return "resistive";
    case TorqueSign::mixed:
      break;
  }
  return "mixed";
}

int count_prominent_extrema(const std::vector<double>& x, double threshold) {
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  return count_maxima(x, threshold) + count_maxima(neg, threshold);
}

int max_cycle_extrema(const SimulationTrace& trace, const OscillationCriterion& criterion) {
  const auto& s = trace.sensor;
  int worst = 0;
  for (int c = 0; c < trace.cycles; ++c) {
    const double lo = c * trace.period, hi = (c + 1) * trace.period;
    std::vector<double> f;
    double peak = 0.0;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      if (s.clock[k] < lo || s.clock[k] >= hi) continue;
      f.push_back(s.fz[k]);
      peak = std::max(peak, std::abs(s.fz[k]));
    }
    if (f.size() < 3 || !(peak > 0.0)) continue;
    worst = std::max(worst, count_prominent_extrema(f, criterion.prominence_fraction * peak));
  }
  return worst;
}

ScenarioMetrics compute_metrics(const SimulationTrace& tr, std::optional<double> passive_peak_fz,
                                const OscillationCriterion& criterion) {
  ScenarioMetrics m;
  m.passive = tr.passive;
  double tau_sum = 0.0, abs_work = 0.0;
  double theta_min = 0.0, theta_max = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (!tr.in_motion(k)) continue;
    m.peak_fz = std::max(m.peak_fz, std::abs(tr.fz[k]));
    m.peak_force = std::max(m.peak_force, std::sqrt(tr.fx[k] * tr.fx[k] + tr.fy[k] * tr.fy[k] +
                                                    tr.fz[k] * tr.fz[k]));
    m.peak_tau = std::max(m.peak_tau, std::abs(tr.tau_motor[k]));
    tau_sum += tr.tau_motor[k];
    theta_min = count == 0 ? tr.theta[k] : std::min(theta_min, tr.theta[k]);
    theta_max = count == 0 ? tr.theta[k] : std::max(theta_max, tr.theta[k]);
    ++count;
    if (tr.closing(k) && k + 1 < tr.size()) {
      const double p = tr.tau_motor[k] * tr.theta_dot[k] * (tr.t[k + 1] - tr.t[k]);
      m.closing_work += p;
      abs_work += std::abs(p);
    }
  }
  if (count > 0) {
    m.mean_tau = tau_sum / static_cast<double>(count);
    m.amplitude = theta_max - theta_min;
  }
  if (!tr.passive) {
    m.torque_sign = std::abs(m.closing_work) <= 0.01 * abs_work ? TorqueSign::mixed
                    : m.closing_work > 0.0                      ? TorqueSign::assistive
                                                                : TorqueSign::resistive;
  }
  if (!tr.muscle_names.empty() && !tr.activation.front().empty()) {
    const auto act = muscles::group_activation_summary(tr);
    m.mean_flexor_act = act.flexor_closing;
    m.mean_extensor_act = act.extensor_opening;
  }
  if (passive_peak_fz && *passive_peak_fz > 0.0) {
    m.reduction_pct = 100.0 * (1.0 - m.peak_fz / *passive_peak_fz);
  }
  m.max_extrema = max_cycle_extrema(tr, criterion);
  m.oscillation = m.max_extrema >= criterion.min_extrema;
  m.unstable = tr.unstable || m.oscillation;
  m.diagnostic = tr.diagnostic;
  if (m.diagnostic.empty() && m.oscillation) {
    m.diagnostic = "contact force oscillates: " + std::to_string(m.max_extrema) +
                   " prominent extrema in one cycle";
  }
  return m;
}

Json to_json(const ScenarioMetrics& m) {
  Json j;
  j["mode"] = m.passive ? "passive" : "admittance";
  j["peak_fz_N"] = m.peak_fz;
  j["peak_force_N"] = m.peak_force;
  j["reduction_pct"] = m.reduction_pct ? Json(*m.reduction_pct) : Json(nullptr);
  j["mean_tau_Nm"] = m.mean_tau;
  j["peak_tau_Nm"] = m.peak_tau;
  j["closing_work_J"] = m.closing_work;
  if (m.torque_sign) j["torque_sign"] = torque_sign_name(*m.torque_sign);
  j["mean_flexor_act"] = m.mean_flexor_act;
  j["mean_extensor_act"] = m.mean_extensor_act;
  j["amplitude_rad"] = m.amplitude;
  j["amplitude_deg"] = m.amplitude * 180.0 / std::numbers::pi;
  j["max_cycle_extrema"] = m.max_extrema;
  j["oscillation"] = m.oscillation;
  j["unstable"] = m.unstable;
  if (!m.diagnostic.empty()) j["diagnostic"] = m.diagnostic;
  return j;
}

dynamics::Scenario passive_twin(const dynamics::Scenario& scenario) {
  dynamics::Scenario twin = scenario;
  twin.controller.mode = controller::Mode::passive;
  return twin;
}

ScenarioRun run_scenario(const dynamics::Scenario& scenario, const OscillationCriterion& criterion) {
  ScenarioRun run{scenario, dynamics::simulate(scenario), {}};
  std::optional<double> baseline;
  if (scenario.controller.mode == controller::Mode::passive) {
    baseline = compute_metrics(run.trace, std::nullopt, criterion).peak_fz;
  } else {
    auto twin = passive_twin(scenario);
    twin.sim.solve_muscles = false;
    baseline = compute_metrics(dynamics::simulate(twin), std::nullopt, criterion).peak_fz;
  }
  run.metrics = compute_metrics(run.trace, baseline, criterion);
  return run;
}

void write_run(const ScenarioRun& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("trace.csv");
    write_trace_csv(run.trace, out);
  }
  {
    auto out = open("kinetics.csv");
    write_sensor_csv(run.trace, out);
  }
  {
    auto out = open("metrics.json");
    out << to_json(run.metrics).dump(2) << '\n';
  }
  auto out = open("scenario.json");
  out << dynamics::to_json(run.scenario).dump(2) << '\n';
  if (!out) throw IoError("failed writing into " + dir.string());
}

SweepGrid parse_sweep(const Json& config) {
  IssueList issues;
  check_sections(config, {"base", "grid", "points", "passive_baseline", "cap"}, issues);
  SweepGrid grid;
  if (config.is_object() && config.contains("base")) {
    try {
      grid.base = dynamics::parse_scenario(config.at("base"));
    } catch (const ValidationError& e) {
      for (const auto& i : e.issues()) issues.add("base." + i);
    }
  }
  const Json* root = config.is_object() ? &config : nullptr;
  ConfigSection top(root, "", issues);
  top.raw("base");
  grid.passive_baseline = top.boolean("passive_baseline", grid.passive_baseline);
  const int cap = top.integer("cap", static_cast<int>(grid.cap));
  if (cap <= 0) top.issue("cap", "must be positive");
  grid.cap = static_cast<std::size_t>(std::max(cap, 1));

  const auto& ctrl = grid.base.controller;
  auto axes = top.child("grid");
  std::vector<double> ms, kps, kds, cs;
  if (axes.present()) {
    ms = axes.numbers("m", {ctrl.mass});
    kps = axes.numbers("kp", {ctrl.kp});
    kds = axes.numbers("kd", {ctrl.kd});
    cs = axes.numbers("c", {ctrl.damping});
    axes.finish();
    for (const auto* list : {&ms, &kps, &kds, &cs}) {
      if (list->empty()) axes.issue("", "axis lists must be non-empty");
    }
    const std::size_t total = ms.size() * kps.size() * kds.size() * cs.size();
    if (total > grid.cap) {
      axes.issue("", std::to_string(total) + " grid points exceed the cap of " +
                         std::to_string(grid.cap));
    } else {
      for (double m : ms)
        for (double kp : kps)
          for (double kd : kds)
            for (double c : cs) grid.points.push_back({m, kp, kd, c});
    }
  }
  if (const Json* pts = top.raw("points")) {
    if (!pts->is_array()) {
      top.issue("points", "must be an array of objects");
    } else {
      for (std::size_t i = 0; i < pts->size(); ++i) {
        ConfigSection p(&(*pts)[i], "points[" + std::to_string(i) + "]", issues);
        GridPoint g{p.number("m", ctrl.mass), p.number("kp", ctrl.kp), p.number("kd", ctrl.kd),
                    p.number("c", ctrl.damping)};
        p.finish();
        grid.points.push_back(g);
      }
    }
  }
  top.finish();
  if (grid.points.empty()) issues.add("sweep needs a grid or at least one point");
  if (grid.points.size() > grid.cap) issues.add("sweep has more points than its cap");
  for (const auto& g : grid.points) {
    if (!(g.m > 0.0) || g.kp < 0.0 || g.kd < 0.0 || g.c < 0.0) {
      issues.add("grid point (m=" + format_number(g.m) + ", kp=" + format_number(g.kp) +
                 ", kd=" + format_number(g.kd) + ", c=" + format_number(g.c) +
                 ") needs m > 0 and kp, kd, c >= 0");
    }
  }
  issues.raise_if_any();
  std::stable_sort(grid.points.begin(), grid.points.end());
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, int jobs, const OscillationCriterion& criterion) {
  // Index 0 is the passive baseline; grid points follow in order.
  const std::size_t n = grid.points.size() + 1;
  std::vector<SweepRow> rows(n);
  const auto task = [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    dynamics::Scenario s = grid.base;
    if (idx == 0) {
      s = passive_twin(grid.base);
      row.passive = true;
    } else {
      row.point = grid.points[idx - 1];
      s.controller.mode = controller::Mode::admittance;
      s.controller.mass = row.point.m;
      s.controller.kp = row.point.kp;
      s.controller.kd = row.point.kd;
      s.controller.damping = row.point.c;
    }
    try {
      row.metrics = compute_metrics(dynamics::simulate(s), std::nullopt, criterion);
    } catch (const std::exception& e) {
      row.metrics = {};
      row.metrics.passive = row.passive;
      row.metrics.unstable = true;
      row.metrics.diagnostic = e.what();
      row.metrics.peak_fz = std::numeric_limits<double>::quiet_NaN();
    }
  };

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t idx = next++; idx < n; idx = next++) task(idx);
  };
  const int workers = std::clamp(jobs, 1, static_cast<int>(n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const double baseline = rows[0].metrics.peak_fz;
  if (std::isfinite(baseline) && baseline > 0.0) {
    for (auto& row : rows) row.metrics.reduction_pct = 100.0 * (1.0 - row.metrics.peak_fz / baseline);
  }
  if (!grid.passive_baseline) {
    rows.erase(rows.begin());
    for (auto& row : rows) row.metrics.reduction_pct.reset();
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "m,kp,kd,c,peak_fz_N,reduction_pct,mean_flexor_act,mean_extensor_act,peak_tau_Nm,"
         "torque_sign,oscillation,unstable\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    if (r.passive) {
      out << "passive,,,,";
    } else {
      out << format_number(r.point.m) << ',' << format_number(r.point.kp) << ','
          << format_number(r.point.kd) << ',' << format_number(r.point.c) << ',';
    }
    out << cell(m.peak_fz) << ',' << (m.reduction_pct ? cell(*m.reduction_pct) : "") << ','
        << cell(m.mean_flexor_act) << ',' << cell(m.mean_extensor_act) << ',' << cell(m.peak_tau)
        << ',' << (m.torque_sign ? torque_sign_name(*m.torque_sign) : "") << ','
        << (m.oscillation ? "true" : "false") << ',' << (m.unstable ? "true" : "false") << '\n';
  }
}

Calibration calibrate_passive(const dynamics::Scenario& scenario, double target, double lower,
                              double upper, double tolerance) {
  if (!(target > 0.0)) {
    throw CalibrationError("target peak force must be positive, got " + format_number(target) +
                           " N (passive damping cannot go below zero)");
  }
  dynamics::Scenario s = passive_twin(scenario);
  s.sim.solve_muscles = false;
  const auto peak = [&](double c) {
    s.assembly.passive_damping = c;
    const auto tr = dynamics::simulate(s);
    if (tr.unstable) throw CalibrationError("passive run diverged at c = " + format_number(c));
    return compute_metrics(tr).peak_fz;
  };
  double f_lo = peak(lower), f_hi = peak(upper);
  if (!(f_lo <= target && target <= f_hi)) {
    throw CalibrationError("target " + format_number(target) + " N outside the bracket: c = " +
                           format_number(lower) + " gives " + format_number(f_lo) + " N, c = " +
                           format_number(upper) + " gives " + format_number(f_hi) + " N");
  }
  Calibration cal;
  double lo = lower, hi = upper;
  for (cal.iterations = 1; cal.iterations <= 100; ++cal.iterations) {
    const double mid = 0.5 * (lo + hi);
    const double f = peak(mid);
    if (f < f_lo || f > f_hi) {
      throw CalibrationError("peak force not monotonic in passive damping near c = " +
                             format_number(mid));
    }
    cal.passive_damping = mid;
    cal.peak_fz = f;
    if (std::abs(f - target) <= tolerance * target) return cal;
    if (f < target) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  return cal;
}

}  // namespace exosim::cli
