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

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "exosim/controller.hpp"

namespace exosim {

/// Uniformly sampled record of one simulation run. Every channel has one
/// entry per recorded sample.
struct SimulationTrace {
  std::vector<double> t;           // s
  std::vector<double> clock;       // s, profile time; < 0 before the motion
  std::vector<double> theta;       // rad
  std::vector<double> theta_dot;   // rad/s
  std::vector<double> tau_motor;   // N·m
  std::vector<double> theta_d;     // rad
  std::vector<double> phi;         // rad
  std::vector<double> phi_dot;     // rad/s
  std::vector<double> phi_ddot;    // rad/s²
  std::vector<double> fx, fy, fz;  // N, ring frame, force on the ring
  std::vector<double> tau_mcp;     // N·m, net MCP torque demand
  std::vector<double> residual;    // N·m, unmet part of tau_mcp
  std::vector<double> vm_x, vm_y;    // m, virtual mass position
  std::vector<double> vm_vx, vm_vy;  // m/s
  std::vector<double> thumb_angle;   // rad, spring-coupled mode only
  // Energy ledger, all cumulative from t = 0 and in J.
  std::vector<double> kinetic;
  std::vector<double> potential;
  std::vector<double> work_in;      // motor + prescribed finger
  std::vector<double> dissipated;

  // Load-cell stream: the contact force and motor angle sampled on the
  // controller clock, as the hardware loop reads them.
  struct Sensor {
    std::vector<double> t, clock, theta, fx, fy, fz;
    double rate = 0.0;  // Hz
  } sensor;

  std::vector<std::string> muscle_names;
  std::vector<bool> muscle_flexor;
  std::vector<std::vector<double>> muscle_force;  // [muscle][sample], N
  std::vector<std::vector<double>> activation;    // [muscle][sample]

  double dt = 0.0;            // physics step
  double period = 0.0;        // s, finger cycle duration
  int cycles = 0;
  bool passive = false;
  double passive_damping = 0.0;
  bool unstable = false;
  std::string diagnostic;
  std::vector<controller::ControllerEvent> events;

  std::size_t size() const { return t.size(); }
  /// True while the finger is inside one of its movement cycles.
  bool in_motion(std::size_t k) const { return clock[k] >= 0.0 && clock[k] < cycles * period; }
  /// True during the first half of a movement cycle.
  bool closing(std::size_t k) const {
    return in_motion(k) && std::fmod(clock[k], period) < 0.5 * period;
  }
};

/// Writes a CSV with a `<channel>_<unit>` header row.
void write_trace_csv(const SimulationTrace& trace, std::ostream& out);

/// Load-cell stream as `t,theta_rad,fx_N,fy_N,fz_N`, the kinetics layout
/// read by the signals pipeline.
void write_sensor_csv(const SimulationTrace& trace, std::ostream& out);

/// Whitespace-separated columns with a `#` header line, for gnuplot.
void write_trace_columns(const SimulationTrace& trace, std::ostream& out);

}  // namespace exosim
