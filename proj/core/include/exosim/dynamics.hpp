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

#include <vector>

#include "exosim/config.hpp"
#include "exosim/contact.hpp"
#include "exosim/controller.hpp"
#include "exosim/model.hpp"
#include "exosim/muscles.hpp"
#include "exosim/trace.hpp"

namespace exosim::dynamics {

/// How the finger gets going before the first cycle.
enum class SettleMode {
  rest,  // finger held still for `settle` seconds, then the profile starts
  ramp,  // profile starts at t = 0 with its amplitude eased in over `settle`
  ease,  // profile clock accelerates from standstill to real time over `settle`
};

struct SimSettings {
  double dt = 1e-4;        // s; shortened so the controller period is a whole number of steps
  double duration = 0.0;   // s; 0 means settle + cycles · period
  int stride = 10;         // record every stride-th step
  double settle = 0.1;     // s
  SettleMode settle_mode = SettleMode::ease;
  bool solve_muscles = true;
  double blowup_angle = 10.0;  // rad; |θ| beyond this counts as divergence
};

struct Scenario {
  model::ExoAssembly assembly;
  model::MotionProfile profile;
  contact::ContactElement contact;
  contact::ContactElement thumb_contact;
  controller::AdmittanceParams controller;
  std::vector<muscles::Muscle> muscles = muscles::default_muscles();
  int muscle_p = 2;
  double muscle_w = 100.0;
  SimSettings sim;

  double duration() const;
};

/// Parses every section of a scenario document and validates the result.
/// All problems are reported in one ValidationError.
Scenario parse_scenario(const Json& config);
void validate(const Scenario& scenario);
Json to_json(const Scenario& scenario);

/// Net MCP torque the muscles must supply: I_f·φ̈ minus the moment of the
/// ring-on-finger force.
double finger_inverse_dynamics(double phi_ddot, double tau_ring, double finger_inertia);

struct ExoState {
  double theta = 0.0;
  double theta_dot = 0.0;
};

/// One semi-implicit Euler step of the motor DOF. `damping_slope` is
/// ∂τ_contact/∂θ̇ (≤ 0); that part of the contact torque is taken implicitly
/// so stiff dampers on a light rotor stay stable. With a zero slope this is
/// the plain explicit update.
ExoState exo_forward_step(double tau_motor, double tau_contact, double inertia,
                          const ExoState& state, double dt, double damping_slope = 0.0);

/// Profile time at simulation time t: negative before the motion starts,
/// at or beyond cycles · period once it has ended.
double profile_clock(const Scenario& scenario, double t);

/// Finger angle, rate and acceleration at simulation time t, including the
/// settle-in period and the rest after the last cycle.
model::JointSample finger_motion(const Scenario& scenario, double t);

/// Runs the hybrid simulation. Divergence does not throw: the returned
/// trace is cut at the failing step with `unstable` set.
SimulationTrace simulate(const Scenario& scenario);

struct EnergyAudit {
  std::vector<double> residual;       // J, per recorded sample
  double max_residual = 0.0;          // J
  std::vector<double> cycle_drift;    // relative, one per cycle
  double max_cycle_drift = 0.0;
  double min_dissipation_rate = 0.0;  // W, most negative step; ≥ 0 if passive
};

EnergyAudit energy_audit(const SimulationTrace& trace);

}  // namespace exosim::dynamics
