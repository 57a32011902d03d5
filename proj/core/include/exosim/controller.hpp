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

#include <string>
#include <vector>

#include "exosim/config.hpp"
#include "exosim/model.hpp"
#include "exosim/vec.hpp"

namespace exosim::controller {

enum class Mode { admittance, passive };

/// Where the virtual end-effector mass moves. `arc` constrains it to the
/// circle the ring centre can reach and drives it with the movement-direction
/// force; `plane` lets it roam the horizontal plane under the full in-plane
/// force.
enum class TaskSpace { arc, plane };

/// How the desired angle evolves between controller updates.
enum class Hold { zero_order, first_order };

struct AdmittanceParams {
  Mode mode = Mode::admittance;
  double mass = 0.01;           // kg
  double damping = 0.01;        // N·s/m
  double kp = 1.0;              // N·m/rad
  double kd = 0.0;              // N·m·s/rad
  double period = 1.0 / 155.0;  // s
  bool every_step = false;      // update at every physics step instead
  double torque_limit = 3.0;    // N·m
  double theta_min = -0.35;     // rad
  double theta_max = 0.35;      // rad
  double ik_epsilon = 1e-6;     // m
  TaskSpace task_space = TaskSpace::arc;
  Hold hold = Hold::first_order;
};

AdmittanceParams parse_controller(ConfigSection section);
void validate(const AdmittanceParams& params);
Json to_json(const AdmittanceParams& params);

struct VirtualMassState {
  Vec2 position;  // m, world frame
  Vec2 velocity;  // m/s
};

/// One semi-implicit Euler step of m·a = f - c·v on each axis.
VirtualMassState virtual_mass_step(const VirtualMassState& state, Vec2 force,
                                   const AdmittanceParams& params, double dt);

/// Scalar form of the same update, used on the arc.
void integrate_mass(double& position, double& velocity, double force, double mass,
                    double damping, double dt);

/// Four-quadrant angle of `p` about the index gear axis, as a motor angle,
/// clamped to the joint limits. Throws IkSingularityError within ik_epsilon
/// of the axis.
double ik_to_motor_angle(Vec2 p, const model::ExoAssembly& assembly,
                         const AdmittanceParams& params);

double pd_torque(double theta_d, double theta, double theta_dot, const AdmittanceParams& params);
double passive_torque(double theta_dot, double c_passive);

struct ControllerEvent {
  double time = 0.0;
  std::string message;
};

/// Admittance loop: force -> virtual mass -> IK -> PD, with the mass and
/// the desired angle updated on the controller clock and the PD law applied
/// at every physics step.
class AdmittanceController {
 public:
  AdmittanceController(const AdmittanceParams& params, const model::ExoAssembly& assembly);

  /// `local_force` is the sensed force on the ring in the ring frame,
  /// `world_force` the same force in world coordinates.
  double tick(double t, Vec3 local_force, Vec2 world_force, double theta, double theta_dot);

  double theta_desired() const { return theta_d_; }
  const VirtualMassState& mass_state() const { return mass_; }
  const std::vector<ControllerEvent>& events() const { return events_; }
  long updates() const { return updates_; }

 private:
  void update(double t, Vec3 local_force, Vec2 world_force, double h);
  void log(double t, std::string message);

  AdmittanceParams params_;
  model::ExoAssembly assembly_;
  VirtualMassState mass_;
  double arc_ = 0.0;        // arc length of the mass along the ring circle
  double arc_speed_ = 0.0;
  double held_theta_d_ = 0.0;
  double held_rate_ = 0.0;  // dθ_d/dt at the last update
  double held_time_ = 0.0;
  double theta_d_ = 0.0;
  long updates_ = 0;
  bool at_limit_ = false;
  bool singular_ = false;
  std::vector<ControllerEvent> events_;
};

}  // namespace exosim::controller
