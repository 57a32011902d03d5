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

#include "exosim/controller.hpp"

#include <algorithm>
#include <cmath>

#include "exosim/errors.hpp"

namespace exosim::controller {

namespace {

constexpr std::size_t kMaxEvents = 200;

}  // namespace

AdmittanceParams parse_controller(ConfigSection s) {
  AdmittanceParams p;
  auto mode = s.choice("mode", "admittance", {"admittance", "passive"});
  p.mode = mode == "passive" ? Mode::passive : Mode::admittance;
  p.mass = s.number("m", p.mass);
  p.damping = s.number("c", p.damping);
  p.kp = s.number("kp", p.kp);
  p.kd = s.number("kd", p.kd);
  if (s.has("period") && s.raw("period")->is_string()) {
    auto period = s.choice("period", "every-step", {"every-step"});
    p.every_step = period == "every-step";
  } else {
    p.period = s.number("period", p.period);
  }
  p.torque_limit = s.number("torque_limit", p.torque_limit);
  auto limits = s.angles("theta_limits", {p.theta_min, p.theta_max});
  if (limits.size() == 2) {
    p.theta_min = limits[0];
    p.theta_max = limits[1];
  } else {
    s.issue("theta_limits", "expected [min, max]");
  }
  p.ik_epsilon = s.number("ik_epsilon", p.ik_epsilon);
  auto space = s.choice("task_space", "arc", {"arc", "plane"});
  p.task_space = space == "plane" ? TaskSpace::plane : TaskSpace::arc;
  auto hold = s.choice("hold", "first-order", {"zero-order", "first-order"});
  p.hold = hold == "first-order" ? Hold::first_order : Hold::zero_order;
  s.finish();
  return p;
}

void validate(const AdmittanceParams& p) {
  std::vector<std::string> issues;
  if (!(p.mass > 0.0)) issues.emplace_back("controller.m: must be positive");
  if (!(p.damping >= 0.0)) issues.emplace_back("controller.c: must be non-negative");
  if (!(p.kp >= 0.0)) issues.emplace_back("controller.kp: must be non-negative");
  if (!(p.kd >= 0.0)) issues.emplace_back("controller.kd: must be non-negative");
  if (!(p.period > 0.0)) issues.emplace_back("controller.period: must be positive");
  if (!(p.torque_limit > 0.0)) issues.emplace_back("controller.torque_limit: must be positive");
  if (!(p.theta_min < 0.0 && p.theta_max > 0.0)) {
    issues.emplace_back("controller.theta_limits: must bracket zero");
  }
  if (!(p.ik_epsilon > 0.0)) issues.emplace_back("controller.ik_epsilon: must be positive");
  if (!issues.empty()) throw ValidationError(issues);
}

Json to_json(const AdmittanceParams& p) {
  Json j = {{"mode", p.mode == Mode::passive ? "passive" : "admittance"},
            {"m", p.mass},
            {"c", p.damping},
            {"kp", p.kp},
            {"kd", p.kd},
            {"torque_limit", p.torque_limit},
            {"theta_limits", Json::array({p.theta_min, p.theta_max})},
            {"ik_epsilon", p.ik_epsilon},
            {"task_space", p.task_space == TaskSpace::plane ? "plane" : "arc"},
            {"hold", p.hold == Hold::first_order ? "first-order" : "zero-order"}};
  if (p.every_step) {
    j["period"] = "every-step";
  } else {
    j["period"] = p.period;
  }
  return j;
}

void integrate_mass(double& position, double& velocity, double force, double mass,
                    double damping, double dt) {
  velocity += dt / mass * (force - damping * velocity);
  position += dt * velocity;
}

VirtualMassState virtual_mass_step(const VirtualMassState& state, Vec2 force,
                                   const AdmittanceParams& params, double dt) {
  if (!(params.mass > 0.0)) throw ValidationError("controller.m: must be positive");
  VirtualMassState next = state;
  integrate_mass(next.position.x, next.velocity.x, force.x, params.mass, params.damping, dt);
  integrate_mass(next.position.y, next.velocity.y, force.y, params.mass, params.damping, dt);
  return next;
}

double ik_to_motor_angle(Vec2 p, const model::ExoAssembly& assembly,
                         const AdmittanceParams& params) {
  const Vec2 r = p - assembly.gear_axis();
  if (norm(r) <= params.ik_epsilon) {
    throw IkSingularityError("ik_to_motor_angle: target on the gear axis");
  }
  // The initial axis-to-ring ray is world +x.
  const double ring_angle = std::atan2(r.y, r.x);
  const double theta = ring_angle / -model::kIndexGearRatio;
  return std::clamp(theta, params.theta_min, params.theta_max);
}

double pd_torque(double theta_d, double theta, double theta_dot, const AdmittanceParams& p) {
  const double tau = p.kp * (theta_d - theta) - p.kd * theta_dot;
  return std::clamp(tau, -p.torque_limit, p.torque_limit);
}

double passive_torque(double theta_dot, double c_passive) { return -c_passive * theta_dot; }

AdmittanceController::AdmittanceController(const AdmittanceParams& params,
                                           const model::ExoAssembly& assembly)
    : params_(params), assembly_(assembly) {
  mass_.position = assembly_.gear_axis() + Vec2{assembly_.geometry.exo_ring_radius, 0.0};
}

void AdmittanceController::log(double t, std::string message) {
  if (events_.size() < kMaxEvents) events_.push_back({t, std::move(message)});
}

void AdmittanceController::update(double t, Vec3 local_force, Vec2 world_force, double h) {
  const double radius = assembly_.geometry.exo_ring_radius;
  const Vec2 axis = assembly_.gear_axis();
  const double sign = -model::kIndexGearRatio;
  double theta_d = held_theta_d_;
  double rate = 0.0;

  if (params_.task_space == TaskSpace::arc) {
    // Ring-frame z is the direction of closing, which is the arc tangent.
    integrate_mass(arc_, arc_speed_, local_force.z, params_.mass, params_.damping, h);
    const double lo = params_.theta_min * radius;
    const double hi = params_.theta_max * radius;
    if (arc_ < lo || arc_ > hi) {
      arc_ = std::clamp(arc_, lo, hi);
      arc_speed_ = 0.0;
      if (!at_limit_) log(t, "virtual mass reached a joint limit");
      at_limit_ = true;
    } else {
      at_limit_ = false;
    }
    const double ring_angle = sign * arc_ / radius;
    mass_.position = axis + radius * unit_at(ring_angle);
    mass_.velocity = arc_speed_ * normal_at(ring_angle);
    rate = arc_speed_ / radius / sign;
  } else {
    mass_ = virtual_mass_step(mass_, world_force, params_, h);
    const Vec2 r = mass_.position - axis;
    const double r2 = dot(r, r);
    if (r2 > 0.0) rate = cross(r, mass_.velocity) / r2 / sign;
  }

  try {
    theta_d = ik_to_motor_angle(mass_.position, assembly_, params_);
    if (singular_) log(t, "IK recovered");
    singular_ = false;
  } catch (const IkSingularityError&) {
    if (!singular_) log(t, "IK singularity, holding last desired angle");
    singular_ = true;
    rate = 0.0;
  }
  if (theta_d <= params_.theta_min || theta_d >= params_.theta_max) rate = 0.0;
  held_theta_d_ = theta_d;
  held_rate_ = rate;
  held_time_ = t;
}

double AdmittanceController::tick(double t, Vec3 local_force, Vec2 world_force, double theta,
                                  double theta_dot) {
  if (params_.mode == Mode::passive) {
    return passive_torque(theta_dot, assembly_.passive_damping);
  }
  if (params_.every_step) {
    const double h = updates_ == 0 ? 0.0 : t - held_time_;
    if (h > 0.0) update(t, local_force, world_force, h);
    else held_time_ = t;
    ++updates_;
  } else {
    const double h = params_.period;
    // Update k happens at t = k·h; compare against the product, not a running
    // sum, so long runs do not drift.
    while (t + 1e-9 * h >= static_cast<double>(updates_) * h) {
      update(t, local_force, world_force, h);
      ++updates_;
    }
  }
  theta_d_ = held_theta_d_;
  if (params_.hold == Hold::first_order) {
    theta_d_ = std::clamp(held_theta_d_ + held_rate_ * (t - held_time_), params_.theta_min,
                          params_.theta_max);
  }
  return pd_torque(theta_d_, theta, theta_dot, params_);
}

}  // namespace exosim::controller
