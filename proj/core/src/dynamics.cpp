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

#include "exosim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exosim/errors.hpp"

namespace exosim::dynamics {

namespace {

// Quintic smoothstep and its first two derivatives on [0, 1].
model::JointSample smoothstep(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  return {u * u * u * (10.0 - 15.0 * u + 6.0 * u * u), 30.0 * u * u * (1.0 - u) * (1.0 - u),
          60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)};
}

struct ContactSample {
  contact::RingFrameState frame;
  Vec3 local;    // force on the ring, ring frame
  Vec2 world;    // same force, world frame
  double torque; // moment about the gear axis through the finger point
};

ContactSample index_contact(const Scenario& s, double theta, double theta_dot,
                            const model::JointSample& phi) {
  const auto& a = s.assembly;
  const auto pts = model::ring_attachment_states(a, theta, theta_dot, phi.angle, phi.rate);
  const double sign = -model::kIndexGearRatio;
  ContactSample c;
  c.frame = contact::ring_frame_state(pts.finger, pts.exo, sign * theta, sign * theta_dot);
  c.local = contact::contact_force(s.contact, c.frame.displacement, c.frame.velocity);
  c.world = contact::to_world(c.frame, c.local);
  // Taking the moment at the finger point includes the couple the element
  // transmits through the ring, which keeps the exchange energy-consistent.
  c.torque = sign * contact::ring_torque(c.world, pts.finger.position, a.gear_axis());
  return c;
}

ContactSample thumb_contact(const Scenario& s, double theta, double theta_dot, double psi,
                            double psi_dot) {
  // The thumb lives in its own closing-positive plane with the joint on the
  // thumb gear axis; both rings sit at the same radius.
  const double r = s.assembly.geometry.thumb_ring_radius;
  const double ring = model::kThumbGearRatio * theta;
  const double ring_rate = model::kThumbGearRatio * theta_dot;
  model::PointState finger{r * unit_at(psi), (r * psi_dot) * normal_at(psi)};
  model::PointState exo{r * unit_at(ring), (r * ring_rate) * normal_at(ring)};
  ContactSample c;
  c.frame = contact::ring_frame_state(finger, exo, ring, ring_rate);
  c.local = contact::contact_force(s.thumb_contact, c.frame.displacement, c.frame.velocity);
  c.world = contact::to_world(c.frame, c.local);
  c.torque = model::kThumbGearRatio * contact::ring_torque(c.world, finger.position, Vec2{});
  return c;
}

const char* settle_mode_name(SettleMode m) {
  switch (m) {
    case SettleMode::ramp:
      return "ramp";
    case SettleMode::ease:
      return "ease";
    case SettleMode::rest:
      break;
  }
  return "rest";
}

template <typename T>
void need(std::vector<std::string>& issues, bool ok, T&& message) {
  if (!ok) issues.emplace_back(std::forward<T>(message));
}

}  // namespace

double Scenario::duration() const {
  if (sim.duration > 0.0) return sim.duration;
  return sim.settle + profile.cycles * profile.period;
}

Scenario parse_scenario(const Json& config) {
  IssueList issues;
  check_sections(config, {"assembly", "geometry", "profile", "contact", "thumb_contact",
                          "controller", "muscles", "sim"},
                 issues);
  const Json* root = config.is_object() ? &config : nullptr;
  ConfigSection top(root, "", issues);
  Scenario s;
  s.assembly = model::parse_assembly(top.child("assembly"), top.child("geometry"), issues);
  s.profile = model::parse_profile(top.child("profile"), issues);
  s.contact = contact::parse_contact(top.child("contact"));
  s.thumb_contact = contact::parse_contact(top.child("thumb_contact"));
  s.controller = controller::parse_controller(top.child("controller"));

  auto ms = top.child("muscles");
  s.muscles = muscles::parse_muscles(ms, ms.raw("set"), s.assembly.geometry.thumb_mode);
  s.muscle_p = ms.integer("p", s.muscle_p);
  s.muscle_w = ms.number("w", s.muscle_w);
  ms.finish();

  auto sim = top.child("sim");
  s.sim.dt = sim.number("dt", s.sim.dt);
  s.sim.duration = sim.number("duration", s.sim.duration);
  s.sim.stride = sim.integer("stride", s.sim.stride);
  s.sim.settle = sim.number("settle", s.sim.settle);
  auto mode = sim.choice("settle_mode", "ease", {"rest", "ramp", "ease"});
  s.sim.settle_mode = mode == "ramp"   ? SettleMode::ramp
                      : mode == "ease" ? SettleMode::ease
                                       : SettleMode::rest;
  s.sim.solve_muscles = sim.boolean("solve_muscles", s.sim.solve_muscles);
  s.sim.blowup_angle = sim.number("blowup_angle", s.sim.blowup_angle);
  sim.finish();

  issues.raise_if_any();
  validate(s);
  return s;
}

void validate(const Scenario& s) {
  model::validate(s.assembly);
  model::validate(s.profile);
  contact::validate(s.contact, "contact");
  contact::validate(s.thumb_contact, "thumb_contact");
  controller::validate(s.controller);
  muscles::validate(s.muscles);
  std::vector<std::string> issues;
  need(issues, s.muscle_p >= 2 && s.muscle_p % 2 == 0, "muscles.p: must be an even integer >= 2");
  need(issues, s.muscle_w > 0.0, "muscles.w: must be positive");
  need(issues, s.sim.dt > 0.0, "sim.dt: must be positive");
  need(issues, s.sim.stride >= 1, "sim.stride: must be at least 1");
  need(issues, s.sim.settle >= 0.0, "sim.settle: must be non-negative");
  need(issues, s.sim.duration >= 0.0, "sim.duration: must be non-negative");
  need(issues, s.sim.blowup_angle > 0.0, "sim.blowup_angle: must be positive");
  need(issues, s.duration() >= s.profile.period, "sim.duration: must cover at least one cycle");
  need(issues, s.controller.every_step || s.controller.period >= s.sim.dt,
       "controller.period: must not be shorter than sim.dt");
  if (!issues.empty()) throw ValidationError(issues);
}

Json to_json(const Scenario& s) {
  Json j = model::to_json(s.assembly);
  j["profile"] = model::to_json(s.profile);
  j["contact"] = contact::to_json(s.contact);
  j["thumb_contact"] = contact::to_json(s.thumb_contact);
  j["controller"] = controller::to_json(s.controller);
  j["muscles"] = {{"set", muscles::to_json(s.muscles)}, {"p", s.muscle_p}, {"w", s.muscle_w}};
  j["sim"] = {{"dt", s.sim.dt},
              {"duration", s.sim.duration},
              {"stride", s.sim.stride},
              {"settle", s.sim.settle},
              {"settle_mode", settle_mode_name(s.sim.settle_mode)},
              {"solve_muscles", s.sim.solve_muscles},
              {"blowup_angle", s.sim.blowup_angle}};
  return j;
}

double finger_inverse_dynamics(double phi_ddot, double tau_ring, double finger_inertia) {
  return finger_inertia * phi_ddot - tau_ring;
}

ExoState exo_forward_step(double tau_motor, double tau_contact, double inertia,
                          const ExoState& state, double dt, double damping_slope) {
  // tau_contact(θ̇') ≈ tau_contact + slope·(θ̇' - θ̇), solved for θ̇'.
  const double rhs = state.theta_dot + dt * (tau_motor + tau_contact - damping_slope * state.theta_dot) / inertia;
  ExoState next;
  next.theta_dot = rhs / (1.0 - dt * damping_slope / inertia);
  next.theta = state.theta + dt * next.theta_dot;
  return next;
}

double profile_clock(const Scenario& s, double t) {
  const double settle = s.sim.settle;
  switch (s.sim.settle_mode) {
    case SettleMode::rest:
      return t - settle;
    case SettleMode::ramp:
      return t;
    case SettleMode::ease:
      if (settle <= 0.0 || t >= settle) return t - 0.5 * settle;
      if (t <= 0.0) return t;
      {
        const double u = t / settle;
        // Integral of the quintic smoothstep.
        return settle * u * u * u * u * (2.5 - 3.0 * u + u * u);
      }
  }
  return t;
}

model::JointSample finger_motion(const Scenario& s, double t) {
  const double clock = profile_clock(s, t);
  if (clock < 0.0 || clock >= s.profile.cycles * s.profile.period) return {};
  auto m = model::prescribed_motion(s.profile, clock);
  const double settle = s.sim.settle;
  if (settle <= 0.0 || t >= settle) return m;
  const double inv = 1.0 / settle;
  const auto e = smoothstep(t * inv);
  if (s.sim.settle_mode == SettleMode::ramp) {
    const double e1 = e.rate * inv;
    const double e2 = e.accel * inv * inv;
    m = {e.angle * m.angle, e1 * m.angle + e.angle * m.rate,
         e2 * m.angle + 2.0 * e1 * m.rate + e.angle * m.accel};
  } else if (s.sim.settle_mode == SettleMode::ease) {
    // Chain rule through the eased clock: its rate is the smoothstep.
    const double rate = e.angle;
    const double accel = e.rate * inv;
    m = {m.angle, m.rate * rate, m.accel * rate * rate + m.rate * accel};
  }
  return m;
}

SimulationTrace simulate(const Scenario& s) {
  const auto& a = s.assembly;
  // The step is shortened, if needed, so a controller period is a whole
  // number of steps and every update lands on the grid.
  const long per_tick =
      s.controller.every_step
          ? 1
          : std::max(1L, static_cast<long>(std::ceil(s.controller.period / s.sim.dt - 1e-9)));
  const double dt = s.controller.every_step ? s.sim.dt : s.controller.period / per_tick;
  const long steps = std::lround(s.duration() / dt);
  const double inertia = a.effective_inertia();
  const bool thumb = a.geometry.thumb_mode == model::ThumbMode::spring_coupled;
  const bool passive = s.controller.mode == controller::Mode::passive;
  const double thumb_r = a.geometry.thumb_ring_radius;

  SimulationTrace tr;
  tr.dt = dt;
  tr.sensor.rate = 1.0 / (dt * static_cast<double>(per_tick));
  tr.period = s.profile.period;
  tr.cycles = s.profile.cycles;
  tr.passive = passive;
  tr.passive_damping = a.passive_damping;
  const std::size_t nm = s.muscles.size();
  for (const auto& m : s.muscles) {
    tr.muscle_names.push_back(m.name);
    tr.muscle_flexor.push_back(m.group == muscles::Group::flexor);
  }
  tr.muscle_force.assign(nm, {});
  tr.activation.assign(nm, {});
  const std::size_t expected = static_cast<std::size_t>(steps / s.sim.stride + 1);
  for (auto* ch : {&tr.t, &tr.clock, &tr.theta, &tr.theta_dot, &tr.tau_motor, &tr.theta_d,
                   &tr.phi, &tr.phi_dot, &tr.phi_ddot, &tr.fx, &tr.fy, &tr.fz, &tr.tau_mcp,
                   &tr.residual, &tr.vm_x, &tr.vm_y, &tr.vm_vx, &tr.vm_vy, &tr.kinetic,
                   &tr.potential, &tr.work_in, &tr.dissipated}) {
    ch->reserve(expected);
  }

  controller::AdmittanceController ctrl(s.controller, a);
  // Controller updates and load-cell reads happen every `per_tick` steps.
  ExoState exo;
  double psi = 0.0, psi_dot = 0.0;
  double work_in = 0.0, dissipated = 0.0;
  auto muscle_problem = muscles::make_problem(s.muscles, 0.0, s.muscle_p, s.muscle_w);

  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const bool on_tick = i % per_tick == 0;

    // The exo rate is carried on the half-step grid: the rate entering a step
    // belongs to t - dt/2 and the implicit damping solves for the rate at
    // t + dt/2. Sampling the finger rate at the same instants keeps the
    // damper from seeing a dt-sized slip.
    const auto phi = finger_motion(s, t);
    model::JointSample phi_prev = phi;
    phi_prev.rate = finger_motion(s, t - 0.5 * dt).rate;
    model::JointSample phi_mid = phi;
    phi_mid.rate = finger_motion(s, t + 0.5 * dt).rate;

    const auto pts = model::ring_attachment_states(a, exo.theta, exo.theta_dot, phi.angle, phi.rate);
    const auto c = index_contact(s, exo.theta, exo.theta_dot, phi_prev);
    const auto c_step = index_contact(s, exo.theta, exo.theta_dot, phi_mid);
    double tau_load = c_step.torque - a.joint_friction * exo.theta_dot;
    double slope = index_contact(s, exo.theta, exo.theta_dot + 1.0, phi_mid).torque -
                   c_step.torque - a.joint_friction;
    ContactSample ct;
    double thumb_slope = 0.0;
    if (thumb) {
      ct = thumb_contact(s, exo.theta, exo.theta_dot, psi, psi_dot);
      tau_load += ct.torque;
      slope += thumb_contact(s, exo.theta, exo.theta_dot + 1.0, psi, psi_dot).torque - ct.torque;
      // Torque on the thumb link is the reaction at its own point.
      const double own = -cross(thumb_r * unit_at(psi), ct.world);
      const auto bumped = thumb_contact(s, exo.theta, exo.theta_dot, psi, psi_dot + 1.0);
      thumb_slope = -cross(thumb_r * unit_at(psi), bumped.world) - own - a.thumb_joint.damping;
    }

    if (on_tick) {
      tr.sensor.t.push_back(t);
      tr.sensor.clock.push_back(profile_clock(s, t));
      tr.sensor.theta.push_back(exo.theta);
      tr.sensor.fx.push_back(c.local.x);
      tr.sensor.fy.push_back(c.local.y);
      tr.sensor.fz.push_back(c.local.z);
    }
    const double tau_motor = ctrl.tick(t, c.local, c.world, exo.theta, exo.theta_dot);
    // The motor's rate feedback acts continuously, so it joins the implicit
    // slope like the dampers do.
    if (passive) {
      slope -= a.passive_damping;
    } else if (std::abs(tau_motor) < s.controller.torque_limit) {
      slope -= s.controller.kd;
    }

    // Energy at the start of the step; flows are integrated over it.
    double kinetic = 0.5 * inertia * exo.theta_dot * exo.theta_dot;
    double potential = contact::spring_energy(s.contact, c.frame.displacement);
    double loss = contact::damper_power(s.contact, c.frame.velocity) +
                  a.joint_friction * exo.theta_dot * exo.theta_dot;
    if (thumb) {
      kinetic += 0.5 * a.thumb_joint.inertia * psi_dot * psi_dot;
      potential += contact::spring_energy(s.thumb_contact, ct.frame.displacement) +
                   0.5 * a.thumb_joint.stiffness * psi * psi;
      loss += contact::damper_power(s.thumb_contact, ct.frame.velocity) +
              a.thumb_joint.damping * psi_dot * psi_dot;
    }
    const double power_in = tau_motor * exo.theta_dot + dot(c.world, pts.finger.velocity);

    if (i % s.sim.stride == 0) {
      const double tau_ring = cross(pts.finger.position, -c.world);
      const double tau_mcp = finger_inverse_dynamics(phi.accel, tau_ring, a.finger_inertia);
      const auto& vm = ctrl.mass_state();
      tr.t.push_back(t);
      tr.clock.push_back(profile_clock(s, t));
      tr.theta.push_back(exo.theta);
      tr.theta_dot.push_back(exo.theta_dot);
      tr.tau_motor.push_back(tau_motor);
      tr.theta_d.push_back(passive ? 0.0 : ctrl.theta_desired());
      tr.phi.push_back(phi.angle);
      tr.phi_dot.push_back(phi.rate);
      tr.phi_ddot.push_back(phi.accel);
      tr.fx.push_back(c.local.x);
      tr.fy.push_back(c.local.y);
      tr.fz.push_back(c.local.z);
      tr.tau_mcp.push_back(tau_mcp);
      tr.vm_x.push_back(vm.position.x);
      tr.vm_y.push_back(vm.position.y);
      tr.vm_vx.push_back(vm.velocity.x);
      tr.vm_vy.push_back(vm.velocity.y);
      if (thumb) tr.thumb_angle.push_back(psi);
      tr.kinetic.push_back(kinetic);
      tr.potential.push_back(potential);
      tr.work_in.push_back(work_in);
      tr.dissipated.push_back(dissipated);
      if (s.sim.solve_muscles) {
        muscle_problem.tau_d[0] = tau_mcp;
        const auto sol = muscles::solve_muscle_forces(muscle_problem);
        for (std::size_t m = 0; m < nm; ++m) {
          tr.muscle_force[m].push_back(sol.forces[m]);
          tr.activation[m].push_back(sol.activations[m]);
        }
        tr.residual.push_back(sol.residual[0]);
      } else {
        for (std::size_t m = 0; m < nm; ++m) {
          tr.muscle_force[m].push_back(0.0);
          tr.activation[m].push_back(0.0);
        }
        tr.residual.push_back(tau_mcp);
      }
    }
    work_in += power_in * dt;
    dissipated += loss * dt;

    exo = exo_forward_step(tau_motor, tau_load, inertia, exo, dt, slope);
    if (thumb) {
      const double own = -cross(thumb_r * unit_at(psi), ct.world) -
                         a.thumb_joint.stiffness * psi - a.thumb_joint.damping * psi_dot;
      const auto next = exo_forward_step(0.0, own, a.thumb_joint.inertia, {psi, psi_dot}, dt,
                                         thumb_slope);
      psi = next.theta;
      psi_dot = next.theta_dot;
    }

    if (!std::isfinite(exo.theta) || !std::isfinite(exo.theta_dot) ||
        std::abs(exo.theta) > s.sim.blowup_angle || !std::isfinite(psi)) {
      tr.unstable = true;
      std::ostringstream msg;
      msg << "exo state diverged at t = " << t + dt << " s (theta = " << exo.theta << " rad)";
      tr.diagnostic = msg.str();
      break;
    }
  }
  tr.events = ctrl.events();
  return tr;
}

EnergyAudit energy_audit(const SimulationTrace& tr) {
  EnergyAudit out;
  const std::size_t n = tr.size();
  if (n == 0) return out;
  const double e0 = tr.kinetic[0] + tr.potential[0];
  out.residual.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = tr.kinetic[k] + tr.potential[k];
    out.residual[k] = std::abs(e - e0 - tr.work_in[k] + tr.dissipated[k]);
    out.max_residual = std::max(out.max_residual, out.residual[k]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double step_dt = tr.t[k] - tr.t[k - 1];
    if (step_dt > 0.0) {
      out.min_dissipation_rate =
          std::min(out.min_dissipation_rate, (tr.dissipated[k] - tr.dissipated[k - 1]) / step_dt);
    }
  }
  // Drift per cycle, relative to the largest energy held during that cycle.
  if (tr.period > 0.0) {
    for (int c = 0; c < tr.cycles; ++c) {
      const double lo = c * tr.period;
      const double hi = lo + tr.period;
      std::size_t first = n, last = n;
      double peak = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (tr.clock[k] < lo || tr.clock[k] > hi) continue;
        if (first == n) first = k;
        last = k;
        peak = std::max(peak, tr.kinetic[k] + tr.potential[k]);
      }
      if (first == n || peak <= 0.0) continue;
      auto signed_residual = [&](std::size_t k) {
        return tr.kinetic[k] + tr.potential[k] - e0 - tr.work_in[k] + tr.dissipated[k];
      };
      const double drift = std::abs(signed_residual(last) - signed_residual(first)) / peak;
      out.cycle_drift.push_back(drift);
      out.max_cycle_drift = std::max(out.max_cycle_drift, drift);
    }
  }
  return out;
}

}  // namespace exosim::dynamics
