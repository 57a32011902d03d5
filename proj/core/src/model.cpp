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

#include "exosim/model.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "exosim/errors.hpp"

namespace exosim::model {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

BodyParams parse_body(ConfigSection section, const BodyParams& fallback) {
  BodyParams body;
  body.mass = section.number("mass", fallback.mass);
  body.moi_xx = section.number("moi_xx", fallback.moi_xx);
  body.moi_yy = section.number("moi_yy", fallback.moi_yy);
  body.moi_zz = section.number("moi_zz", fallback.moi_zz);
  section.finish();
  return body;
}

void check_body(const BodyParams& body, const std::string& name,
                std::vector<std::string>& issues) {
  if (!(body.mass > 0.0)) issues.push_back(name + ".mass: must be positive");
  if (body.moi_xx < 0.0 || body.moi_yy < 0.0 || body.moi_zz < 0.0) {
    issues.push_back(name + ": moments of inertia must be non-negative");
  }
}

Json body_json(const BodyParams& body) {
  return {{"mass", body.mass},
          {"moi_xx", body.moi_xx},
          {"moi_yy", body.moi_yy},
          {"moi_zz", body.moi_zz}};
}

}  // namespace

BodyParams default_base() { return {0.122, 6.62e-1 * kKgCm2, 8.39e-1 * kKgCm2, 6.94e-1 * kKgCm2}; }
BodyParams default_index_part() {
  return {0.0295, 6.11e-2 * kKgCm2, 5.56e-1 * kKgCm2, 5.58e-1 * kKgCm2};
}
BodyParams default_thumb_part() {
  return {0.0064, 9.20e-3 * kKgCm2, 6.51e-2 * kKgCm2, 6.43e-2 * kKgCm2};
}

double ExoAssembly::effective_inertia() const {
  double inertia = motor_gear_inertia + index_part.moi_yy + thumb_part.moi_yy;
  if (geometry.thumb_mode == ThumbMode::lumped) inertia += thumb_link_inertia;
  return inertia;
}

double ExoAssembly::total_part_mass() const {
  return base.mass + index_part.mass + thumb_part.mass;
}

ExoAssembly parse_assembly(ConfigSection assembly, ConfigSection geometry, IssueList&) {
  ExoAssembly out;
  out.base = parse_body(assembly.child("base"), out.base);
  out.index_part = parse_body(assembly.child("index_part"), out.index_part);
  out.thumb_part = parse_body(assembly.child("thumb_part"), out.thumb_part);
  out.motor_gear_inertia = assembly.number("motor_gear_inertia", out.motor_gear_inertia);
  out.passive_damping = assembly.number("passive_damping", out.passive_damping);
  out.joint_friction = assembly.number("joint_friction", out.joint_friction);
  out.finger_inertia = assembly.number("finger_inertia", out.finger_inertia);
  out.finger_mass = assembly.number("finger_mass", out.finger_mass);
  out.thumb_link_inertia = assembly.number("thumb_link_inertia", out.thumb_link_inertia);
  auto thumb = assembly.child("thumb_joint");
  out.thumb_joint.inertia = thumb.number("inertia", out.thumb_joint.inertia);
  out.thumb_joint.stiffness = thumb.number("stiffness", out.thumb_joint.stiffness);
  out.thumb_joint.damping = thumb.number("damping", out.thumb_joint.damping);
  thumb.finish();
  assembly.finish();

  auto& g = out.geometry;
  g.finger_ring_radius = geometry.number("finger_ring_radius", g.finger_ring_radius);
  g.axis_offset = geometry.number("axis_offset", g.axis_offset);
  g.exo_ring_radius =
      geometry.number("exo_ring_radius", g.finger_ring_radius + g.axis_offset);
  g.thumb_ring_radius = geometry.number("thumb_ring_radius", g.thumb_ring_radius);
  auto mode = geometry.choice("thumb_mode", "lumped", {"lumped", "spring-coupled"});
  g.thumb_mode = mode == "lumped" ? ThumbMode::lumped : ThumbMode::spring_coupled;
  geometry.finish();
  return out;
}

MotionProfile parse_profile(ConfigSection profile, IssueList&) {
  MotionProfile out;
  out.amplitude = profile.angle("amplitude", out.amplitude);
  out.period = profile.number("period", out.period);
  auto shape = profile.choice("shape", "smooth-cosine", {"smooth-cosine", "triangular"});
  out.shape = shape == "triangular" ? ProfileShape::triangular : ProfileShape::smooth_cosine;
  out.cycles = profile.integer("cycles", out.cycles);
  profile.finish();
  return out;
}

ExoAssembly build_assembly(const Json& config) {
  IssueList issues;
  const Json* root = &config;
  if (config.is_null()) root = nullptr;
  ConfigSection top(root, "", issues);
  auto assembly = parse_assembly(top.child("assembly"), top.child("geometry"), issues);
  issues.raise_if_any();
  validate(assembly);
  return assembly;
}

void validate(const ExoAssembly& a) {
  std::vector<std::string> issues;
  check_body(a.base, "assembly.base", issues);
  check_body(a.index_part, "assembly.index_part", issues);
  check_body(a.thumb_part, "assembly.thumb_part", issues);
  if (a.motor_gear_inertia < 0.0) issues.emplace_back("assembly.motor_gear_inertia: must be non-negative");
  if (a.passive_damping < 0.0) issues.emplace_back("assembly.passive_damping: must be non-negative");
  if (a.joint_friction < 0.0) issues.emplace_back("assembly.joint_friction: must be non-negative");
  if (!(a.finger_inertia > 0.0)) issues.emplace_back("assembly.finger_inertia: must be positive");
  if (!(a.finger_mass > 0.0)) issues.emplace_back("assembly.finger_mass: must be positive");
  if (a.thumb_link_inertia < 0.0) issues.emplace_back("assembly.thumb_link_inertia: must be non-negative");
  if (!(a.thumb_joint.inertia > 0.0)) issues.emplace_back("assembly.thumb_joint.inertia: must be positive");
  if (a.thumb_joint.stiffness < 0.0 || a.thumb_joint.damping < 0.0) {
    issues.emplace_back("assembly.thumb_joint: stiffness and damping must be non-negative");
  }
  if (!(a.effective_inertia() > 0.0)) issues.emplace_back("assembly: effective inertia must be positive");
  const auto& g = a.geometry;
  if (!(g.finger_ring_radius > 0.0)) issues.emplace_back("geometry.finger_ring_radius: must be positive");
  if (!(g.axis_offset >= 0.0)) issues.emplace_back("geometry.axis_offset: must be non-negative");
  if (!(g.thumb_ring_radius > 0.0)) issues.emplace_back("geometry.thumb_ring_radius: must be positive");
  if (!issues.empty()) throw ValidationError(issues);
  if (std::abs(g.exo_ring_radius - (g.finger_ring_radius + g.axis_offset)) > 1e-9) {
    throw GeometryError(
        "geometry.exo_ring_radius: must equal finger_ring_radius + axis_offset so the rings "
        "coincide at assembly");
  }
}

void validate(const MotionProfile& p) {
  std::vector<std::string> issues;
  if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude)) issues.emplace_back("profile.amplitude: must be non-negative");
  if (!(p.period > 0.0) || !std::isfinite(p.period)) issues.emplace_back("profile.period: must be positive");
  if (p.cycles < 1) issues.emplace_back("profile.cycles: must be at least 1");
  if (!issues.empty()) throw ValidationError(issues);
}

double kinematic_ratio(const ExoAssembly& a) {
  return a.geometry.finger_ring_radius / a.geometry.exo_ring_radius;
}

JointSample prescribed_motion(const MotionProfile& p, double t) {
  double u = std::fmod(std::max(t, 0.0), p.period);
  const double amp = p.amplitude;
  if (p.shape == ProfileShape::smooth_cosine) {
    const double w = kTwoPi / p.period;
    return {0.5 * amp * (1.0 - std::cos(w * u)), 0.5 * amp * w * std::sin(w * u),
            0.5 * amp * w * w * std::cos(w * u)};
  }
  // Triangular: constant rate, acceleration impulses at the turnarounds are
  // not represented.
  const double half = 0.5 * p.period;
  const double slope = amp / half;
  if (u < half) return {slope * u, slope, 0.0};
  return {slope * (p.period - u), -slope, 0.0};
}

AttachmentStates ring_attachment_states(const ExoAssembly& a, double theta, double theta_dot,
                                        double phi, double phi_dot) {
  const auto& g = a.geometry;
  const double ring_angle = -kIndexGearRatio * theta;
  const double ring_rate = -kIndexGearRatio * theta_dot;
  AttachmentStates s;
  s.finger.position = g.finger_ring_radius * unit_at(phi);
  s.finger.velocity = (g.finger_ring_radius * phi_dot) * normal_at(phi);
  s.exo.position = a.gear_axis() + g.exo_ring_radius * unit_at(ring_angle);
  s.exo.velocity = (g.exo_ring_radius * ring_rate) * normal_at(ring_angle);
  return s;
}

double aligned_motor_angle(const ExoAssembly& a, double phi) {
  Vec2 r = a.geometry.finger_ring_radius * unit_at(phi) - a.gear_axis();
  return std::atan2(r.y, r.x) / -kIndexGearRatio;
}

Json to_json(const ExoAssembly& a) {
  const auto& g = a.geometry;
  return {
      {"assembly",
       {{"base", body_json(a.base)},
        {"index_part", body_json(a.index_part)},
        {"thumb_part", body_json(a.thumb_part)},
        {"motor_gear_inertia", a.motor_gear_inertia},
        {"passive_damping", a.passive_damping},
        {"joint_friction", a.joint_friction},
        {"finger_inertia", a.finger_inertia},
        {"finger_mass", a.finger_mass},
        {"thumb_link_inertia", a.thumb_link_inertia},
        {"thumb_joint",
         {{"inertia", a.thumb_joint.inertia},
          {"stiffness", a.thumb_joint.stiffness},
          {"damping", a.thumb_joint.damping}}}}},
      {"geometry",
       {{"finger_ring_radius", g.finger_ring_radius},
        {"axis_offset", g.axis_offset},
        {"exo_ring_radius", g.exo_ring_radius},
        {"thumb_ring_radius", g.thumb_ring_radius},
        {"thumb_mode", g.thumb_mode == ThumbMode::lumped ? "lumped" : "spring-coupled"}}}};
}

Json to_json(const MotionProfile& p) {
  return {{"amplitude", p.amplitude},
          {"period", p.period},
          {"shape", p.shape == ProfileShape::triangular ? "triangular" : "smooth-cosine"},
          {"cycles", p.cycles}};
}

}  // namespace exosim::model
