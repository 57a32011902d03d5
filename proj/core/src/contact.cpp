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

#include "exosim/contact.hpp"

#include <string>
#include <vector>

#include "exosim/errors.hpp"

namespace exosim::contact {

namespace {

Vec3 parse_triplet(ConfigSection& section, const std::string& key, Vec3 fallback) {
  auto values = section.numbers(key, {fallback.x, fallback.y, fallback.z});
  if (values.size() != 3) {
    section.issue(key, "expected three values (x, y, z)");
    return fallback;
  }
  return {values[0], values[1], values[2]};
}

}  // namespace

ContactElement parse_contact(ConfigSection section) {
  ContactElement e;
  e.stiffness = parse_triplet(section, "stiffness", e.stiffness);
  e.damping = parse_triplet(section, "damping", e.damping);
  e.rest_offset = parse_triplet(section, "rest_offset", e.rest_offset);
  section.finish();
  return e;
}

void validate(const ContactElement& e, const char* name) {
  std::vector<std::string> issues;
  const std::string prefix(name);
  if (!is_finite(e.stiffness) || e.stiffness.x < 0 || e.stiffness.y < 0 || e.stiffness.z < 0) {
    issues.push_back(prefix + ".stiffness: must be finite and non-negative");
  }
  if (!is_finite(e.damping) || e.damping.x < 0 || e.damping.y < 0 || e.damping.z < 0) {
    issues.push_back(prefix + ".damping: must be finite and non-negative");
  }
  if (!is_finite(e.rest_offset)) issues.push_back(prefix + ".rest_offset: must be finite");
  if (!issues.empty()) throw ValidationError(issues);
}

Json to_json(const ContactElement& e) {
  auto v = [](Vec3 a) { return Json::array({a.x, a.y, a.z}); };
  return {{"stiffness", v(e.stiffness)}, {"damping", v(e.damping)}, {"rest_offset", v(e.rest_offset)}};
}

Vec3 contact_force(const ContactElement& e, Vec3 d, Vec3 v) {
  if (!is_finite(d) || !is_finite(v)) throw NumericError("contact_force: non-finite input");
  return {e.stiffness.x * (d.x - e.rest_offset.x) + e.damping.x * v.x,
          e.stiffness.y * (d.y - e.rest_offset.y) + e.damping.y * v.y,
          e.stiffness.z * (d.z - e.rest_offset.z) + e.damping.z * v.z};
}

double ring_torque(Vec2 force, Vec2 point, Vec2 origin) { return cross(point - origin, force); }

RingFrameState ring_frame_state(const model::PointState& finger, const model::PointState& exo,
                                double frame_angle, double frame_rate) {
  RingFrameState s;
  s.radial = unit_at(frame_angle);
  s.tangential = normal_at(frame_angle);
  const Vec2 d = finger.position - exo.position;
  const Vec2 dv = finger.velocity - exo.velocity;
  const double dr = dot(d, s.radial);
  const double dt = dot(d, s.tangential);
  s.displacement = {dr, 0.0, dt};
  // d/dt of the projections: the basis turns at frame_rate.
  s.velocity = {dot(dv, s.radial) + frame_rate * dt, 0.0,
                dot(dv, s.tangential) - frame_rate * dr};
  return s;
}

double damper_power(const ContactElement& e, Vec3 v) {
  return e.damping.x * v.x * v.x + e.damping.y * v.y * v.y + e.damping.z * v.z * v.z;
}

double spring_energy(const ContactElement& e, Vec3 d) {
  const Vec3 s = d - e.rest_offset;
  return 0.5 * (e.stiffness.x * s.x * s.x + e.stiffness.y * s.y * s.y + e.stiffness.z * s.z * s.z);
}

}  // namespace exosim::contact
