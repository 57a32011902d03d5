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

#include "exosim/config.hpp"
#include "exosim/model.hpp"
#include "exosim/vec.hpp"

namespace exosim::contact {

/// Linear spring-damper between a finger point and a ring point, one
/// independent channel per axis of the ring-fixed frame.
struct ContactElement {
  Vec3 stiffness{500.0, 10000.0, 10000.0};  // N/m
  Vec3 damping{80.0, 200.0, 200.0};         // N·s/m
  Vec3 rest_offset{};                       // m
};

ContactElement parse_contact(ConfigSection section);
void validate(const ContactElement& element, const char* name = "contact");
Json to_json(const ContactElement& element);

/// Force on the exo-side point. The finger-side point receives the exact
/// negation. Throws NumericError on non-finite input.
Vec3 contact_force(const ContactElement& element, Vec3 displacement, Vec3 velocity);

/// Moment about the vertical axis through `origin` of an in-plane force
/// applied at `point`.
double ring_torque(Vec2 force, Vec2 point, Vec2 origin);

/// Finger-minus-exo separation expressed in a frame that rotates with the
/// ring at angle `frame_angle` (x radial from the gear axis, z along the
/// direction of closing). Velocities are derivatives taken in that frame.
struct RingFrameState {
  Vec3 displacement;
  Vec3 velocity;
  Vec2 radial;      // world direction of local x
  Vec2 tangential;  // world direction of local z
};

RingFrameState ring_frame_state(const model::PointState& finger, const model::PointState& exo,
                                double frame_angle, double frame_rate);

/// Expresses a local force as a world in-plane vector (y is out of plane).
inline Vec2 to_world(const RingFrameState& frame, Vec3 local) {
  return local.x * frame.radial + local.z * frame.tangential;
}

/// Power dissipated by the damper channels.
double damper_power(const ContactElement& element, Vec3 velocity);
/// Elastic energy stored in the spring channels.
double spring_energy(const ContactElement& element, Vec3 displacement);

}  // namespace exosim::contact
