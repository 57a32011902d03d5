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
#include "exosim/vec.hpp"

namespace exosim::model {

/// Gear-frame rotation of each part per unit motor rotation. The three gears
/// are equal, so the index part counter-rotates and the thumb part follows
/// the motor. The world frame is chosen so that positive angles close the
/// hand on the index side; in it the index ring turns by -kIndexGearRatio*θ.
inline constexpr double kMotorGearRatio = 1.0;
inline constexpr double kIndexGearRatio = -1.0;
inline constexpr double kThumbGearRatio = 1.0;

/// Mass properties of one rigid part. Axes: x fore-aft, y vertical (the
/// rotation axis of every joint in the planar model), z lateral.
struct BodyParams {
  double mass = 0.0;    // kg
  double moi_xx = 0.0;  // kg·m²
  double moi_yy = 0.0;
  double moi_zz = 0.0;
};

inline constexpr double kKgCm2 = 1e-4;  // kg·cm² -> kg·m²

BodyParams default_base();
BodyParams default_index_part();
BodyParams default_thumb_part();

enum class ThumbMode { lumped, spring_coupled };

struct GeometryConfig {
  double finger_ring_radius = 0.060;  // L_f, MCP axis to index ring
  double axis_offset = 0.048;         // b, MCP axis to index gear axis
  double exo_ring_radius = 0.108;     // L_e, index gear axis to ring
  ThumbMode thumb_mode = ThumbMode::lumped;
  double thumb_ring_radius = 0.050;  // thumb gear axis to thumb ring
};

/// Passive thumb joint used in spring-coupled mode. The joint sits on the
/// thumb gear axis and is held near extension by a torsional spring.
struct ThumbJoint {
  double inertia = 5e-5;     // kg·m²
  double stiffness = 0.5;    // N·m/rad
  double damping = 0.01;     // N·m·s/rad
};

struct ExoAssembly {
  BodyParams base = default_base();
  BodyParams index_part = default_index_part();
  BodyParams thumb_part = default_thumb_part();
  double motor_gear_inertia = 1e-5;  // reflected rotor + gearhead, kg·m²
  GeometryConfig geometry;
  double passive_damping = 0.3;      // N·m·s/rad, commanded in passive mode only
  double joint_friction = 2e-3;      // viscous gear-train friction, N·m·s/rad
  double finger_inertia = 1.0e-4;    // index finger about MCP, kg·m²
  double finger_mass = 0.04;         // kg
  double thumb_link_inertia = 5e-6;  // added to I_eff in lumped mode
  ThumbJoint thumb_joint;

  /// Inertia of the single motor DOF, about the vertical axis.
  double effective_inertia() const;
  double total_part_mass() const;
  /// Index gear axis in the MCP-centred world frame.
  Vec2 gear_axis() const { return {-geometry.axis_offset, 0.0}; }
};

enum class ProfileShape { smooth_cosine, triangular };

struct MotionProfile {
  double amplitude = 0.43633231299858238;  // 25°
  double period = 1.5;                     // s
  ProfileShape shape = ProfileShape::smooth_cosine;
  int cycles = 1;
};

struct JointSample {
  double angle = 0.0;  // rad
  double rate = 0.0;   // rad/s
  double accel = 0.0;  // rad/s²
};

struct PointState {
  Vec2 position;
  Vec2 velocity;
};

/// Finger-side and exo-side index ring points.
struct AttachmentStates {
  PointState finger;
  PointState exo;
};

/// Reads the `assembly`, `geometry` and `profile` sections of a document.
/// Unknown keys inside those sections are recorded in `issues`.
ExoAssembly parse_assembly(ConfigSection assembly, ConfigSection geometry, IssueList& issues);
MotionProfile parse_profile(ConfigSection profile, IssueList& issues);

/// Builds and validates an assembly from a full configuration document.
/// Other top-level sections are ignored here.
ExoAssembly build_assembly(const Json& config);

/// Throws ValidationError / GeometryError when an invariant fails.
void validate(const ExoAssembly& assembly);
void validate(const MotionProfile& profile);

/// Small-angle dθ/dφ of the collinear-axis geometry.
double kinematic_ratio(const ExoAssembly& assembly);

/// Finger angle and derivatives at time t; t is wrapped into one cycle.
JointSample prescribed_motion(const MotionProfile& profile, double t);

AttachmentStates ring_attachment_states(const ExoAssembly& assembly, double theta,
                                        double theta_dot, double phi, double phi_dot);

/// Motor angle at which the exo ring point is closest to the finger ring
/// point for finger angle φ. The points only meet exactly at φ = 0 unless
/// b = 0, since the two arcs have different centres.
double aligned_motor_angle(const ExoAssembly& assembly, double phi);

Json to_json(const ExoAssembly& assembly);
Json to_json(const MotionProfile& profile);

}  // namespace exosim::model
