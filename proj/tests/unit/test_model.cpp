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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "exosim/errors.hpp"
#include "exosim/model.hpp"

namespace exosim::model {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

TEST(Model, IndexPartInertiaDefault) {
  EXPECT_NEAR(default_index_part().moi_yy, 5.56e-5, 1e-12);
}

TEST(Model, EmptyConfigUsesDefaults) {
  const ExoAssembly a = build_assembly(Json::object());
  // Default part masses sum to 0.1579, exactly on the inclusive ±1e-4 edge.
  EXPECT_LE(std::abs(a.total_part_mass() - 0.158), 1e-4 + 1e-15);
  EXPECT_DOUBLE_EQ(a.geometry.finger_ring_radius, 0.060);
  EXPECT_DOUBLE_EQ(a.geometry.axis_offset, 0.048);
  EXPECT_DOUBLE_EQ(a.geometry.exo_ring_radius, 0.108);
  EXPECT_EQ(a.geometry.thumb_mode, ThumbMode::lumped);
}

TEST(Model, NullConfigUsesDefaults) {
  EXPECT_LE(std::abs(build_assembly(Json()).total_part_mass() - 0.158), 1e-4 + 1e-15);
}

TEST(Model, NegativeMassRejected) {
  const Json cfg = {{"assembly", {{"base", {{"mass", -1.0}}}}}};
  EXPECT_THROW(build_assembly(cfg), ValidationError);
}

TEST(Model, NegativeInertiaRejected) {
  const Json cfg = {{"assembly", {{"index_part", {{"moi_yy", -1e-6}}}}}};
  EXPECT_THROW(build_assembly(cfg), ValidationError);
}

TEST(Model, UnknownKeysRejected) {
  EXPECT_THROW(build_assembly({{"assembly", {{"bogus", 1}}}}), ValidationError);
  EXPECT_THROW(build_assembly({{"geometry", {{"finger_length", 0.06}}}}), ValidationError);
}

TEST(Model, InconsistentRingRadiusIsGeometryError) {
  const Json cfg = {{"geometry", {{"exo_ring_radius", 0.100}}}};
  EXPECT_THROW(build_assembly(cfg), GeometryError);
  const Json tiny = {{"geometry", {{"exo_ring_radius", 0.108 + 5e-10}}}};
  EXPECT_NO_THROW(build_assembly(tiny));
}

TEST(Model, NegativeAxisOffsetRejected) {
  const Json cfg = {{"geometry", {{"axis_offset", -0.01}, {"exo_ring_radius", 0.05}}}};
  EXPECT_THROW(build_assembly(cfg), ValidationError);
}

TEST(Model, ExoRingRadiusFollowsOffsets) {
  const Json cfg = {{"geometry", {{"finger_ring_radius", 0.07}, {"axis_offset", 0.03}}}};
  EXPECT_NEAR(build_assembly(cfg).geometry.exo_ring_radius, 0.10, 1e-15);
}

TEST(Model, KinematicRatioDefault) {
  EXPECT_NEAR(kinematic_ratio(ExoAssembly{}), 0.060 / 0.108, 1e-15);
  EXPECT_NEAR(kinematic_ratio(ExoAssembly{}), 0.5556, 1e-4);
}

TEST(Model, KinematicRatioCoincidentAxes) {
  const auto a = build_assembly({{"geometry", {{"axis_offset", 0.0}}}});
  EXPECT_DOUBLE_EQ(kinematic_ratio(a), 1.0);
  EXPECT_NEAR(aligned_motor_angle(a, 0.3), 0.3, 1e-15);
}

// Bisection on the angle at which the exo ring point lies on the ray from
// the gear axis through the finger ring point.
double coincidence_oracle(double phi) {
  const double lf = 0.060, b = 0.048;
  const double fx = lf * std::cos(phi), fy = lf * std::sin(phi);
  auto side = [&](double th) {
    const double ex = std::cos(th), ey = std::sin(th);
    return ex * fy - ey * (fx + b);
  };
  double lo = 0.0, hi = phi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (side(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Model, AlignedMotorAngleMatchesCoincidence) {
  const double theta = aligned_motor_angle(ExoAssembly{}, 25.0 * kDeg);
  EXPECT_NEAR(theta, coincidence_oracle(25.0 * kDeg), 1e-12);
  EXPECT_NEAR(theta, 0.2424, 5e-4);
  EXPECT_NEAR(theta / kDeg, 13.9, 0.05);
}

TEST(Model, AlignedMotorAngleOverSweep) {
  for (double deg = -30.0; deg <= 30.0; deg += 2.5) {
    const double phi = deg * kDeg;
    const double theta = aligned_motor_angle(ExoAssembly{}, phi);
    if (deg == 0.0) {
      EXPECT_EQ(theta, 0.0);
      continue;
    }
    EXPECT_NEAR(theta, deg > 0 ? coincidence_oracle(phi) : -coincidence_oracle(-phi), 1e-12);
    // Rings are coincident only radially: the finger point lies on the ring ray.
    const auto s = ring_attachment_states(ExoAssembly{}, theta, 0.0, phi, 0.0);
    const Vec2 ray = s.exo.position - ExoAssembly{}.gear_axis();
    const Vec2 to_finger = s.finger.position - ExoAssembly{}.gear_axis();
    EXPECT_NEAR(cross(ray, to_finger), 0.0, 1e-15);
  }
}

TEST(Model, SmallAngleSlopeIsKinematicRatio) {
  const double h = 1e-6;
  EXPECT_NEAR(aligned_motor_angle(ExoAssembly{}, h) / h, kinematic_ratio(ExoAssembly{}), 1e-9);
}

TEST(Model, ProfileStartsAtRestAccelerating) {
  const MotionProfile p;
  const auto s = prescribed_motion(p, 0.0);
  EXPECT_EQ(s.angle, 0.0);
  EXPECT_EQ(s.rate, 0.0);
  EXPECT_GT(s.accel, 0.0);
}

TEST(Model, ProfileReachesAmplitudeAtHalfPeriod) {
  const MotionProfile p;
  EXPECT_NEAR(prescribed_motion(p, 0.75).angle, 0.4363, 1e-4);
  EXPECT_NEAR(prescribed_motion(p, 0.75).angle, p.amplitude, 1e-15);
  EXPECT_NEAR(prescribed_motion(p, 0.75).rate, 0.0, 1e-12);
}

TEST(Model, ProfilePeakClosingRate) {
  const MotionProfile p;
  const double expected = p.amplitude * std::numbers::pi / p.period;
  EXPECT_NEAR(prescribed_motion(p, p.period / 4).rate, expected, 1e-12);
  MotionProfile rounded;
  rounded.amplitude = 0.4363;
  EXPECT_NEAR(prescribed_motion(rounded, 0.375).rate, 0.9137, 1e-4);
}

TEST(Model, ProfileDerivativesConsistent) {
  const MotionProfile p;
  const double h = 1e-6;
  for (double t = 0.01; t < 3.0; t += 0.037) {
    const auto s = prescribed_motion(p, t);
    const auto a = prescribed_motion(p, t - h);
    const auto b = prescribed_motion(p, t + h);
    EXPECT_NEAR((b.angle - a.angle) / (2 * h), s.rate, 1e-6);
    EXPECT_NEAR((b.rate - a.rate) / (2 * h), s.accel, 1e-5);
  }
}

TEST(Model, ProfileIsPeriodic) {
  const MotionProfile p;
  for (double t = 0.0; t < p.period; t += 0.05) {
    EXPECT_NEAR(prescribed_motion(p, t).angle, prescribed_motion(p, t + 2 * p.period).angle, 1e-12);
  }
}

TEST(Model, TriangularProfile) {
  MotionProfile p;
  p.shape = ProfileShape::triangular;
  EXPECT_NEAR(prescribed_motion(p, 0.375).angle, 0.5 * p.amplitude, 1e-15);
  EXPECT_NEAR(prescribed_motion(p, 0.75).angle, p.amplitude, 1e-15);
  EXPECT_NEAR(prescribed_motion(p, 1.125).angle, 0.5 * p.amplitude, 1e-15);
  EXPECT_GT(prescribed_motion(p, 0.2).rate, 0.0);
  EXPECT_LT(prescribed_motion(p, 1.0).rate, 0.0);
}

TEST(Model, AttachmentsCoincideAtAssembly) {
  const auto s = ring_attachment_states(ExoAssembly{}, 0.0, 0.0, 0.0, 0.0);
  EXPECT_NEAR(norm(s.finger.position - s.exo.position), 0.0, 1e-17);
  EXPECT_NEAR(s.finger.position.x, 0.060, 1e-15);
}

TEST(Model, FingerPointRotatesAboutMcp) {
  const auto s = ring_attachment_states(ExoAssembly{}, 0.0, 0.0, 0.1, 0.0);
  EXPECT_NEAR(s.finger.position.x, 0.060 * std::cos(0.1), 1e-15);
  EXPECT_NEAR(s.finger.position.y, 0.060 * std::sin(0.1), 1e-15);
  EXPECT_NEAR(norm(s.finger.position - s.exo.position), 0.060 * 0.1, 0.060 * 0.1 * 0.01);
}

TEST(Model, AttachmentVelocitiesMatchFiniteDifference) {
  const ExoAssembly a;
  const double h = 1e-7, th = 0.1, thd = 0.7, ph = 0.2, phd = -0.4;
  const auto s = ring_attachment_states(a, th, thd, ph, phd);
  const auto m = ring_attachment_states(a, th - h * thd, thd, ph - h * phd, phd);
  const auto p = ring_attachment_states(a, th + h * thd, thd, ph + h * phd, phd);
  EXPECT_NEAR((p.finger.position.x - m.finger.position.x) / (2 * h), s.finger.velocity.x, 1e-8);
  EXPECT_NEAR((p.finger.position.y - m.finger.position.y) / (2 * h), s.finger.velocity.y, 1e-8);
  EXPECT_NEAR((p.exo.position.x - m.exo.position.x) / (2 * h), s.exo.velocity.x, 1e-8);
  EXPECT_NEAR((p.exo.position.y - m.exo.position.y) / (2 * h), s.exo.velocity.y, 1e-8);
}

TEST(Model, EffectiveInertiaSumsParts) {
  ExoAssembly a;
  const double lumped = a.effective_inertia();
  EXPECT_NEAR(lumped, a.motor_gear_inertia + a.index_part.moi_yy + a.thumb_part.moi_yy +
                          a.thumb_link_inertia,
              1e-18);
  a.geometry.thumb_mode = ThumbMode::spring_coupled;
  EXPECT_NEAR(lumped - a.effective_inertia(), a.thumb_link_inertia, 1e-18);
}

TEST(Model, AssemblyJsonRoundTrip) {
  const Json cfg = {{"assembly", {{"passive_damping", 0.25}, {"base", {{"mass", 0.2}}}}},
                    {"geometry", {{"thumb_mode", "spring-coupled"}}}};
  const ExoAssembly a = build_assembly(cfg);
  const Json j = to_json(a);
  const ExoAssembly b = build_assembly(j);
  EXPECT_EQ(to_json(b), j);
  EXPECT_DOUBLE_EQ(b.passive_damping, 0.25);
  EXPECT_EQ(b.geometry.thumb_mode, ThumbMode::spring_coupled);
}

TEST(Model, ProfileValidation) {
  MotionProfile p;
  p.period = 0.0;
  EXPECT_THROW(validate(p), ValidationError);
  p = MotionProfile{};
  p.cycles = 0;
  EXPECT_THROW(validate(p), ValidationError);
}

}  // namespace
}  // namespace exosim::model
