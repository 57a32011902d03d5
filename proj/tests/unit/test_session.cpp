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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "exosim/errors.hpp"
#include "exosim/session.hpp"
#include "synthetic.hpp"

namespace exosim::signals {
namespace {

namespace fs = std::filesystem;

class SessionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("exosim_session_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_F(SessionTest, RoundTrip) {
  const auto s = testing::synthetic_session();
  write_session(s, dir_);
  const auto back = load_session(dir_);
  EXPECT_DOUBLE_EQ(back.theta.fs, 155.0);
  EXPECT_DOUBLE_EQ(back.fdi.fs, 2000.0);
  EXPECT_EQ(back.theta.samples, s.theta.samples);
  EXPECT_EQ(back.fz.samples, s.fz.samples);
  EXPECT_EQ(back.edc.samples, s.edc.samples);
  EXPECT_EQ(back.bpm, 40.0);
  EXPECT_EQ(back.subject, "synthetic");
}

TEST_F(SessionTest, RatesInferredWithoutManifest) {
  write_session(testing::synthetic_session(), dir_);
  fs::remove(dir_ / "manifest.json");
  const auto back = load_session(dir_);
  EXPECT_NEAR(back.theta.fs, 155.0, 1e-6);
  EXPECT_NEAR(back.fdi.fs, 2000.0, 1e-6);
}

TEST_F(SessionTest, EmgIsOptional) {
  auto s = testing::synthetic_session();
  s.has_emg = false;
  write_session(s, dir_);
  const auto back = load_session(dir_);
  EXPECT_FALSE(back.has_emg);
  const auto r = process_session(back);
  EXPECT_TRUE(r.emg.empty());
  EXPECT_EQ(r.cycles.cycles.size(), 15u);
}

TEST_F(SessionTest, MissingDirectory) {
  EXPECT_THROW(load_session(dir_ / "nope"), IoError);
}

TEST_F(SessionTest, MissingKinetics) {
  fs::create_directories(dir_);
  EXPECT_THROW(load_session(dir_), IoError);
}

TEST_F(SessionTest, SchemaMismatchReportsFileAndLine) {
  write_session(testing::synthetic_session(2), dir_);
  {
    std::ofstream out(dir_ / "kinetics.csv");
    out << "t,theta,fz\n0,0,0\n";
  }
  try {
    load_session(dir_);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    ASSERT_FALSE(e.issues().empty());
    EXPECT_NE(e.issues()[0].find("kinetics.csv"), std::string::npos);
  }
  write_session(testing::synthetic_session(2), dir_);
  {
    std::ofstream out(dir_ / "emg.csv", std::ios::app);
    out << "1,2,x,4,5\n";
  }
  try {
    load_session(dir_);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    ASSERT_FALSE(e.issues().empty());
    EXPECT_NE(e.issues()[0].find("emg.csv"), std::string::npos);
  }
}

TEST_F(SessionTest, UnknownManifestKey) {
  write_session(testing::synthetic_session(2), dir_);
  std::ofstream(dir_ / "manifest.json") << R"({"bpm": 40, "tempo": 3})";
  EXPECT_THROW(load_session(dir_), ValidationError);
}

TEST(Pipeline, SixteenCycleSession) {
  const auto r = process_session(testing::synthetic_session());
  EXPECT_EQ(r.cycles.cycles.size(), 15u);
  EXPECT_DOUBLE_EQ(r.cycles.fs, 350.0);
  for (const auto& c : r.cycles.cycles) EXPECT_NEAR((c.end - c.start) / 350.0, 1.5, 0.01);
  EXPECT_NEAR(r.mean_range * 180.0 / std::numbers::pi, 16.0, 0.5);
  ASSERT_EQ(r.emg.size(), 4u);
  EXPECT_EQ(r.emg[0].name, "fdi");
  EXPECT_EQ(*std::max_element(r.emg[0].mean.begin(), r.emg[0].mean.end()), 1.0);
  EXPECT_EQ(r.theta.cycles, 15u);
  EXPECT_EQ(r.fz.mean.size(), r.theta.mean.size());
}

TEST(Pipeline, ForceBiasRemoved) {
  // The load cell carries a 0.3 N offset on z and the 1000-sample window at
  // 155 Hz spans whole movement cycles only approximately.
  const auto r = process_session(testing::synthetic_session());
  double mean = 0.0;
  for (double v : r.fz.mean) mean += v;
  mean /= r.fz.mean.size();
  EXPECT_LT(std::abs(mean), 0.1);
  EXPECT_NEAR(*std::max_element(r.fz.mean.begin(), r.fz.mean.end()), 0.8, 0.1);
}

TEST(Pipeline, ScalingEmgLeavesNormalizedOutputUnchanged) {
  auto a = testing::synthetic_session();
  auto b = a;
  for (auto* c : {&b.fdi, &b.ei, &b.edc, &b.fds})
    for (double& v : c->samples) v *= 2.0;
  const auto ra = process_session(a), rb = process_session(b);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t j = 0; j < ra.emg[m].mean.size(); ++j)
      EXPECT_NEAR(ra.emg[m].mean[j], rb.emg[m].mean[j], 1e-12);
}

TEST(Pipeline, FlexorBurstsDuringClosing) {
  // Cycles start at extension, so the first half of each cycle closes.
  const auto r = process_session(testing::synthetic_session());
  const auto& fds = r.emg[3].mean;
  const auto& edc = r.emg[2].mean;
  const std::size_t half = fds.size() / 2;
  double fds_close = 0, fds_open = 0, edc_close = 0, edc_open = 0;
  for (std::size_t j = 0; j < fds.size(); ++j) {
    (j < half ? fds_close : fds_open) += fds[j];
    (j < half ? edc_close : edc_open) += edc[j];
  }
  EXPECT_GT(fds_close, fds_open);
  EXPECT_GT(edc_open, edc_close);
}

TEST_F(SessionTest, OutputsAreDeterministic) {
  const auto r = process_session(testing::synthetic_session());
  write_session_result(r, dir_ / "a");
  write_session_result(process_session(testing::synthetic_session()), dir_ / "b");
  for (const char* f : {"position.csv", "velocity.csv", "force.csv", "emg.csv", "cycles.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_EQ(slurp(dir_ / "a" / "position.csv").substr(0, 46),
            "phase,theta_mean_rad,theta_var_rad2,theta_std_");
}

}  // namespace
}  // namespace exosim::signals
