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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "exosim/config.hpp"
#include "exosim/errors.hpp"
#include "exosim/format.hpp"

namespace exosim {
namespace {

TEST(Config, ReadsAndFlagsUnknownKeys) {
  IssueList issues;
  const Json j = {{"a", 1.5}, {"n", 3}, {"flag", true}, {"typo", 0}};
  ConfigSection s(&j, "sec", issues);
  EXPECT_EQ(s.number("a", 0.0), 1.5);
  EXPECT_EQ(s.integer("n", 0), 3);
  EXPECT_TRUE(s.boolean("flag", false));
  EXPECT_EQ(s.number("missing", 7.0), 7.0);
  s.finish();
  ASSERT_EQ(issues.items().size(), 1u);
  EXPECT_NE(issues.items()[0].find("sec.typo"), std::string::npos);
  EXPECT_THROW(issues.raise_if_any(), ValidationError);
}

TEST(Config, TypeErrors) {
  IssueList issues;
  const Json j = {{"a", "x"}, {"n", 2.5}, {"flag", 1}, {"list", {1, "b"}}};
  ConfigSection s(&j, "", issues);
  s.number("a", 0.0);
  s.integer("n", 0);
  s.boolean("flag", false);
  s.numbers("list", {});
  EXPECT_EQ(issues.items().size(), 4u);
}

TEST(Config, AnglesInDegrees) {
  IssueList issues;
  const Json j = {{"amplitude_deg", 25.0}, {"limits_deg", {-20, 20}}};
  ConfigSection s(&j, "", issues);
  EXPECT_NEAR(s.angle("amplitude", 0.0), 25.0 * std::numbers::pi / 180.0, 1e-15);
  const auto lim = s.angles("limits", {});
  ASSERT_EQ(lim.size(), 2u);
  EXPECT_NEAR(lim[1], 20.0 * std::numbers::pi / 180.0, 1e-15);
  s.finish();
  EXPECT_TRUE(issues.empty());
}

TEST(Config, AngleGivenTwiceRejected) {
  IssueList issues;
  const Json j = {{"amplitude", 0.4}, {"amplitude_deg", 25.0}};
  ConfigSection s(&j, "", issues);
  s.angle("amplitude", 0.0);
  s.finish();
  EXPECT_FALSE(issues.empty());
}

TEST(Config, ChoiceRestricted) {
  IssueList issues;
  const Json j = {{"mode", "fast"}};
  ConfigSection s(&j, "", issues);
  EXPECT_EQ(s.choice("mode", "slow", {"slow", "passive"}), "slow");
  EXPECT_EQ(issues.items().size(), 1u);
}

TEST(Config, MissingSectionUsesFallbacks) {
  IssueList issues;
  ConfigSection s(nullptr, "sec", issues);
  EXPECT_FALSE(s.present());
  EXPECT_EQ(s.number("a", 2.0), 2.0);
  EXPECT_FALSE(s.child("c").present());
  s.finish();
  EXPECT_TRUE(issues.empty());
}

TEST(Config, CheckSections) {
  IssueList issues;
  check_sections({{"sim", Json::object()}, {"simm", 1}}, {"sim"}, issues);
  EXPECT_EQ(issues.items().size(), 1u);
  IssueList scalar;
  check_sections(Json(3), {"sim"}, scalar);
  EXPECT_FALSE(scalar.empty());
}

TEST(Config, MergeIsRecursive) {
  const Json base = {{"a", {{"x", 1}, {"y", 2}}}, {"b", 3}};
  const Json over = {{"a", {{"y", 5}}}, {"c", 4}};
  const Json m = merge_config(base, over);
  EXPECT_EQ(m, (Json{{"a", {{"x", 1}, {"y", 5}}}, {"b", 3}, {"c", 4}}));
}

TEST(Config, LoadJsonFile) {
  const auto path = std::filesystem::temp_directory_path() / "exosim_config_test.json";
  std::ofstream(path) << R"({"sim": {"dt": 1e-4}})";
  EXPECT_EQ(load_json_file(path.string())["sim"]["dt"], 1e-4);
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_json_file(path.string()), ValidationError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_json_file(path.string()), IoError);
}

TEST(Format, ShortestRoundTrip) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    const std::string s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(NAN), "nan");
}

}  // namespace
}  // namespace exosim
