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
#include <cmath>
#include <limits>
#include <random>

#include "exosim/errors.hpp"
#include "exosim/muscles.hpp"
#include "exosim/trace.hpp"

namespace exosim::muscles {
namespace {

MuscleOptProblem single_muscle() {
  MuscleOptProblem pr;
  pr.tau_d = {0.5};
  pr.moment_arms = {0.01};
  pr.f_max = {100.0};
  return pr;
}

// Exact minimiser for p = 2 by enumerating every assignment of each
// activation to {0, 1, free}; the free block solves a small linear system.
double exact_objective_p2(const MuscleOptProblem& pr) {
  const std::size_t n = pr.muscles(), nj = pr.joints();
  std::vector<double> m(nj * n);  // moment arms scaled by f_max
  for (std::size_t j = 0; j < nj; ++j)
    for (std::size_t i = 0; i < n; ++i) m[j * n + i] = pr.moment_arms[j * n + i] * pr.f_max[i];
  double best = std::numeric_limits<double>::infinity();
  int combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  for (int code = 0; code < combos; ++code) {
    std::vector<int> state(n);
    for (std::size_t i = 0, c = code; i < n; ++i, c /= 3) state[i] = static_cast<int>(c % 3);
    std::vector<double> a(n, 0.0);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) a[i] = 1.0;
      if (state[i] == 2) free.push_back(i);
    }
    const std::size_t nf = free.size();
    if (nf > 0) {
      // (I + w·Mfᵀ·Mf)·af = w·Mfᵀ·(τ − Mfixed·afixed)
      std::vector<double> h(nf * nf, 0.0), rhs(nf, 0.0);
      std::vector<double> rest(pr.tau_d);
      for (std::size_t j = 0; j < nj; ++j)
        for (std::size_t i = 0; i < n; ++i)
          if (state[i] != 2) rest[j] -= m[j * n + i] * a[i];
      for (std::size_t r = 0; r < nf; ++r) {
        h[r * nf + r] = 1.0;
        for (std::size_t c = 0; c < nf; ++c)
          for (std::size_t j = 0; j < nj; ++j)
            h[r * nf + c] += pr.w * m[j * n + free[r]] * m[j * n + free[c]];
        for (std::size_t j = 0; j < nj; ++j) rhs[r] += pr.w * m[j * n + free[r]] * rest[j];
      }
      // Gaussian elimination with partial pivoting.
      for (std::size_t col = 0; col < nf; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < nf; ++r)
          if (std::abs(h[r * nf + col]) > std::abs(h[piv * nf + col])) piv = r;
        for (std::size_t c = 0; c < nf; ++c) std::swap(h[col * nf + c], h[piv * nf + c]);
        std::swap(rhs[col], rhs[piv]);
        for (std::size_t r = col + 1; r < nf; ++r) {
          const double f = h[r * nf + col] / h[col * nf + col];
          for (std::size_t c = col; c < nf; ++c) h[r * nf + c] -= f * h[col * nf + c];
          rhs[r] -= f * rhs[col];
        }
      }
      std::vector<double> x(nf);
      for (std::size_t r = nf; r-- > 0;) {
        double v = rhs[r];
        for (std::size_t c = r + 1; c < nf; ++c) v -= h[r * nf + c] * x[c];
        x[r] = v / h[r * nf + r];
      }
      bool feasible = true;
      for (std::size_t r = 0; r < nf; ++r) {
        if (x[r] < 0.0 || x[r] > 1.0) feasible = false;
        a[free[r]] = x[r];
      }
      if (!feasible) continue;
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = a[i] * pr.f_max[i];
    best = std::min(best, objective(pr, f));
  }
  return best;
}

MuscleOptProblem random_problem(std::mt19937& rng, std::size_t muscles, std::size_t joints, int p) {
  std::uniform_real_distribution<double> arm(-0.02, 0.02), fmax(20.0, 250.0), tau(-2.5, 2.5);
  std::uniform_int_distribution<int> wexp(0, 4);
  MuscleOptProblem pr;
  pr.p = p;
  pr.w = std::pow(10.0, wexp(rng));
  for (std::size_t j = 0; j < joints; ++j) pr.tau_d.push_back(tau(rng));
  for (std::size_t k = 0; k < joints * muscles; ++k) pr.moment_arms.push_back(arm(rng));
  for (std::size_t i = 0; i < muscles; ++i) pr.f_max.push_back(fmax(rng));
  return pr;
}

TEST(Muscles, ZeroDemandGivesZeroForces) {
  auto pr = make_problem(default_muscles(), 0.0);
  const auto s = solve_muscle_forces(pr);
  for (double f : s.forces) EXPECT_EQ(f, 0.0);
  EXPECT_EQ(s.objective, 0.0);
  EXPECT_EQ(s.residual[0], 0.0);
  EXPECT_TRUE(s.converged);
}

TEST(Muscles, SingleMuscleClosedForm) {
  const auto pr = single_muscle();
  const double closed = pr.w * 0.01 * 0.5 / (1.0 / (100.0 * 100.0) + pr.w * 0.01 * 0.01);
  const auto s = solve_muscle_forces(pr);
  EXPECT_NEAR(closed, 49.505, 1e-3);
  EXPECT_NEAR(s.forces[0], closed, 1e-9);
  EXPECT_NEAR(s.residual[0], 4.95e-3, 1e-5);
  EXPECT_NEAR(s.activations[0], s.forces[0] / 100.0, 1e-15);
}

TEST(Muscles, OracleMatchesClosedForm) {
  const auto s = brute_force_oracle(single_muscle());
  EXPECT_NEAR(s.forces[0], 49.505, 1e-3);
}

TEST(Muscles, IdenticalMusclesShareEqually) {
  MuscleOptProblem pr;
  pr.tau_d = {0.8};
  pr.moment_arms = {0.01, 0.01};
  pr.f_max = {120.0, 120.0};
  const auto s = solve_muscle_forces(pr);
  EXPECT_NEAR(s.forces[0], s.forces[1], 1e-9);
  EXPECT_GT(s.forces[0], 0.0);
}

TEST(Muscles, OnlyAgonistsRecruited) {
  const auto muscles = default_muscles();
  const auto flex = solve_muscle_forces(make_problem(muscles, 0.3));
  const auto ext = solve_muscle_forces(make_problem(muscles, -0.3));
  for (std::size_t i = 0; i < muscles.size(); ++i) {
    const bool flexor = muscles[i].group == Group::flexor;
    EXPECT_EQ(flex.forces[i] == 0.0, !flexor) << muscles[i].name;
    EXPECT_EQ(ext.forces[i] == 0.0, flexor) << muscles[i].name;
  }
}

TEST(Muscles, SaturatesAtUpperBound) {
  MuscleOptProblem pr = single_muscle();
  pr.tau_d = {50.0};
  pr.w = 1e6;
  const auto s = solve_muscle_forces(pr);
  EXPECT_DOUBLE_EQ(s.forces[0], 100.0);
  EXPECT_NEAR(s.residual[0], 49.0, 1e-12);
}

TEST(Muscles, SolverMatchesExactEnumeration) {
  std::mt19937 rng(20260101);
  for (int seed = 0; seed < 300; ++seed) {
    const std::size_t n = 1 + seed % 3, joints = 1 + (seed / 3) % 2;
    const auto pr = random_problem(rng, n, joints, 2);
    const auto s = solve_muscle_forces(pr);
    const double exact = exact_objective_p2(pr);
    EXPECT_TRUE(s.converged) << seed;
    EXPECT_LE(std::abs(s.objective - exact), 1e-9 * std::max(1.0, exact)) << seed;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(s.forces[i], 0.0);
      EXPECT_LE(s.forces[i], pr.f_max[i]);
    }
  }
}

// Instances drawn from the default muscle set: 1 to 3 muscles with their
// own moment arms and strengths, torque demands across the simulated range.
TEST(Muscles, SolverMatchesBruteForceOracle) {
  const auto set = default_muscles();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> tau(-0.5, 0.5);
  for (int seed = 0; seed < 200; ++seed) {
    std::vector<std::size_t> idx = {0, 1, 2, 3, 4, 5};
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Muscle> sub;
    for (int k = 0; k <= seed % 3; ++k) sub.push_back(set[idx[k]]);
    const auto pr = make_problem(sub, tau(rng), seed % 4 == 3 ? 4 : 2);
    const auto s = solve_muscle_forces(pr);
    const auto o = brute_force_oracle(pr);
    // The oracle samples a grid, so it can only match or exceed the optimum.
    EXPECT_GE(o.objective, s.objective - 1e-15) << seed;
    EXPECT_LT((o.objective - s.objective) / (1.0 + o.objective), 1e-6) << seed;
  }
}

TEST(Muscles, OracleZeroDemand) {
  auto pr = make_problem({default_muscles()[0], default_muscles()[2]}, 0.0);
  const auto o = brute_force_oracle(pr);
  EXPECT_EQ(o.forces, (std::vector<double>{0.0, 0.0}));
}

TEST(Muscles, SolutionSatisfiesKkt) {
  std::mt19937 rng(5);
  for (int seed = 0; seed < 100; ++seed) {
    const auto pr = random_problem(rng, 6, 1, 2);
    const auto s = solve_muscle_forces(pr);
    EXPECT_LT(s.kkt_violation, kKktTolerance) << seed;
    // Perturbing any force inside its box never lowers the objective.
    for (std::size_t i = 0; i < 6; ++i) {
      for (double d : {-1e-4, 1e-4}) {
        auto f = s.forces;
        f[i] = std::clamp(f[i] + d * pr.f_max[i], 0.0, pr.f_max[i]);
        EXPECT_GE(objective(pr, f), s.objective - 1e-12) << seed;
      }
    }
  }
}

TEST(Muscles, HigherExponentStillFeasible) {
  auto pr = make_problem(default_muscles(), 0.4, 4);
  const auto s = solve_muscle_forces(pr);
  EXPECT_TRUE(s.converged);
  for (std::size_t i = 0; i < s.forces.size(); ++i) {
    EXPECT_GE(s.activations[i], 0.0);
    EXPECT_LE(s.activations[i], 1.0);
  }
}

TEST(Muscles, RejectsBadProblems) {
  auto pr = single_muscle();
  pr.tau_d = {std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(solve_muscle_forces(pr), NumericError);
  pr = single_muscle();
  pr.p = 3;
  EXPECT_THROW(solve_muscle_forces(pr), ValidationError);
  pr = single_muscle();
  pr.f_max = {0.0};
  EXPECT_THROW(solve_muscle_forces(pr), ValidationError);
  pr = single_muscle();
  pr.moment_arms = {0.01, 0.02};
  EXPECT_THROW(solve_muscle_forces(pr), ValidationError);
}

TEST(Muscles, OracleLimitedToThreeMuscles) {
  EXPECT_THROW(brute_force_oracle(make_problem(default_muscles(), 0.1)), UnsupportedError);
}

TEST(Muscles, DefaultSet) {
  EXPECT_EQ(default_muscles().size(), 6u);
  EXPECT_EQ(default_muscles(model::ThumbMode::spring_coupled).size(), 5u);
  EXPECT_NO_THROW(validate(default_muscles()));
  auto bad = default_muscles();
  bad[0].moment_arm = 0.01;  // extensor with a flexing arm
  EXPECT_THROW(validate(bad), ValidationError);
}

TEST(Muscles, ParseCustomSet) {
  const Json list = Json::array({{{"name", "FDS"}, {"group", "flexor"}, {"r", 0.012}, {"f_max", 150}},
                                 {{"name", "EDC"}, {"group", "extensor"}, {"r", -0.01}, {"f_max", 80}}});
  IssueList issues;
  const Json section = Json::object();
  const auto set = parse_muscles(ConfigSection(&section, "muscles", issues), &list,
                                 model::ThumbMode::lumped);
  EXPECT_TRUE(issues.empty());
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set[1].group, Group::extensor);
  EXPECT_EQ(to_json(set), list);

  const Json missing = Json::array({{{"name", "FDS"}}});
  parse_muscles(ConfigSection(&section, "muscles", issues), &missing, model::ThumbMode::lumped);
  EXPECT_FALSE(issues.empty());
}

TEST(Muscles, ZeroActivationSummary) {
  SimulationTrace tr;
  tr.period = 1.0;
  tr.cycles = 1;
  tr.muscle_names = {"FDS", "EDC"};
  tr.muscle_flexor = {true, false};
  for (int k = 0; k < 100; ++k) {
    tr.t.push_back(0.01 * k);
    tr.clock.push_back(0.01 * k);
  }
  tr.activation.assign(2, std::vector<double>(100, 0.0));
  const auto s = group_activation_summary(tr);
  EXPECT_EQ(s.flexor_closing, 0.0);
  EXPECT_EQ(s.extensor_opening, 0.0);
  EXPECT_EQ(s.flexor_cycle, 0.0);
  EXPECT_EQ(s.extensor_cycle, 0.0);
}

TEST(Muscles, ActivationSummaryByPhase) {
  SimulationTrace tr;
  tr.period = 1.0;
  tr.cycles = 1;
  tr.muscle_names = {"FDS", "FDP", "EDC"};
  tr.muscle_flexor = {true, true, false};
  tr.activation.assign(3, {});
  for (int k = -10; k < 100; ++k) {
    tr.t.push_back(0.01 * (k + 10));
    tr.clock.push_back(0.01 * k);
    const bool closing = k >= 0 && k < 50;
    tr.activation[0].push_back(closing ? 0.2 : 0.0);
    tr.activation[1].push_back(closing ? 0.4 : 0.0);
    tr.activation[2].push_back(closing ? 0.0 : 0.5);
  }
  const auto s = group_activation_summary(tr);
  EXPECT_NEAR(s.flexor_closing, 0.3, 1e-15);
  EXPECT_NEAR(s.extensor_opening, 0.5, 1e-15);
  EXPECT_NEAR(s.flexor_cycle, 0.15, 1e-15);
  EXPECT_NEAR(s.extensor_cycle, 0.25, 1e-15);
}

}  // namespace
}  // namespace exosim::muscles
