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

#include <string>
#include <vector>

#include "exosim/config.hpp"
#include "exosim/model.hpp"

namespace exosim {
struct SimulationTrace;
}

namespace exosim::muscles {

enum class Group { flexor, extensor };

struct Muscle {
  std::string name;
  Group group = Group::flexor;
  double moment_arm = 0.0;  // m about MCP, positive flexes
  double f_max = 0.0;       // N
};

/// Index finger muscle set. FDI_ulnar is left out when the thumb is spring
/// coupled, since its thumb-side action is not modelled.
std::vector<Muscle> default_muscles(model::ThumbMode mode = model::ThumbMode::lumped);

std::vector<Muscle> parse_muscles(ConfigSection section, const Json* list, model::ThumbMode mode);
void validate(const std::vector<Muscle>& muscles);
Json to_json(const std::vector<Muscle>& muscles);

/// min Σ (f_i/f_max,i)^p + w·|τ_d - R f|² over 0 ≤ f ≤ f_max.
struct MuscleOptProblem {
  std::vector<double> tau_d;          // one entry per joint, N·m
  std::vector<double> moment_arms;    // joints × muscles, row-major, m
  std::vector<double> f_max;          // N
  int p = 2;
  double w = 100.0;

  std::size_t joints() const { return tau_d.size(); }
  std::size_t muscles() const { return f_max.size(); }
};

/// Single-joint problem for the given muscle set.
MuscleOptProblem make_problem(const std::vector<Muscle>& muscles, double tau_d, int p = 2,
                              double w = 100.0);

struct MuscleSolution {
  std::vector<double> forces;       // N
  std::vector<double> activations;  // f / f_max
  std::vector<double> residual;     // τ_d - R f, N·m
  double objective = 0.0;
  double kkt_violation = 0.0;
  int iterations = 0;
  bool converged = false;
};

void validate(const MuscleOptProblem& problem);

/// Objective and residual at a given force vector.
double objective(const MuscleOptProblem& problem, const std::vector<double>& forces);
MuscleSolution evaluate(const MuscleOptProblem& problem, std::vector<double> forces);

inline constexpr double kKktTolerance = 1e-9;

/// Projected Newton with an active set on the box. Throws NumericError on
/// non-finite input.
MuscleSolution solve_muscle_forces(const MuscleOptProblem& problem);

/// Exhaustive nested grid search: 101 points per axis over the box, then
/// three zooms of ×10 around the incumbent. Limited to three muscles.
MuscleSolution brute_force_oracle(const MuscleOptProblem& problem);

struct ActivationSummary {
  double flexor_closing = 0.0;
  double flexor_cycle = 0.0;
  double extensor_opening = 0.0;
  double extensor_cycle = 0.0;
};

/// Time-averaged group activations. Closing is the first half of each
/// movement cycle and opening the second half.
ActivationSummary group_activation_summary(const SimulationTrace& trace);

}  // namespace exosim::muscles
