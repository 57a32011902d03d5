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

#include "exosim/muscles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "exosim/errors.hpp"
#include "exosim/trace.hpp"

namespace exosim::muscles {

namespace {

// Solves the symmetric positive definite system a·x = b in place (n ≤ ~10).
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) throw NumericError("muscle solver: Hessian not positive definite");
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return b;
}

// Works in activations a = f / f_max so every bound is [0, 1].
struct Scaled {
  std::size_t joints;
  std::size_t n;
  std::vector<double> m;  // joints × n: R · diag(f_max)
  std::vector<double> tau;
  int p;
  double w;

  std::vector<double> residual(const std::vector<double>& a) const {
    std::vector<double> c = tau;
    for (std::size_t j = 0; j < joints; ++j) {
      for (std::size_t i = 0; i < n; ++i) c[j] -= m[j * n + i] * a[i];
    }
    return c;
  }

  double value(const std::vector<double>& a) const {
    double v = 0.0;
    for (double ai : a) v += std::pow(ai, p);
    for (double cj : residual(a)) v += w * cj * cj;
    return v;
  }

  std::vector<double> gradient(const std::vector<double>& a) const {
    auto c = residual(a);
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = p * std::pow(a[i], p - 1);
      for (std::size_t j = 0; j < joints; ++j) g[i] -= 2.0 * w * m[j * n + i] * c[j];
    }
    return g;
  }
};

Scaled scale(const MuscleOptProblem& pr) {
  Scaled s{pr.joints(), pr.muscles(), pr.moment_arms, pr.tau_d, pr.p, pr.w};
  for (std::size_t j = 0; j < s.joints; ++j) {
    for (std::size_t i = 0; i < s.n; ++i) s.m[j * s.n + i] *= pr.f_max[i];
  }
  return s;
}

double kkt(const std::vector<double>& a, const std::vector<double>& g) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double e = std::abs(g[i]);
    if (a[i] <= 0.0) e = std::max(0.0, -g[i]);
    if (a[i] >= 1.0) e = std::max(0.0, g[i]);
    v = std::max(v, e);
  }
  return v;
}

}  // namespace

std::vector<Muscle> default_muscles(model::ThumbMode mode) {
  std::vector<Muscle> set = {
      {"EDC", Group::extensor, -0.009, 70.0},    {"EI", Group::extensor, -0.008, 50.0},
      {"FDS", Group::flexor, 0.011, 170.0},      {"FDP", Group::flexor, 0.010, 200.0},
      {"FDI_radial", Group::flexor, 0.006, 60.0}, {"FDI_ulnar", Group::flexor, 0.005, 60.0},
  };
  if (mode == model::ThumbMode::spring_coupled) set.pop_back();
  return set;
}

std::vector<Muscle> parse_muscles(ConfigSection section, const Json* list, model::ThumbMode mode) {
  auto out = default_muscles(mode);
  if (list == nullptr) return out;
  if (!list->is_array()) {
    section.issue("set", "expected an array of muscles");
    return out;
  }
  out.clear();
  IssueList scratch;
  for (std::size_t i = 0; i < list->size(); ++i) {
    ConfigSection m(&(*list)[i], section.path() + ".set[" + std::to_string(i) + "]", scratch);
    Muscle mu;
    mu.name = m.choice("name", "", {"EDC", "EI", "FDS", "FDP", "FDI_radial", "FDI_ulnar"});
    auto group = m.choice("group", "", {"flexor", "extensor"});
    mu.group = group == "extensor" ? Group::extensor : Group::flexor;
    mu.moment_arm = m.number("r", 0.0);
    mu.f_max = m.number("f_max", 0.0);
    if (!m.has("name") || !m.has("group") || !m.has("r") || !m.has("f_max")) {
      m.issue("", "name, group, r and f_max are required");
    }
    m.finish();
    out.push_back(mu);
  }
  for (const auto& s : scratch.items()) section.issue("set", s);
  return out;
}

void validate(const std::vector<Muscle>& muscles) {
  std::vector<std::string> issues;
  if (muscles.empty()) issues.emplace_back("muscles: at least one muscle is required");
  for (const auto& m : muscles) {
    if (!(m.f_max > 0.0)) issues.push_back("muscles." + m.name + ".f_max: must be positive");
    if (m.group == Group::flexor && !(m.moment_arm > 0.0)) {
      issues.push_back("muscles." + m.name + ".r: flexors need a positive moment arm");
    }
    if (m.group == Group::extensor && !(m.moment_arm < 0.0)) {
      issues.push_back("muscles." + m.name + ".r: extensors need a negative moment arm");
    }
  }
  if (!issues.empty()) throw ValidationError(issues);
}

Json to_json(const std::vector<Muscle>& muscles) {
  Json arr = Json::array();
  for (const auto& m : muscles) {
    arr.push_back({{"name", m.name},
                   {"group", m.group == Group::flexor ? "flexor" : "extensor"},
                   {"r", m.moment_arm},
                   {"f_max", m.f_max}});
  }
  return arr;
}

MuscleOptProblem make_problem(const std::vector<Muscle>& muscles, double tau_d, int p, double w) {
  MuscleOptProblem pr;
  pr.tau_d = {tau_d};
  pr.p = p;
  pr.w = w;
  for (const auto& m : muscles) {
    pr.moment_arms.push_back(m.moment_arm);
    pr.f_max.push_back(m.f_max);
  }
  return pr;
}

void validate(const MuscleOptProblem& pr) {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(pr.tau_d) || !finite(pr.moment_arms) || !finite(pr.f_max) || !std::isfinite(pr.w)) {
    throw NumericError("muscle problem: non-finite input");
  }
  std::vector<std::string> issues;
  if (pr.muscles() == 0) issues.emplace_back("muscle problem: no muscles");
  if (pr.joints() == 0) issues.emplace_back("muscle problem: no joints");
  if (pr.moment_arms.size() != pr.joints() * pr.muscles()) {
    issues.emplace_back("muscle problem: moment-arm matrix has the wrong size");
  }
  for (double f : pr.f_max) {
    if (!(f > 0.0)) issues.emplace_back("muscle problem: f_max must be positive");
  }
  if (pr.p < 2 || pr.p % 2 != 0) issues.emplace_back("muscle problem: p must be an even integer ≥ 2");
  if (!(pr.w > 0.0)) issues.emplace_back("muscle problem: w must be positive");
  if (!issues.empty()) throw ValidationError(issues);
}

double objective(const MuscleOptProblem& pr, const std::vector<double>& forces) {
  double v = 0.0;
  for (std::size_t i = 0; i < pr.muscles(); ++i) v += std::pow(forces[i] / pr.f_max[i], pr.p);
  for (std::size_t j = 0; j < pr.joints(); ++j) {
    double c = pr.tau_d[j];
    for (std::size_t i = 0; i < pr.muscles(); ++i) c -= pr.moment_arms[j * pr.muscles() + i] * forces[i];
    v += pr.w * c * c;
  }
  return v;
}

MuscleSolution evaluate(const MuscleOptProblem& pr, std::vector<double> forces) {
  MuscleSolution s;
  s.forces = std::move(forces);
  s.activations.resize(pr.muscles());
  for (std::size_t i = 0; i < pr.muscles(); ++i) s.activations[i] = s.forces[i] / pr.f_max[i];
  s.residual = pr.tau_d;
  for (std::size_t j = 0; j < pr.joints(); ++j) {
    for (std::size_t i = 0; i < pr.muscles(); ++i) {
      s.residual[j] -= pr.moment_arms[j * pr.muscles() + i] * s.forces[i];
    }
  }
  s.objective = objective(pr, s.forces);
  return s;
}

MuscleSolution solve_muscle_forces(const MuscleOptProblem& pr) {
  validate(pr);
  const Scaled q = scale(pr);
  const std::size_t n = q.n;
  std::vector<double> a(n, 0.0);
  std::vector<double> g = q.gradient(a);
  double violation = kkt(a, g);
  int iter = 0;
  constexpr int kMaxIter = 500;
  for (; iter < kMaxIter && violation >= kKktTolerance; ++iter) {
    // Bounds within eps that the gradient pushes against stay fixed; eps is
    // the size of a projected gradient step, so it shrinks near the optimum.
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) eps += std::pow(a[i] - std::clamp(a[i] - g[i], 0.0, 1.0), 2);
    eps = std::min(1e-3, std::sqrt(eps));
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      bool lower = a[i] <= eps && g[i] > 0.0;
      bool upper = a[i] >= 1.0 - eps && g[i] < 0.0;
      if (!lower && !upper) free.push_back(i);
    }
    const std::size_t nf = free.size();
    std::vector<std::size_t> fixed;
    for (std::size_t i = 0, r = 0; i < n; ++i) {
      if (r < nf && free[r] == i) ++r;
      else fixed.push_back(i);
    }
    std::vector<double> h(nf * nf, 0.0), rhs(nf);
    for (std::size_t r = 0; r < nf; ++r) {
      const std::size_t i = free[r];
      rhs[r] = -g[i];
      if (q.p > 2) h[r * nf + r] += q.p * (q.p - 1) * std::pow(a[i], q.p - 2);
      else h[r * nf + r] += 2.0;
      for (std::size_t c = 0; c < nf; ++c) {
        const std::size_t k = free[c];
        for (std::size_t j = 0; j < q.joints; ++j) {
          h[r * nf + c] += 2.0 * q.w * q.m[j * n + i] * q.m[j * n + k];
        }
      }
    }
    // Keeps the Newton system solvable when p > 2 and activations sit at 0.
    for (std::size_t r = 0; r < nf; ++r) h[r * nf + r] += 1e-12 * (1.0 + h[r * nf + r]);
    std::vector<double> step = nf ? cholesky_solve(h, rhs, nf) : std::vector<double>{};

    const double f0 = q.value(a);
    double alpha = 1.0;
    std::vector<double> trial(n);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = a;
      for (std::size_t r = 0; r < nf; ++r) {
        trial[free[r]] = std::clamp(a[free[r]] + alpha * step[r], 0.0, 1.0);
      }
      for (std::size_t i : fixed) trial[i] = std::clamp(a[i] - alpha * g[i], 0.0, 1.0);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (a[i] - trial[i]);
      const double f = q.value(trial);
      if (f <= f0 - 1e-4 * decrease && f < f0) {
        accepted = true;
        break;
      }
      // Near the optimum the objective change drowns in rounding; a step that
      // ties within a few ulps is judged by the stationarity error instead.
      if (f <= f0 + 1e-14 * std::abs(f0) && kkt(trial, q.gradient(trial)) < violation) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    a = trial;
    g = q.gradient(a);
    violation = kkt(a, g);
  }

  std::vector<double> forces(n);
  for (std::size_t i = 0; i < n; ++i) forces[i] = a[i] * pr.f_max[i];
  MuscleSolution s = evaluate(pr, std::move(forces));
  s.kkt_violation = violation;
  s.iterations = iter;
  s.converged = violation < kKktTolerance;
  return s;
}

MuscleSolution brute_force_oracle(const MuscleOptProblem& pr) {
  validate(pr);
  const std::size_t n = pr.muscles(), nj = pr.joints();
  if (n > 3) throw UnsupportedError("brute_force_oracle: at most three muscles");
  constexpr int kPoints = 101;
  constexpr int kPasses = 4;  // coarse grid plus three zooms, final step f_max·1e-6
  constexpr double kWindowSteps = 5.0;  // each pass zooms ×10

  // The objective separates per axis apart from the residual, so each axis
  // gets a table of its activation term and its torque contribution. Unused
  // axes hold a single zero sample.
  std::vector<double> lo(n, 0.0), hi(pr.f_max), best(n, 0.0);
  std::array<std::vector<double>, 3> force, term, torque;  // torque: [sample * nj + j]
  std::vector<double> resid(nj);
  for (int pass = 0; pass < kPasses; ++pass) {
    std::vector<double> step(n);
    for (std::size_t a = 0; a < 3; ++a) {
      const int count = a < n ? kPoints : 1;
      force[a].assign(count, 0.0);
      term[a].assign(count, 0.0);
      torque[a].assign(count * nj, 0.0);
      if (a >= n) continue;
      step[a] = (hi[a] - lo[a]) / (kPoints - 1);
      for (int k = 0; k < count; ++k) {
        const double f = lo[a] + step[a] * k;
        force[a][k] = f;
        term[a][k] = std::pow(f / pr.f_max[a], pr.p);
        for (std::size_t j = 0; j < nj; ++j) torque[a][k * nj + j] = pr.moment_arms[j * n + a] * f;
      }
    }
    double best_value = std::numeric_limits<double>::infinity();
    std::array<std::size_t, 3> arg{};
    for (std::size_t k0 = 0; k0 < force[0].size(); ++k0) {
      for (std::size_t k1 = 0; k1 < force[1].size(); ++k1) {
        const double t01 = term[0][k0] + term[1][k1];
        for (std::size_t k2 = 0; k2 < force[2].size(); ++k2) {
          double v = t01 + term[2][k2];
          for (std::size_t j = 0; j < nj; ++j) {
            const double c = pr.tau_d[j] - torque[0][k0 * nj + j] - torque[1][k1 * nj + j] -
                             torque[2][k2 * nj + j];
            v += pr.w * c * c;
          }
          if (v < best_value) {
            best_value = v;
            arg = {k0, k1, k2};
          }
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      best[a] = force[a][arg[a]];
      lo[a] = std::max(0.0, best[a] - kWindowSteps * step[a]);
      hi[a] = std::min(pr.f_max[a], best[a] + kWindowSteps * step[a]);
    }
  }
  MuscleSolution s = evaluate(pr, best);
  s.converged = true;
  return s;
}

ActivationSummary group_activation_summary(const SimulationTrace& trace) {
  ActivationSummary out;
  const std::size_t nm = trace.muscle_names.size();
  if (nm == 0 || trace.size() == 0) return out;
  double fc = 0, fa = 0, eo = 0, ea = 0;
  long nc = 0, no = 0, na = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!trace.in_motion(k)) continue;
    double flex = 0, ext = 0;
    int nflex = 0, next = 0;
    for (std::size_t i = 0; i < nm; ++i) {
      if (trace.muscle_flexor[i]) {
        flex += trace.activation[i][k];
        ++nflex;
      } else {
        ext += trace.activation[i][k];
        ++next;
      }
    }
    flex = nflex ? flex / nflex : 0.0;
    ext = next ? ext / next : 0.0;
    const bool closing = trace.closing(k);
    fa += flex;
    ea += ext;
    ++na;
    if (closing) {
      fc += flex;
      ++nc;
    } else {
      eo += ext;
      ++no;
    }
  }
  if (nc) out.flexor_closing = fc / nc;
  if (no) out.extensor_opening = eo / no;
  if (na) {
    out.flexor_cycle = fa / na;
    out.extensor_cycle = ea / na;
  }
  return out;
}

}  // namespace exosim::muscles
