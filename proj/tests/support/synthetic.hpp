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

#include <cmath>
#include <numbers>
#include <random>

#include "exosim/session.hpp"

namespace exosim::testing {

/// Recorded session at the hardware rates: motor angle and load cell at
/// 155 Hz, EMG at 2 kHz. The angle follows a raised cosine of
/// `range_deg` peak to peak at 40 beats per minute (one beat per half
/// movement), starting and ending at full flexion so that `cycles`
/// extension extremes lie inside the record. EMG bursts are phase-locked
/// white noise with fixed per-muscle gains.
inline signals::SessionData synthetic_session(int cycles = 16, double range_deg = 16.0,
                                              unsigned seed = 2026) {
  using std::numbers::pi;
  const double period = 1.5, kin_fs = 155.0, emg_fs = 2000.0;
  const double amp = range_deg * pi / 180.0;
  const double seconds = cycles * period;
  signals::SessionData s;
  s.bpm = 40.0;
  s.subject = "synthetic";
  s.theta = {kin_fs, {}, "rad"};
  s.fx = {kin_fs, {}, "N"};
  s.fy = {kin_fs, {}, "N"};
  s.fz = {kin_fs, {}, "N"};
  const auto nk = static_cast<std::size_t>(std::floor(seconds * kin_fs));
  for (std::size_t k = 0; k <= nk; ++k) {
    const double ph = 2 * pi * (k / kin_fs) / period;
    s.theta.samples.push_back(0.5 * amp * (1 + std::cos(ph)));
    s.fx.samples.push_back(0.3 + 0.05 * std::sin(ph));
    s.fy.samples.push_back(-0.1);
    s.fz.samples.push_back(0.3 - 0.8 * std::sin(ph));
  }
  s.has_emg = true;
  s.fdi = {emg_fs, {}, "mV"};
  s.ei = {emg_fs, {}, "mV"};
  s.edc = {emg_fs, {}, "mV"};
  s.fds = {emg_fs, {}, "mV"};
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto ne = static_cast<std::size_t>(std::floor(seconds * emg_fs));
  for (std::size_t k = 0; k <= ne; ++k) {
    const double ph = 2 * pi * (k / emg_fs) / period;
    const double flex = 0.5 * (1 - std::sin(ph)), ext = 0.5 * (1 + std::sin(ph));
    s.fdi.samples.push_back(0.4 * (0.1 + flex) * noise(rng));
    s.ei.samples.push_back(0.2 * (0.1 + ext) * noise(rng));
    s.edc.samples.push_back(0.3 * (0.1 + ext) * noise(rng));
    s.fds.samples.push_back(0.25 * (0.1 + flex) * noise(rng));
  }
  return s;
}

}  // namespace exosim::testing
