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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exosim/signals.hpp"

namespace exosim::signals {

/// One recording session: kinetics at the controller rate, EMG at the
/// amplifier rate, both starting at t = 0.
struct SessionData {
  Channel theta;  // rad
  Channel fx, fy, fz;  // N
  bool has_emg = false;
  Channel fdi, ei, edc, fds;  // mV
  double bpm = 0.0;  // metronome tag, 0 when unknown
  std::string subject;
};

/// Reads `kinetics.csv` (t,theta_rad,fx_N,fy_N,fz_N), the optional
/// `emg.csv` (t,fdi_mV,ei_mV,edc_mV,fds_mV) and the optional
/// `manifest.json` ({"bpm", "subject", "kinetics_rate_hz", "emg_rate_hz"}).
/// Rates not given in the manifest are inferred from the time column.
/// Missing or unreadable files raise IoError; schema problems raise
/// ValidationError listing every file and line at fault.
SessionData load_session(const std::filesystem::path& dir);

/// Writes a session in the layout load_session reads.
void write_session(const SessionData& session, const std::filesystem::path& dir);

struct PipelineOptions {
  double rate = 350.0;             // Hz, common analysis rate
  int order = 4;                   // Butterworth order for every filter
  double position_cutoff = 8.0;    // Hz
  double force_cutoff = 10.0;      // Hz
  double emg_highpass = 20.0;      // Hz
  double emg_lowpass = 500.0;      // Hz, applied at the EMG rate
  std::size_t bias_samples = 1000; // 0 skips bias removal
  std::size_t envelope_window = 30;
  std::size_t envelope_overlap = 29;
  double min_separation = 0.5;     // s
  double prominence = 0.25;        // fraction of the angle range
  std::string reference = "fdi";
};

struct SessionResult {
  CycleSet cycles;
  CycleAverage theta, theta_rate, fx, fy, fz;
  std::vector<CycleAverage> emg;  // normalized envelopes, empty without EMG
  double mean_range = 0.0;        // rad, mean over cycles of max - min angle
  double bpm = 0.0;
  std::string subject;
};

/// Kinetics: bias removal on the raw force, resample, then lowpass
/// (position and force cutoffs); rate from the filtered angle.
/// EMG: highpass and lowpass at the EMG rate, resample, rectify, RMS
/// envelope, cycle-average, normalize to the reference muscle.
/// Cycles come from the filtered angle.
SessionResult process_session(const SessionData& session, const PipelineOptions& options = {});

/// Writes position.csv, velocity.csv, force.csv, emg.csv (when present)
/// and cycles.json into `dir`, creating it if needed.
void write_session_result(const SessionResult& result, const std::filesystem::path& dir);

}  // namespace exosim::signals
