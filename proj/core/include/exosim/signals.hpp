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

#include <cstddef>
#include <string>
#include <vector>

namespace exosim::signals {

/// Uniformly sampled signal.
struct Channel {
  double fs = 1.0;  // Hz
  std::vector<double> samples;
  std::string unit;

  std::size_t size() const { return samples.size(); }
};

/// Throws ValidationError unless fs > 0 and all samples are finite.
void validate(const Channel& channel);

enum class FilterKind { lowpass, highpass };

/// One biquad in transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0{0.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
};

struct Sos {
  std::vector<Biquad> sections;
  int order() const { return 2 * static_cast<int>(sections.size()); }
};

/// Digital Butterworth filter by bilinear transform with the cutoff
/// prewarped, so the -3 dB point lands exactly on `cutoff`. Orders 2 and 4.
/// Throws FilterDesignError for unsupported order or cutoff outside (0, fs/2).
Sos design_filter(int order, double cutoff, FilterKind kind, double fs);

/// Complex gain magnitude of the cascade at frequency f.
double magnitude_response(const Sos& sos, double f, double fs);

/// Single forward pass from rest.
std::vector<double> filter(const Sos& sos, const std::vector<double>& x);

/// Forward-backward filtering. The input is extended at both ends by odd
/// reflection (3 x order samples) and each pass starts from the section
/// steady state for its first sample. Throws LengthError when the channel
/// has no more than 3 x order samples.
Channel filter_zero_phase(const Sos& sos, const Channel& channel);

/// Polyphase resampling by the rational ratio closest to fs_new / fs
/// (denominator at most 1000), with a Kaiser-windowed sinc anti-alias
/// filter. Ends are extended by odd reflection. Output length is
/// ceil(n * up / down); the returned fs is fs * up / down.
Channel resample(const Channel& channel, double fs_new);

/// Subtracts the mean of the first n_samples. Throws LengthError when
/// n_samples is zero or exceeds the channel length.
Channel remove_bias(const Channel& channel, std::size_t n_samples = 1000);

/// Index range [start, end) of one cycle; `end` is the next cycle's start.
struct Cycle {
  std::size_t start{0};
  std::size_t end{0};
};

struct CycleSet {
  double fs = 1.0;
  std::vector<Cycle> cycles;
};

/// Splits a motor-angle record at its extension extremes (angle minima in
/// the closing-positive convention). Minima closer than min_separation
/// seconds are thinned keeping the deeper one; minima whose prominence is
/// below prominence_fraction of the signal range are dropped. Partial cycles
/// before the first and after the last extreme are discarded. Throws
/// SegmentationError when fewer than two extremes remain.
CycleSet segment_cycles(const Channel& angle, double min_separation = 0.5,
                        double prominence_fraction = 0.25);

/// Sliding RMS with hop = window - overlap. Sample i covers
/// [i * hop, i * hop + window). Throws LengthError for a short input and
/// ValidationError unless window > overlap >= 0.
Channel rms_envelope(const Channel& rectified, std::size_t window = 30,
                     std::size_t overlap = 29);

/// Absolute value of every sample.
Channel rectify(const Channel& channel);

/// Central differences (one-sided at the ends), in units per second.
Channel derivative(const Channel& channel);

/// Cycle-normalized statistics of one signal. Each cycle is linearly
/// interpolated onto `length` points of phase [0, 1) where `length` is the
/// median cycle length; variance is the population variance across cycles.
struct CycleAverage {
  std::string name;
  std::size_t cycles{0};
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> stddev;
  std::vector<std::vector<double>> aligned;  // one row per cycle
};

/// `offset` is the cycle-grid position (in grid samples) of the channel's
/// first sample, e.g. half a window for an RMS envelope. A channel at a
/// different rate is mapped by the rate ratio. Interpolation points outside
/// the channel hold the edge value. Throws SegmentationError for fewer than
/// two cycles.
CycleAverage average_cycles(const CycleSet& cycles, const Channel& channel,
                            const std::string& name = "", double offset = 0.0);

/// Divides every channel by the maximum of the reference channel's cycle
/// mean (variance by its square). Throws NormalizationError when the
/// reference is missing or its maximum is not positive.
std::vector<CycleAverage> normalize_emg(const std::vector<CycleAverage>& envelopes,
                                        const std::string& reference = "fdi");

}  // namespace exosim::signals
