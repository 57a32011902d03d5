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


#include "exosim/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "exosim/errors.hpp"

namespace exosim::signals {
namespace {

double steady_gain(const Biquad& q) { return (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2); }

// Runs the cascade over x in place, starting every section from its steady
// state for a constant input equal to x[0].
void run_cascade(const Sos& sos, std::vector<double>& x) {
  if (x.empty()) return;
  double level = x.front();
  for (const auto& q : sos.sections) {
    const double g = steady_gain(q);
    double z2 = (q.b2 - q.a2 * g) * level;
    double z1 = (q.b1 - q.a1 * g) * level + z2;
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
    level *= g;
  }
}

// Odd reflection about the end samples, clamped for very short inputs.
double extended(const std::vector<double>& x, long k) {
  const long n = static_cast<long>(x.size());
  if (k < 0) {
    const long r = std::min(-k, n - 1);
    return 2.0 * x.front() - x[static_cast<std::size_t>(r)];
  }
  if (k >= n) {
    const long r = std::max(2 * (n - 1) - k, 0L);
    return 2.0 * x.back() - x[static_cast<std::size_t>(r)];
  }
  return x[static_cast<std::size_t>(k)];
}

// Best rational approximation up/down of r with down <= max_den.
std::pair<long, long> rational(double r, long max_den) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = x - a;
    if (frac < 1e-12 || std::abs(static_cast<double>(p1) / static_cast<double>(q1) - r) <= 1e-12 * r)
      break;
    x = 1.0 / frac;
  }
  const long g = std::gcd(p1, q1);
  return {p1 / g, q1 / g};
}

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double sample_at(const std::vector<double>& x, double pos) {
  if (pos <= 0.0) return x.front();
  const double last = static_cast<double>(x.size() - 1);
  if (pos >= last) return x.back();
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return x[i] + f * (x[i + 1] - x[i]);
}

}  // namespace

void validate(const Channel& channel) {
  std::vector<std::string> issues;
  if (!(channel.fs > 0.0) || !std::isfinite(channel.fs)) issues.push_back("fs: must be positive");
  for (std::size_t i = 0; i < channel.samples.size(); ++i) {
    if (!std::isfinite(channel.samples[i])) {
      issues.push_back("sample " + std::to_string(i) + ": not finite");
      break;
    }
  }
  if (!issues.empty()) throw ValidationError(issues);
}

Sos design_filter(int order, double cutoff, FilterKind kind, double fs) {
  if (order != 2 && order != 4) {
    throw FilterDesignError("filter order " + std::to_string(order) + " not supported (use 2 or 4)");
  }
  if (!(fs > 0.0) || !(cutoff > 0.0) || !(cutoff < 0.5 * fs)) {
    throw FilterDesignError("cutoff " + std::to_string(cutoff) + " Hz must lie in (0, fs/2) for fs " +
                            std::to_string(fs) + " Hz");
  }
  const double k = 2.0 * fs;
  const double w = k * std::tan(std::numbers::pi * cutoff / fs);
  Sos sos;
  for (int i = 0; i < order / 2; ++i) {
    // Analog section s^2 + a s + w^2 from a conjugate prototype pole pair.
    const double re = std::cos(std::numbers::pi * (2.0 * i + order + 1.0) / (2.0 * order));
    const double a = -2.0 * re * w;
    const double b = w * w;
    const double a0 = k * k + a * k + b;
    Biquad q;
    q.a1 = (2.0 * b - 2.0 * k * k) / a0;
    q.a2 = (k * k - a * k + b) / a0;
    if (kind == FilterKind::lowpass) {
      q.b0 = b / a0;
      q.b1 = 2.0 * b / a0;
      q.b2 = b / a0;
    } else {
      q.b0 = k * k / a0;
      q.b1 = -2.0 * k * k / a0;
      q.b2 = k * k / a0;
    }
    sos.sections.push_back(q);
  }
  return sos;
}

double magnitude_response(const Sos& sos, double f, double fs) {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h{1.0, 0.0};
  for (const auto& q : sos.sections) {
    h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
  }
  return std::abs(h);
}

std::vector<double> filter(const Sos& sos, const std::vector<double>& x) {
  std::vector<double> y = x;
  for (const auto& q : sos.sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
  return y;
}

Channel filter_zero_phase(const Sos& sos, const Channel& channel) {
  const auto& x = channel.samples;
  const std::size_t pad = 3 * static_cast<std::size_t>(sos.order());
  if (x.size() <= pad) {
    throw LengthError("zero-phase filter needs more than " + std::to_string(pad) +
                      " samples, got " + std::to_string(x.size()));
  }
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  const std::size_t n = x.size();
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  run_cascade(sos, ext);
  std::reverse(ext.begin(), ext.end());
  run_cascade(sos, ext);
  std::reverse(ext.begin(), ext.end());

  Channel out{channel.fs, {}, channel.unit};
  out.samples.assign(ext.begin() + static_cast<long>(pad), ext.end() - static_cast<long>(pad));
  return out;
}

Channel resample(const Channel& channel, double fs_new) {
  if (!(fs_new > 0.0)) throw ValidationError("resample: target rate must be positive");
  const auto [up, down] = rational(fs_new / channel.fs, 1000);
  if (up == down || channel.samples.empty()) return channel;

  // Anti-alias lowpass at the lower of the two Nyquist rates, designed on
  // the upsampled grid; gain `up` restores the amplitude lost to the
  // inserted zeros.
  const long max_rate = std::max(up, down);
  const long half = 10 * max_rate;
  const double fc = 1.0 / static_cast<double>(max_rate);
  constexpr double kBeta = 5.0;
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  const double norm_i0 = std::cyl_bessel_i(0.0, kBeta);
  double sum = 0.0;
  for (long i = -half; i <= half; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(half);
    const double win = std::cyl_bessel_i(0.0, kBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm_i0;
    const double v = fc * sinc(fc * static_cast<double>(i)) * win;
    h[static_cast<std::size_t>(i + half)] = v;
    sum += v;
  }
  for (double& v : h) v *= static_cast<double>(up) / sum;

  const auto n = static_cast<long>(channel.samples.size());
  const long n_out = (n * up + down - 1) / down;
  Channel out{channel.fs * static_cast<double>(up) / static_cast<double>(down), {}, channel.unit};
  out.samples.resize(static_cast<std::size_t>(n_out));
  for (long m = 0; m < n_out; ++m) {
    const long center = m * down;
    // Input k contributes through tap center - k*up + half in [0, 2*half].
    const long k_lo = floor_div(center - half, up);
    const long k_hi = floor_div(center + half, up);
    // Each polyphase branch is normalized to unit DC gain; the raw branch
    // sums differ from one by the window ripple.
    double acc = 0.0, gain = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      const long tap = center - k * up + half;
      if (tap < 0 || tap > 2 * half) continue;
      acc += h[static_cast<std::size_t>(tap)] * extended(channel.samples, k);
      gain += h[static_cast<std::size_t>(tap)];
    }
    out.samples[static_cast<std::size_t>(m)] = acc / gain;
  }
  return out;
}

Channel remove_bias(const Channel& channel, std::size_t n_samples) {
  if (n_samples == 0 || n_samples > channel.samples.size()) {
    throw LengthError("bias window of " + std::to_string(n_samples) + " samples does not fit a " +
                      std::to_string(channel.samples.size()) + "-sample channel");
  }
  // Mean taken relative to the first sample, so a constant window is exact.
  const double x0 = channel.samples.front();
  double shifted = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) shifted += channel.samples[k] - x0;
  const double bias = x0 + shifted / static_cast<double>(n_samples);
  Channel out = channel;
  for (double& v : out.samples) v -= bias;
  return out;
}

CycleSet segment_cycles(const Channel& angle, double min_separation, double prominence_fraction) {
  const auto& th = angle.samples;
  const std::size_t n = th.size();
  if (n < 3) throw SegmentationError("angle record too short to segment");
  const auto [lo_it, hi_it] = std::minmax_element(th.begin(), th.end());
  const double range = *hi_it - *lo_it;
  if (!(range > 0.0)) throw SegmentationError("angle record is flat; no extension extremes");

  // Peaks of -theta; plateaus resolve to their middle sample.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = -th[i];
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(x[i - 1] < x[i])) continue;
    std::size_t ahead = i + 1;
    while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
    if (x[ahead] < x[i]) {
      peaks.push_back((i + ahead - 1) / 2);
      i = ahead - 1;
    }
  }

  // Thin by distance, deepest first.
  const double distance = min_separation * angle.fs;
  std::vector<std::size_t> order(peaks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[peaks[a]] > x[peaks[b]]; });
  std::vector<bool> keep(peaks.size(), true);
  for (std::size_t idx : order) {
    if (!keep[idx]) continue;
    for (std::size_t j = idx; j-- > 0 && static_cast<double>(peaks[idx] - peaks[j]) < distance;) keep[j] = false;
    for (std::size_t j = idx + 1;
         j < peaks.size() && static_cast<double>(peaks[j] - peaks[idx]) < distance; ++j) {
      keep[j] = false;
    }
  }

  std::vector<std::size_t> starts;
  const double min_prominence = prominence_fraction * range;
  for (std::size_t p = 0; p < peaks.size(); ++p) {
    if (!keep[p]) continue;
    const std::size_t i = peaks[p];
    double left = x[i];
    for (std::size_t j = i; j-- > 0;) {
      if (x[j] > x[i]) break;
      left = std::min(left, x[j]);
    }
    double right = x[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (x[j] > x[i]) break;
      right = std::min(right, x[j]);
    }
    if (x[i] - std::max(left, right) >= min_prominence) starts.push_back(i);
  }
  if (starts.size() < 2) {
    throw SegmentationError("found " + std::to_string(starts.size()) +
                            " extension extreme(s); need at least 2");
  }
  CycleSet set{angle.fs, {}};
  for (std::size_t c = 0; c + 1 < starts.size(); ++c) set.cycles.push_back({starts[c], starts[c + 1]});
  return set;
}

Channel rms_envelope(const Channel& rectified, std::size_t window, std::size_t overlap) {
  if (!(window > overlap)) throw ValidationError("rms_envelope: window must exceed overlap");
  const auto& x = rectified.samples;
  if (x.size() < window) {
    throw LengthError("rms_envelope: " + std::to_string(x.size()) + " samples is shorter than a " +
                      std::to_string(window) + "-sample window");
  }
  const std::size_t hop = window - overlap;
  const std::size_t n_out = (x.size() - window) / hop + 1;
  Channel out{rectified.fs / static_cast<double>(hop), {}, rectified.unit};
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    double acc = 0.0;
    for (std::size_t j = i * hop; j < i * hop + window; ++j) acc += x[j] * x[j];
    out.samples[i] = std::sqrt(acc / static_cast<double>(window));
  }
  return out;
}

Channel rectify(const Channel& channel) {
  Channel out = channel;
  for (double& v : out.samples) v = std::abs(v);
  return out;
}

Channel derivative(const Channel& channel) {
  const auto& x = channel.samples;
  Channel out{channel.fs, std::vector<double>(x.size(), 0.0), channel.unit + "/s"};
  const std::size_t n = x.size();
  if (n < 2) return out;
  out.samples[0] = (x[1] - x[0]) * channel.fs;
  out.samples[n - 1] = (x[n - 1] - x[n - 2]) * channel.fs;
  for (std::size_t i = 1; i + 1 < n; ++i) out.samples[i] = 0.5 * (x[i + 1] - x[i - 1]) * channel.fs;
  return out;
}

CycleAverage average_cycles(const CycleSet& cycles, const Channel& channel, const std::string& name,
                            double offset) {
  if (cycles.cycles.size() < 2) {
    throw SegmentationError("averaging needs at least 2 cycles, got " +
                            std::to_string(cycles.cycles.size()));
  }
  if (channel.samples.empty()) throw LengthError(name + ": empty channel");
  std::vector<std::size_t> lengths;
  for (const auto& c : cycles.cycles) lengths.push_back(c.end - c.start);
  std::sort(lengths.begin(), lengths.end());
  const std::size_t mid = lengths.size() / 2;
  const std::size_t len = lengths.size() % 2 == 1 ? lengths[mid]
                                                   : (lengths[mid - 1] + lengths[mid] + 1) / 2;

  const double scale = channel.fs / cycles.fs;
  CycleAverage avg;
  avg.name = name;
  avg.cycles = cycles.cycles.size();
  for (const auto& c : cycles.cycles) {
    std::vector<double> row(len);
    const double span = static_cast<double>(c.end - c.start);
    for (std::size_t j = 0; j < len; ++j) {
      const double grid = static_cast<double>(c.start) +
                          span * static_cast<double>(j) / static_cast<double>(len);
      row[j] = sample_at(channel.samples, (grid - offset) * scale);
    }
    avg.aligned.push_back(std::move(row));
  }
  const double count = static_cast<double>(avg.aligned.size());
  avg.mean.assign(len, 0.0);
  avg.variance.assign(len, 0.0);
  avg.stddev.assign(len, 0.0);
  for (std::size_t j = 0; j < len; ++j) {
    double s = 0.0;
    for (const auto& row : avg.aligned) s += row[j];
    const double m = s / count;
    double v = 0.0;
    for (const auto& row : avg.aligned) v += (row[j] - m) * (row[j] - m);
    avg.mean[j] = m;
    avg.variance[j] = v / count;
    avg.stddev[j] = std::sqrt(avg.variance[j]);
  }
  return avg;
}

std::vector<CycleAverage> normalize_emg(const std::vector<CycleAverage>& envelopes,
                                        const std::string& reference) {
  const auto ref = std::find_if(envelopes.begin(), envelopes.end(),
                                [&](const CycleAverage& a) { return a.name == reference; });
  if (ref == envelopes.end()) throw NormalizationError("reference channel '" + reference + "' missing");
  const double peak =
      ref->mean.empty() ? 0.0 : *std::max_element(ref->mean.begin(), ref->mean.end());
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw NormalizationError("reference channel '" + reference + "' has no positive cycle mean");
  }
  std::vector<CycleAverage> out = envelopes;
  for (auto& a : out) {
    for (double& v : a.mean) v /= peak;
    for (double& v : a.variance) v /= peak * peak;
    for (double& v : a.stddev) v /= peak;
    for (auto& row : a.aligned)
      for (double& v : row) v /= peak;
  }
  return out;
}

}  // namespace exosim::signals
