// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "tfdoa/rng.hpp"

namespace tfdoa {

namespace {

constexpr double kPi = 3.14159265358979323846;

double mean_power(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

void normalize_power(std::vector<double>& x) {
  const double p = mean_power(x);
  if (p <= 0.0) return;
  const double g = 1.0 / std::sqrt(p);
  for (double& v : x) v *= g;
}

}  // namespace

Spectrogram compute_stft(const TimeSignal& signal, const StftConfig& cfg) {
  if (cfg.hop <= 0 || cfg.fft_size <= 0 || cfg.hop > cfg.fft_size)
    throw std::invalid_argument("stft: invalid fft_size/hop");
  if (!(cfg.f_lo >= 0.0 && cfg.f_lo < cfg.f_hi))
    throw std::invalid_argument("stft: invalid band");
  const std::size_t len = signal.samples.size();
  const std::size_t n = static_cast<std::size_t>(cfg.fft_size);
  if (len < n) throw std::invalid_argument("stft: signal shorter than fft_size");

  const int T = static_cast<int>((len - n) / cfg.hop) + 1;

  // retained bin indices (closed band)
  std::vector<int> bins;
  std::vector<double> bin_freqs;
  for (int k = 0; k <= cfg.fft_size / 2; ++k) {
    const double fk = static_cast<double>(k) * signal.sample_rate / cfg.fft_size;
    if (fk >= cfg.f_lo && fk <= cfg.f_hi) {
      bins.push_back(k);
      bin_freqs.push_back(fk);
    }
  }
  if (bins.empty()) throw std::invalid_argument("stft: empty band");

  std::vector<double> window(n, 1.0);
  if (cfg.window == Window::hann) {
    for (std::size_t i = 0; i < n; ++i)
      window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                       static_cast<double>(n));
  }

  Spectrogram out;
  out.T = T;
  out.F = static_cast<int>(bins.size());
  out.bin_freqs = bin_freqs;
  out.data.resize(static_cast<std::size_t>(T) * out.F);

  std::vector<cplx> frame(n);
  for (int t = 0; t < T; ++t) {
    const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
    for (std::size_t i = 0; i < n; ++i)
      frame[i] = cplx(signal.samples[start + i] * window[i], 0.0);
    fft_inplace(frame, false);
    for (int f = 0; f < out.F; ++f) out.at(t, f) = frame[bins[f]];
  }
  return out;
}

SnapshotTensor stack_snapshots(const std::vector<Spectrogram>& channels) {
  if (channels.empty()) throw std::invalid_argument("stack: no channels");
  const Spectrogram& ref = channels.front();
  for (const Spectrogram& ch : channels) {
    if (ch.T != ref.T || ch.F != ref.F || ch.bin_freqs != ref.bin_freqs)
      throw std::invalid_argument("stack: channel shape mismatch");
  }
  SnapshotTensor y;
  y.M = static_cast<int>(channels.size());
  y.T = ref.T;
  y.F = ref.F;
  y.bin_freqs = ref.bin_freqs;
  y.data.resize(static_cast<std::size_t>(y.M) * y.T * y.F);
  for (int m = 0; m < y.M; ++m)
    for (int t = 0; t < y.T; ++t)
      for (int f = 0; f < y.F; ++f) y.at(m, t, f) = channels[m].at(t, f);
  return y;
}

SnapshotTensor pad_or_truncate(const SnapshotTensor& y, int frames) {
  if (frames <= 0) throw std::invalid_argument("pad_or_truncate: frames <= 0");
  SnapshotTensor out;
  out.M = y.M;
  out.T = frames;
  out.F = y.F;
  out.bin_freqs = y.bin_freqs;
  out.data.assign(static_cast<std::size_t>(out.M) * out.T * out.F,
                  cplx(0.0, 0.0));
  const int T = std::min(frames, y.T);
  for (int m = 0; m < y.M; ++m)
    for (int t = 0; t < T; ++t)
      for (int f = 0; f < y.F; ++f) out.at(m, t, f) = y.at(m, t, f);
  return out;
}

TimeSignal synth_speech_like(std::uint64_t seed, double duration_s) {
  if (duration_s <= 0.0) throw std::invalid_argument("synth: duration <= 0");
  const std::size_t n =
      static_cast<std::size_t>(std::lround(duration_s * kSampleRate));
  Rng rng(seed);
  const double f0 = rng.uniform(100.0, 300.0);
  const int n_harm =
      std::min(48, static_cast<int>(std::floor(7000.0 / (1.05 * f0))));

  // Voiced part: harmonic stack with moving pitch (vibrato + slow drift) and
  // a syllabic amplitude envelope. The pitch movement sweeps each harmonic
  // across several STFT bins so successive frames excite different bins.
  const double vib_rate = rng.uniform(4.0, 7.0);
  const double vib_phase = rng.uniform(0.0, 2.0 * kPi);
  const double drift_rate = rng.uniform(0.15, 0.5);
  const double drift_phase = rng.uniform(0.0, 2.0 * kPi);
  const double syl_rate = rng.uniform(2.0, 5.0);
  const double syl_phase = rng.uniform(0.0, 2.0 * kPi);
  std::vector<double> phase(static_cast<std::size_t>(n_harm) + 1);
  for (int k = 1; k <= n_harm; ++k)
    phase[static_cast<std::size_t>(k)] = rng.uniform(0.0, 2.0 * kPi);

  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    const double f_inst =
        f0 * (1.0 + 0.015 * std::sin(2.0 * kPi * vib_rate * t + vib_phase) +
              0.02 * std::sin(2.0 * kPi * drift_rate * t + drift_phase));
    const double env = 0.55 + 0.45 * std::sin(2.0 * kPi * syl_rate * t +
                                              syl_phase);
    const double dphi = 2.0 * kPi * f_inst / kSampleRate;
    double s = 0.0;
    for (int k = 1; k <= n_harm; ++k) {
      double& ph_k = phase[static_cast<std::size_t>(k)];
      ph_k += static_cast<double>(k) * dphi;
      if (ph_k > 2.0 * kPi) ph_k -= 2.0 * kPi * std::floor(ph_k / (2.0 * kPi));
      s += std::sin(ph_k) / std::sqrt(static_cast<double>(k));
    }
    x[i] = env * s;
  }

  // band noise 300 Hz .. 3 kHz (difference of one-pole lowpasses), slow AM
  std::vector<double> noise(n, 0.0);
  const double a_hi = std::exp(-2.0 * kPi * 3000.0 / kSampleRate);
  const double a_lo = std::exp(-2.0 * kPi * 300.0 / kSampleRate);
  double s_hi = 0.0, s_lo = 0.0;
  const double mod_rate = rng.uniform(2.0, 6.0);
  const double mod_phase = rng.uniform(0.0, 2.0 * kPi);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s_hi = a_hi * s_hi + (1.0 - a_hi) * g;
    s_lo = a_lo * s_lo + (1.0 - a_lo) * g;
    const double env = 0.6 + 0.4 * std::sin(2.0 * kPi * mod_rate *
                                                static_cast<double>(i) /
                                                kSampleRate +
                                            mod_phase);
    noise[i] = (s_hi - s_lo) * env;
  }

  // fricative-like bursts: 2 .. 7 kHz noise gated by a squared half-sine
  std::vector<double> fric(n, 0.0);
  const double a_fhi = std::exp(-2.0 * kPi * 7000.0 / kSampleRate);
  const double a_flo = std::exp(-2.0 * kPi * 2000.0 / kSampleRate);
  double sf_hi = 0.0, sf_lo = 0.0;
  const double fric_rate = rng.uniform(1.0, 3.0);
  const double fric_phase = rng.uniform(0.0, 2.0 * kPi);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sf_hi = a_fhi * sf_hi + (1.0 - a_fhi) * g;
    sf_lo = a_flo * sf_lo + (1.0 - a_flo) * g;
    const double gate = std::sin(2.0 * kPi * fric_rate *
                                     static_cast<double>(i) / kSampleRate +
                                 fric_phase);
    const double env = gate > 0.0 ? gate * gate : 0.0;
    fric[i] = (sf_hi - sf_lo) * env;
  }

  const double ph = mean_power(x);
  const double pn = mean_power(noise);
  const double pf = mean_power(fric);
  if (pn > 0.0) {
    const double g = std::sqrt(0.1 * ph / pn);  // noise at -10 dB vs harmonics
    for (std::size_t i = 0; i < n; ++i) x[i] += g * noise[i];
  }
  if (pf > 0.0) {
    const double g = std::sqrt(0.2 * ph / pf);  // bursts at -7 dB vs harmonics
    for (std::size_t i = 0; i < n; ++i) x[i] += g * fric[i];
  }
  normalize_power(x);
  return TimeSignal{std::move(x), kSampleRate};
}

TimeSignal synth_interference(InterfKind kind, std::uint64_t seed,
                              double duration_s) {
  if (duration_s <= 0.0) throw std::invalid_argument("synth: duration <= 0");
  const std::size_t n =
      static_cast<std::size_t>(std::lround(duration_s * kSampleRate));
  Rng rng(seed ^ 0xa2c1f3e5b7d90811ULL);
  std::vector<double> x(n, 0.0);

  switch (kind) {
    case InterfKind::machine: {
      const double f0 = 120.0;  // fixed fundamental
      const int n_harm = static_cast<int>(std::floor(6000.0 / f0));
      for (int k = 1; k <= n_harm; ++k) {
        const double amp = 1.0 / std::sqrt(static_cast<double>(k));
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double w = 2.0 * kPi * f0 * static_cast<double>(k) / kSampleRate;
        for (std::size_t i = 0; i < n; ++i)
          x[i] += amp * std::sin(w * static_cast<double>(i) + phase);
      }
      break;
    }
    case InterfKind::water_like: {
      // high-pass filtered noise
      const double a = std::exp(-2.0 * kPi * 1500.0 / kSampleRate);
      double lp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        lp = a * lp + (1.0 - a) * g;
        x[i] = g - lp;
      }
      break;
    }
    case InterfKind::wind_like: {
      // low-pass noise with slow gusty modulation
      const double a = std::exp(-2.0 * kPi * 100.0 / kSampleRate);
      double lp = 0.0;
      const double mod_rate = rng.uniform(0.2, 0.8);
      const double mod_phase = rng.uniform(0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < n; ++i) {
        lp = a * lp + (1.0 - a) * rng.gaussian();
        const double env = 0.7 + 0.3 * std::sin(2.0 * kPi * mod_rate *
                                                    static_cast<double>(i) /
                                                    kSampleRate +
                                                mod_phase);
        x[i] = lp * env;
      }
      break;
    }
  }
  normalize_power(x);
  return TimeSignal{std::move(x), kSampleRate};
}

}  // namespace tfdoa
