// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "tfdoa/fft.hpp"

namespace tfdoa {

constexpr double kSampleRate = 16000.0;

struct TimeSignal {
  std::vector<double> samples;
  double sample_rate = kSampleRate;
};

enum class Window { hann, rect };

struct StftConfig {
  int fft_size = 1024;
  int hop = 512;
  Window window = Window::hann;
  double f_lo = 50.0;   // Hz, closed interval
  double f_hi = 7000.0;
};

// Single-channel complex spectrogram, T frames by F in-band bins.
struct Spectrogram {
  int T = 0;
  int F = 0;
  std::vector<cplx> data;  // row-major (t, f)
  std::vector<double> bin_freqs;

  cplx& at(int t, int f) { return data[static_cast<std::size_t>(t) * F + f]; }
  const cplx& at(int t, int f) const {
    return data[static_cast<std::size_t>(t) * F + f];
  }
};

// Multichannel snapshot cube y(m, t, f).
struct SnapshotTensor {
  int M = 0;
  int T = 0;
  int F = 0;
  std::vector<cplx> data;  // m-major, then t, then f
  std::vector<double> bin_freqs;

  cplx& at(int m, int t, int f) {
    return data[(static_cast<std::size_t>(m) * T + t) * F + f];
  }
  const cplx& at(int m, int t, int f) const {
    return data[(static_cast<std::size_t>(m) * T + t) * F + f];
  }
};

// Frames start at t*hop; T = floor((len - fft_size)/hop) + 1. Only bins whose
// center frequency lies in [f_lo, f_hi] are kept.
Spectrogram compute_stft(const TimeSignal& signal, const StftConfig& cfg);

SnapshotTensor stack_snapshots(const std::vector<Spectrogram>& channels);

// Keeps the first T frames, zero-padding when fewer are available.
SnapshotTensor pad_or_truncate(const SnapshotTensor& y, int frames);

// Harmonic stack with a random fundamental in [100, 300] Hz plus
// amplitude-modulated band noise; mean power normalized to 1.
TimeSignal synth_speech_like(std::uint64_t seed, double duration_s);

enum class InterfKind { machine, water_like, wind_like };

TimeSignal synth_interference(InterfKind kind, std::uint64_t seed,
                              double duration_s);

}  // namespace tfdoa
