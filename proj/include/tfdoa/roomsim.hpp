// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tfdoa/array.hpp"
#include "tfdoa/signal.hpp"

namespace tfdoa {

struct RoomConfig {
  std::array<double, 3> dims{9.0, 7.0, 3.5};  // meters
  double rt60 = 0.3;                          // seconds
  double fs = kSampleRate;
  int max_image_order = 20;  // max reflections per image source
};

enum class RirMode { nearest_sample, frac_delay };

// Uniform Sabine absorption: alpha = 0.161 V / (S rt60). Errors when the
// requested rt60 would need alpha > 1.
double sabine_absorption(const RoomConfig& room);

// Allen-Berkley image source RIR. Per image: amplitude beta^R / (4 pi d)
// with beta = sqrt(1 - alpha) and R the reflection count, delay d/c.
// frac_delay places taps with an 81-tap Hann-windowed sinc. Images later
// than 1.25 rt60 + 50 ms are dropped.
TimeSignal simulate_rir(const RoomConfig& room, Vec3 src, Vec3 mic,
                        double alpha, RirMode mode, double c = 343.0);

// Cylindrical placement relative to the array centroid; z is absolute.
struct SourcePlacement {
  double r = 0.0;
  double theta_deg = 0.0;
  double z = 0.0;
};

struct Scenario {
  RoomConfig room;
  ArrayGeometry array;
  SourcePlacement speaker;
  std::vector<SourcePlacement> interferers;
  double snr_db = 20.0;  // +inf disables noise
  double sir_db = 0.0;
  std::uint64_t seed = 0;
};

struct ScenarioParams {
  double rt60 = 0.3;
  double snr_db = 20.0;
  double sir_db = 0.0;
  int K = 1;
};

// Paper-style dining room: 9 x 7 x 3.5 m, 3x3 array (0.02 m pitch) at the
// room center. r ~ U[1,3], z ~ U[1,1.8], theta ~ U[0,360) with every
// pairwise separation >= 10 degrees (angles are redrawn on failure).
Scenario sample_scenario(const ScenarioParams& params, std::uint64_t seed);

Vec3 source_position(const Scenario& scenario, const SourcePlacement& p);

struct RenderedSignals {
  std::vector<TimeSignal> mixture;
  std::vector<TimeSignal> speech_images;
  std::vector<TimeSignal> nonspeech_images;
};

// Convolves each source with its per-mic RIRs. Interferers are individually
// power-normalized at mic 1, summed, then jointly scaled to the target SIR;
// white noise is added per mic at the target SNR. Both ratios are referenced
// to the rendered speech image power at mic 1.
RenderedSignals render_scenario(const Scenario& scenario,
                                const TimeSignal& speech,
                                const std::vector<TimeSignal>& interferers,
                                RirMode mode = RirMode::frac_delay);

std::string scenario_to_json_string(const Scenario& scenario);
Scenario scenario_from_json_string(const std::string& text);

// Backward-integrated energy decay, one dB value per RIR sample.
std::vector<double> schroeder_decay_db(const TimeSignal& rir);

// First time (seconds) the decay curve falls below level_db.
double decay_crossing_time(const std::vector<double>& decay_db, double fs,
                           double level_db = -60.0);

}  // namespace tfdoa
