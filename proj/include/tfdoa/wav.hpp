// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "tfdoa/signal.hpp"

namespace tfdoa {

// 16-bit PCM mono 16 kHz only; samples scaled by 1/32768 into [-1, 1).
TimeSignal load_wav(const std::string& path);

// Writes 16-bit PCM mono. Samples are clipped to [-1, 1); when peak_factor is
// given it receives max|sample| of the input so callers can report clipping.
void save_wav(const std::string& path, const TimeSignal& signal,
              double* peak_factor = nullptr);

}  // namespace tfdoa
