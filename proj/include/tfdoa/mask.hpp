// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "tfdoa/signal.hpp"

namespace tfdoa {

// Per-microphone T-F weights in [0, 1], same (M, T, F) shape as the
// snapshot tensor they apply to.
struct MaskTensor {
  int M = 0;
  int T = 0;
  int F = 0;
  std::vector<double> weights;  // m-major, then t, then f

  double& at(int m, int t, int f) {
    return weights[(static_cast<std::size_t>(m) * T + t) * F + f];
  }
  const double& at(int m, int t, int f) const {
    return weights[(static_cast<std::size_t>(m) * T + t) * F + f];
  }
};

struct PostProc {
  enum class Kind {
    identity,
    minimum,
    maximum,
    arith_mean,
    arith_median,
    hadamard,
    geo_mean,
    binary_threshold,
    constant
  };
  Kind kind = Kind::identity;
  double beta = 0.5;  // binary_threshold only, must be in (0, 1)
};

MaskTensor ones_mask(int M, int T, int F);

// Oracle ideal ratio mask from per-mic image spectra:
// G = sqrt(|s|^2 / (|s|^2 + |n|^2)), with 0/0 -> 0.
MaskTensor oracle_irm(const SnapshotTensor& speech_images,
                      const SnapshotTensor& nonspeech_images);

MaskTensor post_process(const PostProc& pp, const MaskTensor& g);

// TFW1 container: magic "TFW1", u32le dims M,T,F, then f32le values
// in (m, t, f) order.
void save_mask(const std::string& path, const MaskTensor& mask);
MaskTensor load_mask(const std::string& path, int M, int T, int F);

// Accepts the plain kind names plus "binary_threshold(<beta>)".
PostProc parse_postproc(const std::string& name);
std::string to_string(const PostProc& pp);

}  // namespace tfdoa
