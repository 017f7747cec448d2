// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "tfdoa/array.hpp"
#include "tfdoa/linalg.hpp"
#include "tfdoa/mask.hpp"
#include "tfdoa/signal.hpp"

namespace tfdoa {

// Per-frequency weighted spatial covariance matrices
// Phi(f) = sum_t (w . y)(w . y)^H.
struct Wscm {
  int M = 0;
  std::vector<CMatrix> phi;  // one per bin
};

// Per-frequency normalized SCMs R(f) = sum_t yt yt^H / ||y||^2 with
// yt = w . y; trace(R(f)) <= T since weights are in [0, 1].
struct NormScm {
  int M = 0;
  std::vector<CMatrix> r;
};

struct SpatialSpectrum {
  std::vector<double> values;  // aligned to an AngleGrid
  std::string criterion;
};

Wscm compute_wscm(const SnapshotTensor& y, const MaskTensor& w);

// Snapshots with ||y(t,f)||^2 <= eps contribute nothing.
NormScm compute_norm_scm(const SnapshotTensor& y, const MaskTensor& w,
                         double eps = 1e-30);

// value(theta) = sum_f 1 / max(v^H N N^H v, delta). When floor_delta < 0 the
// floor defaults to 1e-12 * mean trace of Phi(f).
SpatialSpectrum spectrum_music(const Wscm& wscm, const SteeringField& field,
                               double floor_delta = -1.0);

// value(theta) = sum_f |v^H p(f)|^2 with p the principal eigenvector.
SpatialSpectrum spectrum_principal(const Wscm& wscm,
                                   const SteeringField& field);

// value(theta) = sum_f v^H Phi(f) v.
SpatialSpectrum spectrum_srp(const Wscm& wscm, const SteeringField& field);

// value(theta) = sum_f v^H R(f) v.
SpatialSpectrum spectrum_proposed(const NormScm& scm,
                                  const SteeringField& field);

// Least-squares fit residual of the normalized filtered snapshots against
// the candidate steering vector, with the source spectrum eliminated in
// closed form via the steering vector pseudoinverse.
double eq5_residual(const SnapshotTensor& y, const MaskTensor& w,
                    const SteeringField& field, int theta_index,
                    double eps = 1e-30);

// Grid angle of the global maximum; ties break toward the smallest angle.
double estimate_doa(const SpatialSpectrum& spectrum, const AngleGrid& grid);

// CSV columns theta_deg,value,normalized_value (normalized by the max).
void export_spectrum_csv(const SpatialSpectrum& spectrum,
                         const AngleGrid& grid, const std::string& path);

}  // namespace tfdoa
