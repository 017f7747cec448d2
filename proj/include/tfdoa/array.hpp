// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "tfdoa/fft.hpp"

namespace tfdoa {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

struct ArrayGeometry {
  std::vector<Vec3> positions;  // meters
  double speed_of_sound = 343.0;

  Vec3 centroid() const;
};

// Uniform azimuth grid covering [0, 360) degrees; resolution must divide 360.
struct AngleGrid {
  double resolution = 0.5;
  std::vector<double> angles;

  explicit AngleGrid(double resolution_deg);
};

// Precomputed steering vectors v(theta, f), indexed (theta-index, bin, mic).
struct SteeringField {
  int n_theta = 0;
  int F = 0;
  int M = 0;
  std::vector<cplx> vectors;
  std::vector<double> bin_freqs;

  const cplx* at(int theta_idx, int f) const {
    return vectors.data() + (static_cast<std::size_t>(theta_idx) * F + f) * M;
  }
};

// rows span the y axis, cols the x axis; the grid lies in a plane parallel
// to xy with centroid at `center`.
ArrayGeometry rect_array(int rows, int cols, double spacing_m, Vec3 center);

// Far-field plane wave response, phase referenced to the array centroid:
// v_m = exp(-j 2 pi f tau_m), tau_m = -(p_m - centroid) . u(theta) / c.
std::vector<cplx> steering_vector(const ArrayGeometry& geom, double theta_deg,
                                  double freq_hz);

SteeringField build_steering_field(const ArrayGeometry& geom,
                                   const AngleGrid& grid,
                                   const std::vector<double>& bin_freqs);

// Circular distance in degrees, in [0, 180].
double angular_distance(double a_deg, double b_deg);

// {"positions_m": [[x,y,z],...], "speed_of_sound": 343}
ArrayGeometry geometry_from_json_string(const std::string& text);

}  // namespace tfdoa
