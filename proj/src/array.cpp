// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/array.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace tfdoa {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg2Rad = kPi / 180.0;
}  // namespace

Vec3 ArrayGeometry::centroid() const {
  Vec3 c;
  if (positions.empty()) return c;
  for (const Vec3& p : positions) {
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  const double inv = 1.0 / static_cast<double>(positions.size());
  c.x *= inv;
  c.y *= inv;
  c.z *= inv;
  return c;
}

AngleGrid::AngleGrid(double resolution_deg) : resolution(resolution_deg) {
  if (resolution_deg <= 0.0)
    throw std::invalid_argument("grid: resolution must be positive");
  const double count = 360.0 / resolution_deg;
  const long n = std::lround(count);
  if (n < 1 || std::fabs(count - static_cast<double>(n)) > 1e-9)
    throw std::invalid_argument("grid: resolution must divide 360");
  angles.resize(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k)
    angles[static_cast<std::size_t>(k)] = static_cast<double>(k) * resolution_deg;
}

ArrayGeometry rect_array(int rows, int cols, double spacing_m, Vec3 center) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("rect_array: rows/cols must be >= 1");
  if (spacing_m <= 0.0)
    throw std::invalid_argument("rect_array: spacing must be positive");
  ArrayGeometry geom;
  geom.positions.reserve(static_cast<std::size_t>(rows) * cols);
  const double x0 = -0.5 * spacing_m * static_cast<double>(cols - 1);
  const double y0 = -0.5 * spacing_m * static_cast<double>(rows - 1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      geom.positions.push_back({center.x + x0 + c * spacing_m,
                                center.y + y0 + r * spacing_m, center.z});
  return geom;
}

std::vector<cplx> steering_vector(const ArrayGeometry& geom, double theta_deg,
                                  double freq_hz) {
  if (geom.positions.empty())
    throw std::invalid_argument("steering: empty geometry");
  const Vec3 c = geom.centroid();
  const double th = theta_deg * kDeg2Rad;
  const double ux = std::cos(th), uy = std::sin(th);
  std::vector<cplx> v(geom.positions.size());
  for (std::size_t m = 0; m < v.size(); ++m) {
    const double dx = geom.positions[m].x - c.x;
    const double dy = geom.positions[m].y - c.y;
    const double tau = -(dx * ux + dy * uy) / geom.speed_of_sound;
    const double phase = -2.0 * kPi * freq_hz * tau;
    v[m] = cplx(std::cos(phase), std::sin(phase));
  }
  return v;
}

SteeringField build_steering_field(const ArrayGeometry& geom,
                                   const AngleGrid& grid,
                                   const std::vector<double>& bin_freqs) {
  if (grid.angles.empty()) throw std::invalid_argument("field: empty grid");
  SteeringField field;
  field.n_theta = static_cast<int>(grid.angles.size());
  field.F = static_cast<int>(bin_freqs.size());
  field.M = static_cast<int>(geom.positions.size());
  field.bin_freqs = bin_freqs;
  field.vectors.resize(static_cast<std::size_t>(field.n_theta) * field.F *
                       field.M);
  for (int i = 0; i < field.n_theta; ++i) {
    for (int f = 0; f < field.F; ++f) {
      const std::vector<cplx> v =
          steering_vector(geom, grid.angles[static_cast<std::size_t>(i)],
                          bin_freqs[static_cast<std::size_t>(f)]);
      cplx* dst =
          field.vectors.data() + (static_cast<std::size_t>(i) * field.F + f) *
                                     field.M;
      for (int m = 0; m < field.M; ++m) dst[m] = v[static_cast<std::size_t>(m)];
    }
  }
  return field;
}

double angular_distance(double a_deg, double b_deg) {
  double d = std::fmod(std::fabs(a_deg - b_deg), 360.0);
  if (d > 180.0) d = 360.0 - d;
  return d;
}

ArrayGeometry geometry_from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ArrayGeometry geom;
  for (const auto& p : j.at("positions_m")) {
    if (!p.is_array() || p.size() != 3)
      throw std::invalid_argument("geometry: positions must be [x,y,z]");
    geom.positions.push_back(
        {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  if (geom.positions.empty())
    throw std::invalid_argument("geometry: no positions");
  if (j.contains("speed_of_sound"))
    geom.speed_of_sound = j.at("speed_of_sound").get<double>();
  return geom;
}

}  // namespace tfdoa
