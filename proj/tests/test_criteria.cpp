// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tfdoa/criteria.hpp"
#include "tfdoa/rng.hpp"

using namespace tfdoa;

namespace {

SnapshotTensor make_tensor(int M, int T, const std::vector<double>& freqs) {
  SnapshotTensor y;
  y.M = M;
  y.T = T;
  y.F = static_cast<int>(freqs.size());
  y.data.assign(static_cast<std::size_t>(M) * T * y.F, cplx(0.0, 0.0));
  y.bin_freqs = freqs;
  return y;
}

SnapshotTensor random_tensor(int M, int T, const std::vector<double>& freqs,
                             std::uint64_t seed) {
  SnapshotTensor y = make_tensor(M, T, freqs);
  Rng rng(seed);
  for (auto& v : y.data) v = cplx(rng.gaussian(), rng.gaussian());
  return y;
}

MaskTensor random_mask(int M, int T, int F, std::uint64_t seed) {
  MaskTensor w = ones_mask(M, T, F);
  Rng rng(seed);
  for (double& x : w.weights) x = rng.uniform();
  return w;
}

// Single on-grid plane-wave source: y(m,t,f) = v(theta0,f) s(t,f).
SnapshotTensor plane_wave_tensor(const ArrayGeometry& geom,
                                 const std::vector<double>& freqs,
                                 double theta0, int T, std::uint64_t seed) {
  SnapshotTensor y = make_tensor(static_cast<int>(geom.positions.size()), T,
                                 freqs);
  Rng rng(seed);
  for (int f = 0; f < y.F; ++f) {
    const auto v = steering_vector(geom, theta0,
                                   freqs[static_cast<std::size_t>(f)]);
    for (int t = 0; t < T; ++t) {
      const cplx s(rng.gaussian(), rng.gaussian());
      for (int m = 0; m < y.M; ++m)
        y.at(m, t, f) = v[static_cast<std::size_t>(m)] * s;
    }
  }
  return y;
}

std::vector<double> test_freqs() {
  std::vector<double> freqs;
  for (int k = 0; k < 32; ++k) freqs.push_back(200.0 + 200.0 * k);
  return freqs;
}

int argmax_index(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("wscm matches the brute-force triple loop exactly") {
  const std::vector<double> freqs = {100, 200, 300, 400, 500};
  const SnapshotTensor y = random_tensor(3, 4, freqs, 21);
  const MaskTensor w = random_mask(3, 4, 5, 22);
  const Wscm wscm = compute_wscm(y, w);

  for (int f = 0; f < y.F; ++f) {
    CMatrix oracle(3);
    for (int t = 0; t < 4; ++t) {
      cplx x[3];
      for (int m = 0; m < 3; ++m) x[m] = w.at(m, t, f) * y.at(m, t, f);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) oracle(i, j) += x[i] * std::conj(x[j]);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(wscm.phi[static_cast<std::size_t>(f)](i, j) == oracle(i, j));
  }
}

TEST_CASE("wscm basics: unit weights, zero weights, PSD") {
  const std::vector<double> freqs = {100, 200};
  const SnapshotTensor y = random_tensor(4, 1, freqs, 5);
  const MaskTensor ones = ones_mask(4, 1, 2);
  const Wscm wscm = compute_wscm(y, ones);
  for (int f = 0; f < 2; ++f)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(wscm.phi[static_cast<std::size_t>(f)](i, j) -
                       y.at(i, 0, f) * std::conj(y.at(j, 0, f))) == 0.0);

  MaskTensor zeros = ones_mask(4, 1, 2);
  std::fill(zeros.weights.begin(), zeros.weights.end(), 0.0);
  const Wscm wz = compute_wscm(y, zeros);
  for (const CMatrix& phi : wz.phi)
    for (const cplx& v : phi.a) CHECK(v == cplx(0.0, 0.0));

  const SnapshotTensor yr = random_tensor(4, 6, freqs, 31);
  const MaskTensor wr = random_mask(4, 6, 2, 32);
  const Wscm wpsd = compute_wscm(yr, wr);
  for (const CMatrix& phi : wpsd.phi) {
    // Hermitian and PSD via the eigenvalue oracle
    const EigenBasis basis = eig_hermitian(phi);
    for (double ev : basis.eigenvalues)
      CHECK(ev >= -1e-10 * phi.frobenius());
  }
}

TEST_CASE("normalized SCM trace and silent-bin guard") {
  const std::vector<double> freqs = {100};
  SnapshotTensor y = random_tensor(3, 1, freqs, 8);
  const MaskTensor ones = ones_mask(3, 1, 1);
  const NormScm r1 = compute_norm_scm(y, ones);
  double trace = 0.0;
  for (int i = 0; i < 3; ++i) trace += r1.r[0](i, i).real();
  CHECK(trace == doctest::Approx(1.0).epsilon(1e-12));

  const int T = 7;
  const SnapshotTensor yr = random_tensor(3, T, freqs, 9);
  const MaskTensor wr = random_mask(3, T, 1, 10);
  const NormScm rr = compute_norm_scm(yr, wr);
  double tr = 0.0;
  for (int i = 0; i < 3; ++i) tr += rr.r[0](i, i).real();
  CHECK(tr <= static_cast<double>(T) + 1e-12);

  SnapshotTensor silent = make_tensor(3, 2, freqs);
  const NormScm rs = compute_norm_scm(silent, ones_mask(3, 2, 1));
  for (const cplx& v : rs.r[0].a) {
    CHECK(std::isfinite(v.real()));
    CHECK(v == cplx(0.0, 0.0));
  }
}

TEST_CASE("music spectrum: single source, isotropic tie, floored denominator") {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {0, 0, 0});
  const AngleGrid grid(1.0);
  const std::vector<double> freqs = test_freqs();
  const SteeringField field = build_steering_field(geom, grid, freqs);

  const double theta0 = 113.0;
  const SnapshotTensor y = plane_wave_tensor(geom, freqs, theta0, 12, 3);
  const MaskTensor w = ones_mask(y.M, y.T, y.F);
  const SpatialSpectrum spec = spectrum_music(compute_wscm(y, w), field);
  const double theta_hat = estimate_doa(spec, grid);
  CHECK(angular_distance(theta_hat, theta0) <= grid.resolution);
  for (double v : spec.values) CHECK(std::isfinite(v));

  // identity WSCM at every bin: all angles tie
  Wscm iso;
  iso.M = 9;
  iso.phi.assign(freqs.size(), CMatrix::identity(9));
  const SpatialSpectrum flat = spectrum_music(iso, field);
  for (double v : flat.values)
    CHECK(v == doctest::Approx(flat.values[0]).epsilon(1e-9));

  CHECK_THROWS(spectrum_music(Wscm{1, {CMatrix(1)}, }, field));
}

TEST_CASE("principal spectrum: rank-one peak value and scale invariance") {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {0, 0, 0});
  const AngleGrid grid(1.0);
  const std::vector<double> freqs = test_freqs();
  const SteeringField field = build_steering_field(geom, grid, freqs);
  const int M = 9, F = static_cast<int>(freqs.size());

  const double theta0 = 45.0;  // on grid
  Wscm wscm;
  wscm.M = M;
  for (int f = 0; f < F; ++f) {
    const auto v = steering_vector(geom, theta0,
                                   freqs[static_cast<std::size_t>(f)]);
    CMatrix phi(M);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j)
        phi(i, j) = v[static_cast<std::size_t>(i)] *
                    std::conj(v[static_cast<std::size_t>(j)]);
    wscm.phi.push_back(phi);
  }
  const SpatialSpectrum spec = spectrum_principal(wscm, field);
  const int idx0 = 45;
  CHECK(spec.values[static_cast<std::size_t>(idx0)] ==
        doctest::Approx(static_cast<double>(M * F)).epsilon(1e-9));
  CHECK(argmax_index(spec.values) == idx0);

  // positive scaling leaves the spectrum unchanged
  Wscm scaled = wscm;
  for (CMatrix& phi : scaled.phi)
    for (cplx& v : phi.a) v *= 7.25;
  const SpatialSpectrum spec2 = spectrum_principal(scaled, field);
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    CHECK(spec2.values[i] ==
          doctest::Approx(spec.values[i]).epsilon(1e-9));

  // zero matrices stay finite through the tie-broken eigenvector
  Wscm zero;
  zero.M = M;
  zero.phi.assign(freqs.size(), CMatrix(M));
  const SpatialSpectrum zspec = spectrum_principal(zero, field);
  for (double v : zspec.values) CHECK(std::isfinite(v));
}

TEST_CASE("srp spectrum: flat on identity, linear in scale, finds source") {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {0, 0, 0});
  const AngleGrid grid(1.0);
  const std::vector<double> freqs = test_freqs();
  const SteeringField field = build_steering_field(geom, grid, freqs);
  const int M = 9, F = static_cast<int>(freqs.size());

  Wscm iso;
  iso.M = M;
  iso.phi.assign(freqs.size(), CMatrix::identity(M));
  const SpatialSpectrum flat = spectrum_srp(iso, field);
  for (double v : flat.values)
    CHECK(v == doctest::Approx(static_cast<double>(M * F)).epsilon(1e-9));

  const SnapshotTensor y = plane_wave_tensor(geom, freqs, 222.0, 10, 77);
  const Wscm wscm = compute_wscm(y, ones_mask(y.M, y.T, y.F));
  const SpatialSpectrum spec = spectrum_srp(wscm, field);
  CHECK(estimate_doa(spec, grid) == doctest::Approx(222.0));

  Wscm scaled = wscm;
  const double alpha = 3.5;  // power of two times 1.75; exactness not assumed
  for (CMatrix& phi : scaled.phi)
    for (cplx& v : phi.a) v *= alpha;
  const SpatialSpectrum sspec = spectrum_srp(scaled, field);
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    CHECK(sspec.values[i] ==
          doctest::Approx(alpha * spec.values[i]).epsilon(1e-12));
}

TEST_CASE("proposed spectrum: closed-form peak, zero mask, nonnegative") {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {0, 0, 0});
  const AngleGrid grid(1.0);
  const std::vector<double> freqs = test_freqs();
  const SteeringField field = build_steering_field(geom, grid, freqs);
  const int M = 9, F = static_cast<int>(freqs.size()), T = 10;

  const double theta0 = 300.0;
  const SnapshotTensor y = plane_wave_tensor(geom, freqs, theta0, T, 13);
  const MaskTensor ones = ones_mask(M, T, F);
  const NormScm r = compute_norm_scm(y, ones);
  const SpatialSpectrum spec = spectrum_proposed(r, field);
  // each snapshot contributes v^H (vv^H/M) v = M, so the peak is F * T * M
  CHECK(spec.values[300] ==
        doctest::Approx(static_cast<double>(F * T * M)).epsilon(1e-9));
  CHECK(argmax_index(spec.values) == 300);
  for (double v : spec.values) CHECK(v >= -1e-12);

  MaskTensor zeros = ones;
  std::fill(zeros.weights.begin(), zeros.weights.end(), 0.0);
  const SpatialSpectrum zspec =
      spectrum_proposed(compute_norm_scm(y, zeros), field);
  for (double v : zspec.values) CHECK(v == 0.0);
}

TEST_CASE("eq5 residual: exact fit on grid, projection identity, zero mask") {
  const ArrayGeometry geom = rect_array(2, 2, 0.05, {0, 0, 0});
  const AngleGrid grid(5.0);
  std::vector<double> freqs;
  for (int k = 0; k < 16; ++k) freqs.push_back(300.0 + 400.0 * k);
  const SteeringField field = build_steering_field(geom, grid, freqs);
  const int M = 4, T = 10, F = 16;

  // noise-free on-grid source fits exactly
  const double theta0 = 40.0;
  const int idx0 = 8;
  const SnapshotTensor y0 = plane_wave_tensor(geom, freqs, theta0, T, 2);
  const MaskTensor ones = ones_mask(M, T, F);
  CHECK(eq5_residual(y0, ones, field, idx0) <= 1e-9);

  // residual(theta) + value(theta)/M is constant over theta
  const SnapshotTensor y = random_tensor(M, T, freqs, 4);
  const MaskTensor w = random_mask(M, T, F, 6);
  const NormScm r = compute_norm_scm(y, w);
  const SpatialSpectrum spec = spectrum_proposed(r, field);

  double total = 0.0;  // sum over (t,f) of ||y_tilde / ||y|| ||^2
  for (int f = 0; f < F; ++f)
    for (int t = 0; t < T; ++t) {
      double ynorm2 = 0.0, wnorm2 = 0.0;
      for (int m = 0; m < M; ++m) {
        ynorm2 += std::norm(y.at(m, t, f));
        wnorm2 += std::norm(w.at(m, t, f) * y.at(m, t, f));
      }
      if (ynorm2 > 0.0) total += wnorm2 / ynorm2;
    }
  for (int i = 0; i < field.n_theta; ++i) {
    const double lhs = eq5_residual(y, w, field, i) +
                       spec.values[static_cast<std::size_t>(i)] / M;
    CHECK(lhs == doctest::Approx(total).epsilon(1e-9));
  }

  MaskTensor zeros = ones;
  std::fill(zeros.weights.begin(), zeros.weights.end(), 0.0);
  for (int i = 0; i < field.n_theta; i += 7)
    CHECK(eq5_residual(y, zeros, field, i) == 0.0);
}

TEST_CASE("grid argmin of the fit residual equals argmax of the criterion") {
  const ArrayGeometry geom = rect_array(2, 2, 0.05, {0, 0, 0});
  const AngleGrid grid(5.0);
  std::vector<double> freqs;
  for (int k = 0; k < 16; ++k) freqs.push_back(300.0 + 400.0 * k);
  const SteeringField field = build_steering_field(geom, grid, freqs);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SnapshotTensor y = random_tensor(4, 10, freqs, 100 + seed);
    const MaskTensor w = random_mask(4, 10, 16, 200 + seed);
    const SpatialSpectrum spec =
        spectrum_proposed(compute_norm_scm(y, w), field);
    std::vector<double> residuals(static_cast<std::size_t>(field.n_theta));
    for (int i = 0; i < field.n_theta; ++i)
      residuals[static_cast<std::size_t>(i)] = eq5_residual(y, w, field, i);
    const int imax = argmax_index(spec.values);
    const int imin = static_cast<int>(
        std::min_element(residuals.begin(), residuals.end()) -
        residuals.begin());
    CHECK(imax == imin);
  }
}

TEST_CASE("all spectra invariant to a global snapshot phase") {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {0, 0, 0});
  const AngleGrid grid(2.0);
  const std::vector<double> freqs = test_freqs();
  const SteeringField field = build_steering_field(geom, grid, freqs);

  const SnapshotTensor y = random_tensor(9, 5, freqs, 41);
  const MaskTensor w = random_mask(9, 5, static_cast<int>(freqs.size()), 42);
  SnapshotTensor y2 = y;
  const cplx phase = std::polar(1.0, 1.234);
  for (auto& v : y2.data) v *= phase;

  const Wscm w1 = compute_wscm(y, w), w2 = compute_wscm(y2, w);
  const NormScm r1 = compute_norm_scm(y, w), r2 = compute_norm_scm(y2, w);
  auto close = [](const SpatialSpectrum& a, const SpatialSpectrum& b) {
    for (std::size_t i = 0; i < a.values.size(); ++i)
      CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-9));
  };
  close(spectrum_music(w1, field), spectrum_music(w2, field));
  close(spectrum_principal(w1, field), spectrum_principal(w2, field));
  close(spectrum_srp(w1, field), spectrum_srp(w2, field));
  close(spectrum_proposed(r1, field), spectrum_proposed(r2, field));
}

TEST_CASE("estimate_doa picks the max and breaks ties downward") {
  const AngleGrid grid(0.5);
  SpatialSpectrum spec;
  spec.values.assign(720, 1.0);
  CHECK(estimate_doa(spec, grid) == 0.0);  // constant: tie rule

  spec.values[37] = 2.0;
  CHECK(estimate_doa(spec, grid) == doctest::Approx(18.5));

  spec.values.assign(720, 0.0);
  spec.values[20] = 5.0;   // 10 degrees
  spec.values[400] = 5.0;  // 200 degrees
  CHECK(estimate_doa(spec, grid) == doctest::Approx(10.0));

  spec.values[3] = std::nan("");
  CHECK_THROWS(estimate_doa(spec, grid));
}

TEST_CASE("spectrum CSV export") {
  const AngleGrid grid(90.0);
  SpatialSpectrum spec;
  spec.values = {1.0, 4.0, 2.0, 0.0};
  spec.criterion = "srp";
  const std::string path = "test_spectrum.csv";
  export_spectrum_csv(spec, grid, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "theta_deg,value,normalized_value");
  std::string line;
  std::getline(is, line);
  CHECK(line.find("0.0000,") == 0);
  std::getline(is, line);  // 90 deg row holds the max
  CHECK(line.find(",1.000000000") != std::string::npos);
  std::remove(path.c_str());
}
