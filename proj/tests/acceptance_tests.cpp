// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// binary exits nonzero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "tfdoa/criteria.hpp"
#include "tfdoa/eval.hpp"
#include "tfdoa/linalg.hpp"
#include "tfdoa/mask.hpp"
#include "tfdoa/rng.hpp"
#include "tfdoa/roomsim.hpp"

using namespace tfdoa;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

SnapshotTensor random_tensor(int M, int T, const std::vector<double>& freqs,
                             std::uint64_t seed) {
  SnapshotTensor y;
  y.M = M;
  y.T = T;
  y.F = static_cast<int>(freqs.size());
  y.bin_freqs = freqs;
  y.data.resize(static_cast<std::size_t>(M) * T * y.F);
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

int argmax_index(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// --- 1. grid argmin of the fit residual == argmax of the trace criterion ---

void check_equivalence() {
  const ArrayGeometry geom = rect_array(2, 2, 0.05, {0, 0, 0});
  const AngleGrid grid(5.0);
  std::vector<double> freqs;
  for (int k = 0; k < 16; ++k) freqs.push_back(300.0 + 400.0 * k);
  const SteeringField field = build_steering_field(geom, grid, freqs);
  const int M = 4, T = 10, F = 16;

  bool same_argmax = true;
  bool identity_holds = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SnapshotTensor y = random_tensor(M, T, freqs, 1000 + seed);
    const MaskTensor w = random_mask(M, T, F, 2000 + seed);
    const SpatialSpectrum spec =
        spectrum_proposed(compute_norm_scm(y, w), field);

    double total = 0.0;
    for (int f = 0; f < F; ++f)
      for (int t = 0; t < T; ++t) {
        double ynorm2 = 0.0, wnorm2 = 0.0;
        for (int m = 0; m < M; ++m) {
          ynorm2 += std::norm(y.at(m, t, f));
          wnorm2 += std::norm(w.at(m, t, f) * y.at(m, t, f));
        }
        if (ynorm2 > 0.0) total += wnorm2 / ynorm2;
      }

    std::vector<double> residuals(static_cast<std::size_t>(field.n_theta));
    for (int i = 0; i < field.n_theta; ++i) {
      const double r = eq5_residual(y, w, field, i);
      residuals[static_cast<std::size_t>(i)] = r;
      const double lhs = r + spec.values[static_cast<std::size_t>(i)] / M;
      if (std::fabs(lhs - total) > 1e-9 * std::fabs(total))
        identity_holds = false;
    }
    const int imin = static_cast<int>(
        std::min_element(residuals.begin(), residuals.end()) -
        residuals.begin());
    if (imin != argmax_index(spec.values)) same_argmax = false;
  }
  report("least-squares argmin matches criterion argmax on 20 random draws",
         same_argmax);
  report("residual plus scaled criterion value is constant over the grid",
         identity_holds);
}

// --- 2. anechoic single-source exactness for all four methods ---

void check_anechoic() {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {4.5, 3.5, 1.75});
  const AngleGrid grid(0.5);
  std::vector<double> freqs;
  for (int k = 0; k < 24; ++k) freqs.push_back(250.0 + 250.0 * k);
  const SteeringField field = build_steering_field(geom, grid, freqs);
  const int M = 9, T = 12;

  Rng angle_rng(7);
  bool all_exact = true;
  std::string first_fail;
  for (int rep = 0; rep < 20; ++rep) {
    const int idx0 = static_cast<int>(angle_rng.next_u64() %
                                      static_cast<std::uint64_t>(grid.angles.size()));
    const double theta0 = grid.angles[static_cast<std::size_t>(idx0)];

    SnapshotTensor y;
    y.M = M;
    y.T = T;
    y.F = static_cast<int>(freqs.size());
    y.bin_freqs = freqs;
    y.data.resize(static_cast<std::size_t>(M) * T * y.F);
    Rng src_rng(100 + static_cast<std::uint64_t>(rep));
    for (int f = 0; f < y.F; ++f) {
      const cplx* v = field.at(idx0, f);
      for (int t = 0; t < T; ++t) {
        const cplx s(src_rng.gaussian(), src_rng.gaussian());
        for (int m = 0; m < M; ++m) y.at(m, t, f) = v[m] * s;
      }
    }
    const MaskTensor w = ones_mask(M, T, y.F);
    const Wscm wscm = compute_wscm(y, w);
    const NormScm nscm = compute_norm_scm(y, w);

    const double hats[4] = {
        estimate_doa(spectrum_music(wscm, field), grid),
        estimate_doa(spectrum_principal(wscm, field), grid),
        estimate_doa(spectrum_srp(wscm, field), grid),
        estimate_doa(spectrum_proposed(nscm, field), grid)};
    for (double hat : hats)
      if (hat != theta0) {
        all_exact = false;
        if (first_fail.empty()) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "theta0=%.1f got %.1f", theta0, hat);
          first_fail = buf;
        }
      }
  }
  report("anechoic on-grid source recovered exactly by all four methods",
         all_exact, first_fail);
}

// --- 3 & 4. Monte-Carlo behavior of the full pipeline ---

ExperimentConfig mc_base() {
  ExperimentConfig cfg;
  cfg.mask_source.kind = MaskSource::Kind::oracle;
  cfg.rt60 = 0.3;
  cfg.snr_db = 20.0;
  cfg.K = 2;
  cfg.T_frames = 50;
  cfg.trials = 50;
  cfg.base_seed = 424242;
  cfg.grid_resolution = 0.5;
  return cfg;
}

double accuracy_at(Method method, const PostProc& pp, double sir) {
  ExperimentConfig cfg = mc_base();
  cfg.method = method;
  cfg.postproc = pp;
  cfg.sir_db = sir;
  return run_experiment(cfg).accuracy;
}

void check_method_ranking() {
  const PostProc bt{PostProc::Kind::binary_threshold, 0.9};
  const PostProc had{PostProc::Kind::hadamard, 0.5};

  char detail[256];
  {
    const double prop = accuracy_at(Method::proposed, had, -6.0);
    const double prin = accuracy_at(Method::principal, bt, -6.0);
    const double mus = accuracy_at(Method::music, bt, -6.0);
    std::snprintf(detail, sizeof(detail),
                  "SIR -6 dB: proposed %.2f principal %.2f music %.2f", prop,
                  prin, mus);
    report("proposed >= principal >= music at SIR -6 dB, margin >= 5 points",
           prop >= prin && prin >= mus && prop - mus >= 0.05, detail);
  }
  for (double sir : {0.0, 6.0}) {
    const double prop = accuracy_at(Method::proposed, had, sir);
    const double prin = accuracy_at(Method::principal, bt, sir);
    std::snprintf(detail, sizeof(detail),
                  "SIR %+.0f dB: proposed %.2f principal %.2f", sir, prop,
                  prin);
    report("proposed at least matches principal at SIR " +
               std::to_string(static_cast<int>(sir)) + " dB",
           prop >= prin, detail);
  }
}

void check_snapshot_monotonicity() {
  ExperimentConfig cfg = mc_base();
  cfg.method = Method::proposed;
  cfg.postproc = {PostProc::Kind::hadamard, 0.5};
  cfg.K = 1;
  cfg.sir_db = 0.0;

  double acc[3];
  const int frames[3] = {10, 25, 50};
  for (int i = 0; i < 3; ++i) {
    cfg.T_frames = frames[i];
    acc[i] = run_experiment(cfg).accuracy;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "T=10: %.2f  T=25: %.2f  T=50: %.2f",
                acc[0], acc[1], acc[2]);
  report("accuracy does not degrade with more snapshots (5-point band)",
         acc[1] >= acc[0] - 0.05 && acc[2] >= acc[1] - 0.05, detail);
}

// --- 5. covariance scaling invariances ---

void check_scaling() {
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {0, 0, 0});
  const AngleGrid grid(2.0);
  std::vector<double> freqs;
  for (int k = 0; k < 16; ++k) freqs.push_back(400.0 + 400.0 * k);
  const SteeringField field = build_steering_field(geom, grid, freqs);

  const SnapshotTensor y = random_tensor(9, 8, freqs, 3030);
  const MaskTensor w = random_mask(9, 8, 16, 4040);
  const Wscm wscm = compute_wscm(y, w);
  Wscm scaled = wscm;
  for (CMatrix& phi : scaled.phi)
    for (cplx& v : phi.a) v *= 10.0;

  const SpatialSpectrum m1 = spectrum_music(wscm, field);
  const SpatialSpectrum m2 = spectrum_music(scaled, field);
  const SpatialSpectrum p1 = spectrum_principal(wscm, field);
  const SpatialSpectrum p2 = spectrum_principal(scaled, field);
  const SpatialSpectrum s1 = spectrum_srp(wscm, field);
  const SpatialSpectrum s2 = spectrum_srp(scaled, field);

  bool music_ok = true, principal_ok = true, srp_ok = true;
  for (std::size_t i = 0; i < m1.values.size(); ++i) {
    if (std::fabs(m2.values[i] - m1.values[i]) > 1e-9 * std::fabs(m1.values[i]))
      music_ok = false;
    if (std::fabs(p2.values[i] - p1.values[i]) > 1e-9 * std::fabs(p1.values[i]))
      principal_ok = false;
    if (std::fabs(s2.values[i] - 10.0 * s1.values[i]) >
        1e-12 * std::fabs(10.0 * s1.values[i]))
      srp_ok = false;
  }
  report("subspace criteria are invariant to a tenfold covariance scaling",
         music_ok && principal_ok);
  report("steered power scales linearly with a tenfold covariance scaling",
         srp_ok);
}

// --- 6. eigensolver robustness ---

void check_eigensolver() {
  Rng rng(99);
  bool ok = true;
  for (int rep = 0; rep < 1000 && ok; ++rep) {
    CMatrix a(9);
    for (int i = 0; i < 9; ++i)
      for (int j = i; j < 9; ++j) {
        if (i == j) {
          a(i, j) = cplx(rng.gaussian(), 0.0);
        } else {
          a(i, j) = cplx(rng.gaussian(), rng.gaussian());
          a(j, i) = std::conj(a(i, j));
        }
      }
    const EigenBasis basis = eig_hermitian(a);
    const double norm_a = a.frobenius();

    double resid = 0.0;
    for (int i = 0; i < 9; ++i)
      for (int k = 0; k < 9; ++k) {
        cplx av(0.0, 0.0);
        for (int j = 0; j < 9; ++j) av += a(i, j) * basis.eigenvectors(j, k);
        resid += std::norm(av - basis.eigenvalues[static_cast<std::size_t>(k)] *
                                    basis.eigenvectors(i, k));
      }
    if (std::sqrt(resid) > 1e-10 * norm_a) ok = false;

    for (int k = 0; k < 9 && ok; ++k)
      for (int l = 0; l < 9 && ok; ++l) {
        cplx dot(0.0, 0.0);
        for (int i = 0; i < 9; ++i)
          dot += std::conj(basis.eigenvectors(i, k)) * basis.eigenvectors(i, l);
        const cplx target = k == l ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
        if (std::abs(dot - target) > 1e-10) ok = false;
      }
    for (std::size_t k = 1; k < basis.eigenvalues.size() && ok; ++k)
      if (basis.eigenvalues[k] < basis.eigenvalues[k - 1]) ok = false;
  }
  report("1000 random Hermitian 9x9 decompositions meet the 1e-10 bounds", ok);
}

// --- 7. room impulse responses ---

void check_roomsim() {
  RoomConfig room;
  bool decay_ok = true;
  char detail[160] = "";
  for (double rt60 : {0.3, 0.9}) {
    room.rt60 = rt60;
    room.max_image_order = rt60 > 0.5 ? 36 : 20;
    const double alpha = sabine_absorption(room);
    Rng rng(555);
    for (int rep = 0; rep < 10; ++rep) {
      const Vec3 src{rng.uniform(0.5, 8.5), rng.uniform(0.5, 6.5),
                     rng.uniform(0.5, 3.0)};
      Vec3 mic{rng.uniform(0.5, 8.5), rng.uniform(0.5, 6.5),
               rng.uniform(0.5, 3.0)};
      if (src.x == mic.x && src.y == mic.y && src.z == mic.z) mic.x += 0.1;
      const TimeSignal rir =
          simulate_rir(room, src, mic, alpha, RirMode::nearest_sample);
      const double dist =
          std::sqrt((src.x - mic.x) * (src.x - mic.x) +
                    (src.y - mic.y) * (src.y - mic.y) +
                    (src.z - mic.z) * (src.z - mic.z));
      // decay time measured from the direct-path arrival
      const double t60 =
          decay_crossing_time(schroeder_decay_db(rir), room.fs) - dist / 343.0;
      if (t60 < 0.8 * rt60 || t60 > 1.2 * rt60) {
        decay_ok = false;
        std::snprintf(detail, sizeof(detail),
                      "rt60 %.1f s placement %d measured %.3f s", rt60, rep,
                      t60);
      }
    }
  }
  report("energy decay matches the requested rt60 within 20 percent",
         decay_ok, detail);

  room.rt60 = 0.3;
  room.max_image_order = 24;
  const Vec3 src{2.0, 3.0, 1.5}, mic{6.5, 4.0, 1.2};
  const TimeSignal rir =
      simulate_rir(room, src, mic, 1.0, RirMode::nearest_sample);
  const double d = std::sqrt(4.5 * 4.5 + 1.0 + 0.3 * 0.3);
  const long idx = std::lround(d * room.fs / 343.0);
  bool direct_ok = true;
  for (std::size_t i = 0; i < rir.samples.size(); ++i)
    if ((rir.samples[i] != 0.0) != (static_cast<long>(i) == idx))
      direct_ok = false;
  const double expect = 1.0 / (4.0 * 3.14159265358979323846 * d);
  if (std::fabs(rir.samples[static_cast<std::size_t>(idx)] - expect) >
      1e-12 * expect)
    direct_ok = false;
  report("fully absorbing walls leave only the direct path at the exact tap",
         direct_ok);
}

// --- 8. mask post-processing table semantics ---

void check_postproc_table() {
  MaskTensor g = ones_mask(3, 1, 1);
  g.at(0, 0, 0) = 0.2;
  g.at(1, 0, 0) = 0.4;
  g.at(2, 0, 0) = 0.8;
  auto val = [&](PostProc::Kind kind, double beta) {
    return post_process({kind, beta}, g).at(0, 0, 0);
  };
  const bool ok =
      val(PostProc::Kind::identity, 0.5) == 0.2 &&
      val(PostProc::Kind::minimum, 0.5) == 0.2 &&
      val(PostProc::Kind::maximum, 0.5) == 0.8 &&
      std::fabs(val(PostProc::Kind::arith_mean, 0.5) - 1.4 / 3.0) < 1e-15 &&
      val(PostProc::Kind::arith_median, 0.5) == 0.4 &&
      std::fabs(val(PostProc::Kind::hadamard, 0.5) - 0.064) < 1e-15 &&
      std::fabs(val(PostProc::Kind::geo_mean, 0.5) - std::cbrt(0.064)) <
          1e-12 &&
      val(PostProc::Kind::binary_threshold, 0.5) == 0.0 &&
      post_process({PostProc::Kind::binary_threshold, 0.5}, g).at(2, 0, 0) ==
          1.0 &&
      val(PostProc::Kind::constant, 0.5) == 1.0;
  report("post-processing reductions match their closed forms on a triple",
         ok);
}

// --- 9. covariance accumulation against a brute-force reference ---

void check_wscm_bruteforce() {
  const std::vector<double> freqs = {100, 200, 300, 400, 500};
  const SnapshotTensor y = random_tensor(3, 4, freqs, 7777);
  const MaskTensor w = random_mask(3, 4, 5, 8888);
  const Wscm wscm = compute_wscm(y, w);
  bool ok = true;
  for (int f = 0; f < 5; ++f) {
    CMatrix ref(3);
    for (int t = 0; t < 4; ++t) {
      cplx x[3];
      for (int m = 0; m < 3; ++m) x[m] = w.at(m, t, f) * y.at(m, t, f);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ref(i, j) += x[i] * std::conj(x[j]);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (wscm.phi[static_cast<std::size_t>(f)](i, j) != ref(i, j)) ok = false;
  }
  report("weighted covariance accumulation is bit-exact vs a direct loop", ok);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  check_equivalence();
  check_anechoic();
  check_eigensolver();
  check_scaling();
  check_postproc_table();
  check_wscm_bruteforce();
  check_roomsim();
  check_method_ranking();
  check_snapshot_monotonicity();

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("%s (%d failure%s, %.1f s)\n",
              g_failures == 0 ? "ALL CHECKS PASSED" : "CHECKS FAILED",
              g_failures, g_failures == 1 ? "" : "s", elapsed);
  return g_failures == 0 ? 0 : 1;
}
