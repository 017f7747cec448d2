// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/criteria.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tfdoa {

namespace {

void check_shapes(const SnapshotTensor& y, const MaskTensor& w) {
  if (y.M != w.M || y.T != w.T || y.F != w.F)
    throw std::invalid_argument("criteria: snapshot/mask shape mismatch");
}

void check_field(int m, std::size_t bins, const SteeringField& field) {
  if (field.M != m)
    throw std::invalid_argument("criteria: field mic count mismatch");
  if (static_cast<std::size_t>(field.F) != bins)
    throw std::invalid_argument("criteria: field bin count mismatch");
}

// v^H A v for Hermitian A; the imaginary part cancels analytically.
double quad_form(const cplx* v, const CMatrix& a) {
  const int n = a.n;
  cplx acc(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    cplx row(0.0, 0.0);
    for (int j = 0; j < n; ++j) row += a(i, j) * v[j];
    acc += std::conj(v[i]) * row;
  }
  return acc.real();
}

}  // namespace

Wscm compute_wscm(const SnapshotTensor& y, const MaskTensor& w) {
  check_shapes(y, w);
  Wscm out;
  out.M = y.M;
  out.phi.assign(static_cast<std::size_t>(y.F), CMatrix(y.M));
  std::vector<cplx> x(static_cast<std::size_t>(y.M));
  for (int f = 0; f < y.F; ++f) {
    CMatrix& phi = out.phi[static_cast<std::size_t>(f)];
    for (int t = 0; t < y.T; ++t) {
      for (int m = 0; m < y.M; ++m)
        x[static_cast<std::size_t>(m)] = w.at(m, t, f) * y.at(m, t, f);
      for (int i = 0; i < y.M; ++i)
        for (int j = 0; j < y.M; ++j)
          phi(i, j) += x[static_cast<std::size_t>(i)] *
                       std::conj(x[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

NormScm compute_norm_scm(const SnapshotTensor& y, const MaskTensor& w,
                         double eps) {
  check_shapes(y, w);
  NormScm out;
  out.M = y.M;
  out.r.assign(static_cast<std::size_t>(y.F), CMatrix(y.M));
  std::vector<cplx> x(static_cast<std::size_t>(y.M));
  for (int f = 0; f < y.F; ++f) {
    CMatrix& r = out.r[static_cast<std::size_t>(f)];
    for (int t = 0; t < y.T; ++t) {
      double ynorm2 = 0.0;
      for (int m = 0; m < y.M; ++m) ynorm2 += std::norm(y.at(m, t, f));
      if (ynorm2 <= eps) continue;  // silent snapshot, skip
      for (int m = 0; m < y.M; ++m)
        x[static_cast<std::size_t>(m)] = w.at(m, t, f) * y.at(m, t, f);
      const double inv = 1.0 / ynorm2;
      for (int i = 0; i < y.M; ++i)
        for (int j = 0; j < y.M; ++j)
          r(i, j) += x[static_cast<std::size_t>(i)] *
                     std::conj(x[static_cast<std::size_t>(j)]) * inv;
    }
  }
  return out;
}

SpatialSpectrum spectrum_music(const Wscm& wscm, const SteeringField& field,
                               double floor_delta) {
  if (wscm.M < 2) throw std::invalid_argument("music: requires M >= 2");
  check_field(wscm.M, wscm.phi.size(), field);
  const int F = field.F, M = field.M;

  double delta = floor_delta;
  if (delta < 0.0) {
    double tr = 0.0;
    for (const CMatrix& phi : wscm.phi)
      for (int i = 0; i < M; ++i) tr += phi(i, i).real();
    delta = 1e-12 * tr / static_cast<double>(F);
  }
  // keep the floor strictly positive even for all-zero input
  delta = std::max(delta, std::numeric_limits<double>::min());

  // per-frequency noise subspaces
  std::vector<std::vector<std::vector<cplx>>> subspaces(
      static_cast<std::size_t>(F));
  for (int f = 0; f < F; ++f)
    subspaces[static_cast<std::size_t>(f)] =
        noise_subspace(eig_hermitian(wscm.phi[static_cast<std::size_t>(f)]));

  SpatialSpectrum out;
  out.criterion = "music";
  out.values.assign(static_cast<std::size_t>(field.n_theta), 0.0);
  for (int i = 0; i < field.n_theta; ++i) {
    double acc = 0.0;
    for (int f = 0; f < F; ++f) {
      const cplx* v = field.at(i, f);
      double denom = 0.0;
      for (const std::vector<cplx>& col : subspaces[static_cast<std::size_t>(f)]) {
        cplx g(0.0, 0.0);
        for (int m = 0; m < M; ++m)
          g += std::conj(col[static_cast<std::size_t>(m)]) * v[m];
        denom += std::norm(g);
      }
      acc += 1.0 / std::max(denom, delta);
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SpatialSpectrum spectrum_principal(const Wscm& wscm,
                                   const SteeringField& field) {
  check_field(wscm.M, wscm.phi.size(), field);
  const int F = field.F, M = field.M;

  std::vector<std::vector<cplx>> principals(static_cast<std::size_t>(F));
  for (int f = 0; f < F; ++f)
    principals[static_cast<std::size_t>(f)] =
        principal_eigvec(eig_hermitian(wscm.phi[static_cast<std::size_t>(f)]));

  SpatialSpectrum out;
  out.criterion = "principal";
  out.values.assign(static_cast<std::size_t>(field.n_theta), 0.0);
  for (int i = 0; i < field.n_theta; ++i) {
    double acc = 0.0;
    for (int f = 0; f < F; ++f) {
      const cplx* v = field.at(i, f);
      cplx g(0.0, 0.0);
      for (int m = 0; m < M; ++m)
        g += std::conj(v[m]) *
             principals[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
      acc += std::norm(g);
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SpatialSpectrum spectrum_srp(const Wscm& wscm, const SteeringField& field) {
  check_field(wscm.M, wscm.phi.size(), field);
  SpatialSpectrum out;
  out.criterion = "srp";
  out.values.assign(static_cast<std::size_t>(field.n_theta), 0.0);
  for (int i = 0; i < field.n_theta; ++i) {
    double acc = 0.0;
    for (int f = 0; f < field.F; ++f)
      acc += quad_form(field.at(i, f), wscm.phi[static_cast<std::size_t>(f)]);
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SpatialSpectrum spectrum_proposed(const NormScm& scm,
                                  const SteeringField& field) {
  check_field(scm.M, scm.r.size(), field);
  SpatialSpectrum out;
  out.criterion = "proposed";
  out.values.assign(static_cast<std::size_t>(field.n_theta), 0.0);
  for (int i = 0; i < field.n_theta; ++i) {
    double acc = 0.0;
    for (int f = 0; f < field.F; ++f)
      acc += quad_form(field.at(i, f), scm.r[static_cast<std::size_t>(f)]);
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

double eq5_residual(const SnapshotTensor& y, const MaskTensor& w,
                    const SteeringField& field, int theta_index, double eps) {
  check_shapes(y, w);
  check_field(y.M, static_cast<std::size_t>(y.F), field);
  if (theta_index < 0 || theta_index >= field.n_theta)
    throw std::invalid_argument("eq5_residual: theta index out of range");
  const int M = y.M;

  double residual = 0.0;
  std::vector<cplx> yt(static_cast<std::size_t>(M));
  for (int f = 0; f < y.F; ++f) {
    const cplx* v = field.at(theta_index, f);
    std::vector<cplx> vdag(static_cast<std::size_t>(M));
    double vnorm2 = 0.0;
    for (int m = 0; m < M; ++m) vnorm2 += std::norm(v[m]);
    if (vnorm2 <= 0.0)
      throw std::invalid_argument("eq5_residual: zero steering vector");
    for (int m = 0; m < M; ++m)
      vdag[static_cast<std::size_t>(m)] = std::conj(v[m]) / vnorm2;

    for (int t = 0; t < y.T; ++t) {
      double ynorm2 = 0.0;
      for (int m = 0; m < M; ++m) ynorm2 += std::norm(y.at(m, t, f));
      if (ynorm2 <= eps) continue;
      const double inv = 1.0 / std::sqrt(ynorm2);
      for (int m = 0; m < M; ++m)
        yt[static_cast<std::size_t>(m)] = w.at(m, t, f) * y.at(m, t, f) * inv;
      cplx s(0.0, 0.0);
      for (int m = 0; m < M; ++m) s += vdag[static_cast<std::size_t>(m)] *
                                       yt[static_cast<std::size_t>(m)];
      for (int m = 0; m < M; ++m)
        residual += std::norm(yt[static_cast<std::size_t>(m)] - s * v[m]);
    }
  }
  return residual;
}

double estimate_doa(const SpatialSpectrum& spectrum, const AngleGrid& grid) {
  if (spectrum.values.empty())
    throw std::invalid_argument("estimate_doa: empty spectrum");
  if (spectrum.values.size() != grid.angles.size())
    throw std::invalid_argument("estimate_doa: spectrum/grid size mismatch");
  std::size_t best = 0;
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    const double v = spectrum.values[i];
    if (!std::isfinite(v))
      throw std::invalid_argument("estimate_doa: non-finite spectrum value");
    if (v > spectrum.values[best]) best = i;  // first max wins ties
  }
  return grid.angles[best];
}

void export_spectrum_csv(const SpatialSpectrum& spectrum,
                         const AngleGrid& grid, const std::string& path) {
  if (spectrum.values.size() != grid.angles.size())
    throw std::invalid_argument("spectrum csv: size mismatch");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("spectrum csv: cannot write " + path);
  os << "theta_deg,value,normalized_value\n";
  double vmax = 0.0;
  for (double v : spectrum.values) vmax = std::max(vmax, v);
  char line[128];
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    const double norm = vmax > 0.0 ? spectrum.values[i] / vmax : 0.0;
    std::snprintf(line, sizeof(line), "%.4f,%.9e,%.9f\n", grid.angles[i],
                  spectrum.values[i], norm);
    os << line;
  }
  if (!os) throw std::runtime_error("spectrum csv: write failed: " + path);
}

}  // namespace tfdoa
