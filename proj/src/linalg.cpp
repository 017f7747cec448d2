// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tfdoa {

CMatrix CMatrix::identity(int size) {
  CMatrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = cplx(1.0, 0.0);
  return m;
}

double CMatrix::frobenius() const {
  double acc = 0.0;
  for (const cplx& v : a) acc += std::norm(v);
  return std::sqrt(acc);
}

EigenBasis eig_hermitian(const CMatrix& input) {
  const int n = input.n;
  if (n < 1) throw std::invalid_argument("eig: empty matrix");

  double max_abs = 0.0, max_herm_defect = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx v = input(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("eig: non-finite entry");
      max_abs = std::max(max_abs, std::abs(v));
      max_herm_defect =
          std::max(max_herm_defect, std::abs(v - std::conj(input(j, i))));
    }
  }
  if (max_herm_defect > 1e-8 * max_abs)
    throw std::invalid_argument("eig: matrix is not Hermitian");

  // symmetrize, real diagonal
  CMatrix b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      b(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
    b(i, i) = cplx(b(i, i).real(), 0.0);
  }

  CMatrix v = CMatrix::identity(n);
  const double norm_a = b.frobenius();
  const double tol = 1e-12 * norm_a;

  for (int sweep = 0; sweep < 100 && n > 1; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * std::norm(b(i, j));
    if (std::sqrt(off) <= tol) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx bpq = b(p, q);
        const double r = std::abs(bpq);
        if (r == 0.0) continue;
        const cplx phase = bpq / r;  // e^{i phi}

        // zero the (p,q) entry of diag(1, e^{-i phi})-phased real block
        const double app = b(p, p).real();
        const double aqq = b(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        double t;
        if (tau >= 0.0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // U differs from identity in the (p,q) block:
        //   U(p,p)=c, U(p,q)=s, U(q,p)=-s e^{-i phi}, U(q,q)=c e^{-i phi}
        const cplx upq(s, 0.0);
        const cplx uqp = -s * std::conj(phase);
        const cplx uqq = c * std::conj(phase);

        // B <- U^H B U: columns then rows
        for (int i = 0; i < n; ++i) {
          const cplx bip = b(i, p);
          const cplx biq = b(i, q);
          b(i, p) = bip * c + biq * uqp;
          b(i, q) = bip * upq + biq * uqq;
        }
        for (int j = 0; j < n; ++j) {
          const cplx bpj = b(p, j);
          const cplx bqj = b(q, j);
          b(p, j) = c * bpj + std::conj(uqp) * bqj;
          b(q, j) = std::conj(upq) * bpj + std::conj(uqq) * bqj;
        }
        b(p, q) = cplx(0.0, 0.0);
        b(q, p) = cplx(0.0, 0.0);
        b(p, p) = cplx(b(p, p).real(), 0.0);
        b(q, q) = cplx(b(q, q).real(), 0.0);

        for (int i = 0; i < n; ++i) {
          const cplx vip = v(i, p);
          const cplx viq = v(i, q);
          v(i, p) = vip * c + viq * uqp;
          v(i, q) = vip * upq + viq * uqq;
        }
      }
    }
  }

  // sort ascending, stable so equal eigenvalues keep sweep order
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return b(i, i).real() < b(j, j).real();
  });

  EigenBasis basis;
  basis.eigenvalues.resize(static_cast<std::size_t>(n));
  basis.eigenvectors = CMatrix(n);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    basis.eigenvalues[static_cast<std::size_t>(k)] = b(src, src).real();

    // phase convention: largest-magnitude entry real nonnegative
    int imax = 0;
    double amax = -1.0;
    for (int i = 0; i < n; ++i) {
      const double av = std::abs(v(i, src));
      if (av > amax) {
        amax = av;
        imax = i;
      }
    }
    cplx rot(1.0, 0.0);
    if (amax > 0.0) rot = std::conj(v(imax, src)) / amax;
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += std::norm(v(i, src));
    const double scale = nrm > 0.0 ? 1.0 / std::sqrt(nrm) : 1.0;
    for (int i = 0; i < n; ++i)
      basis.eigenvectors(i, k) = v(i, src) * rot * scale;
  }
  return basis;
}

std::vector<std::vector<cplx>> noise_subspace(const EigenBasis& basis) {
  const int n = static_cast<int>(basis.eigenvalues.size());
  if (n < 2) throw std::invalid_argument("noise_subspace: requires M >= 2");
  std::vector<std::vector<cplx>> cols(static_cast<std::size_t>(n - 1));
  for (int k = 0; k < n - 1; ++k) {
    cols[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          basis.eigenvectors(i, k);
  }
  return cols;
}

std::vector<cplx> principal_eigvec(const EigenBasis& basis) {
  const int n = static_cast<int>(basis.eigenvalues.size());
  if (n < 1) throw std::invalid_argument("principal_eigvec: empty basis");
  std::vector<cplx> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    p[static_cast<std::size_t>(i)] = basis.eigenvectors(i, n - 1);
  return p;
}

std::vector<cplx> vec_pseudoinverse(const std::vector<cplx>& v) {
  double nrm = 0.0;
  for (const cplx& x : v) nrm += std::norm(x);
  if (nrm <= 0.0) throw std::invalid_argument("pseudoinverse: zero vector");
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]) / nrm;
  return out;
}

}  // namespace tfdoa
