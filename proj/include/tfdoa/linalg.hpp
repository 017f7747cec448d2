// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "tfdoa/fft.hpp"

namespace tfdoa {

// Dense square complex matrix, row-major. Sizes here are tiny (M <= 16).
struct CMatrix {
  int n = 0;
  std::vector<cplx> a;

  CMatrix() = default;
  explicit CMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size) {}

  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const cplx& operator()(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }

  static CMatrix identity(int size);
  double frobenius() const;
};

// Eigenvalues ascending; eigenvectors(i, k) pairs column k with eigenvalue k.
// Each column is unit norm with its largest-magnitude entry real nonnegative.
struct EigenBasis {
  std::vector<double> eigenvalues;
  CMatrix eigenvectors;
};

// Cyclic Jacobi with complex rotations. Input must be Hermitian up to
// ||A - A^H||_max <= 1e-8 ||A||_max; it is symmetrized internally.
EigenBasis eig_hermitian(const CMatrix& a);

// Eigenvectors of the M-1 smallest eigenvalues, as columns. Requires M >= 2.
std::vector<std::vector<cplx>> noise_subspace(const EigenBasis& basis);

// Eigenvector of the largest eigenvalue.
std::vector<cplx> principal_eigvec(const EigenBasis& basis);

// v^H / ||v||^2; (v+)(v) = 1.
std::vector<cplx> vec_pseudoinverse(const std::vector<cplx>& v);

}  // namespace tfdoa
