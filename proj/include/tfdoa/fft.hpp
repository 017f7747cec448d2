// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

namespace tfdoa {

using cplx = std::complex<double>;

// In-place DFT, forward convention X[k] = sum_n x[n] exp(-j 2 pi k n / N).
// Radix-2 for power-of-two sizes, direct DFT otherwise. Inverse includes
// the 1/N scale.
void fft_inplace(std::vector<cplx>& x, bool inverse = false);

// Linear convolution of real sequences via zero-padded FFT.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

}  // namespace tfdoa
