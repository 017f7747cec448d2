// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace tfdoa {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = x[i + k];
        const cplx v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

void dft_direct(std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = sign * 2.0 * kPi * static_cast<double>(k) *
                         static_cast<double>(m) / static_cast<double>(n);
      acc += x[m] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  x = std::move(out);
}

}  // namespace

void fft_inplace(std::vector<cplx>& x, bool inverse) {
  if (x.empty()) throw std::invalid_argument("fft: empty input");
  if (is_pow2(x.size())) {
    fft_radix2(x, inverse);
  } else {
    dft_direct(x, inverse);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= scale;
  }
}

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<cplx> fa(n, cplx(0.0, 0.0)), fb(n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = cplx(a[i], 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = cplx(b[i], 0.0);
  fft_inplace(fa, false);
  fft_inplace(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft_inplace(fa, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace tfdoa
