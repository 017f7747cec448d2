// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tfdoa {

namespace {

void check_beta(const PostProc& pp) {
  if (pp.kind == PostProc::Kind::binary_threshold &&
      !(pp.beta > 0.0 && pp.beta < 1.0))
    throw std::invalid_argument("post_process: beta must be in (0, 1)");
}

void write_u32le(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

MaskTensor ones_mask(int M, int T, int F) {
  MaskTensor mask;
  mask.M = M;
  mask.T = T;
  mask.F = F;
  mask.weights.assign(static_cast<std::size_t>(M) * T * F, 1.0);
  return mask;
}

MaskTensor oracle_irm(const SnapshotTensor& speech_images,
                      const SnapshotTensor& nonspeech_images) {
  if (speech_images.M != nonspeech_images.M ||
      speech_images.T != nonspeech_images.T ||
      speech_images.F != nonspeech_images.F)
    throw std::invalid_argument("oracle_irm: shape mismatch");
  MaskTensor mask;
  mask.M = speech_images.M;
  mask.T = speech_images.T;
  mask.F = speech_images.F;
  mask.weights.resize(speech_images.data.size());
  for (std::size_t i = 0; i < mask.weights.size(); ++i) {
    const double ps = std::norm(speech_images.data[i]);
    const double pn = std::norm(nonspeech_images.data[i]);
    const double denom = ps + pn;
    mask.weights[i] = denom > 0.0 ? std::sqrt(ps / denom) : 0.0;
  }
  return mask;
}

MaskTensor post_process(const PostProc& pp, const MaskTensor& g) {
  check_beta(pp);
  const int M = g.M, T = g.T, F = g.F;
  MaskTensor out;
  out.M = M;
  out.T = T;
  out.F = F;
  out.weights.resize(g.weights.size());

  using Kind = PostProc::Kind;
  switch (pp.kind) {
    case Kind::identity:
      out.weights = g.weights;
      return out;
    case Kind::constant:
      std::fill(out.weights.begin(), out.weights.end(), 1.0);
      return out;
    case Kind::binary_threshold:
      for (std::size_t i = 0; i < g.weights.size(); ++i)
        out.weights[i] = g.weights[i] > pp.beta ? 1.0 : 0.0;
      return out;
    default:
      break;
  }

  // mic-reducing kinds: value shared by all m at each (t, f)
  std::vector<double> col(static_cast<std::size_t>(M));
  for (int t = 0; t < T; ++t) {
    for (int f = 0; f < F; ++f) {
      for (int m = 0; m < M; ++m) col[static_cast<std::size_t>(m)] = g.at(m, t, f);
      double v = 0.0;
      switch (pp.kind) {
        case Kind::minimum:
          v = *std::min_element(col.begin(), col.end());
          break;
        case Kind::maximum:
          v = *std::max_element(col.begin(), col.end());
          break;
        case Kind::arith_mean: {
          double acc = 0.0;
          for (double x : col) acc += x;
          v = acc / static_cast<double>(M);
          break;
        }
        case Kind::arith_median: {
          std::vector<double> tmp = col;
          std::sort(tmp.begin(), tmp.end());
          const std::size_t n = tmp.size();
          v = (n % 2 == 1) ? tmp[n / 2] : 0.5 * (tmp[n / 2 - 1] + tmp[n / 2]);
          break;
        }
        case Kind::hadamard: {
          double prod = 1.0;
          for (double x : col) prod *= x;
          v = prod;
          break;
        }
        case Kind::geo_mean: {
          double prod = 1.0;
          for (double x : col) prod *= x;
          v = std::pow(prod, 1.0 / static_cast<double>(M));
          break;
        }
        default:
          break;
      }
      for (int m = 0; m < M; ++m) out.at(m, t, f) = v;
    }
  }
  return out;
}

void save_mask(const std::string& path, const MaskTensor& mask) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("mask: cannot write " + path);
  os.write("TFW1", 4);
  write_u32le(os, static_cast<std::uint32_t>(mask.M));
  write_u32le(os, static_cast<std::uint32_t>(mask.T));
  write_u32le(os, static_cast<std::uint32_t>(mask.F));
  for (double w : mask.weights) {
    const float v = static_cast<float>(w);
    static_assert(sizeof(float) == 4);
    char b[4];
    std::memcpy(b, &v, 4);
    os.write(b, 4);
  }
  if (!os) throw std::runtime_error("mask: write failed: " + path);
}

MaskTensor load_mask(const std::string& path, int M, int T, int F) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("mask: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "TFW1", 4) != 0)
    throw std::runtime_error("mask: bad magic in " + path);
  const std::uint32_t fm = read_u32le(is);
  const std::uint32_t ft = read_u32le(is);
  const std::uint32_t ff = read_u32le(is);
  if (!is) throw std::runtime_error("mask: truncated header in " + path);
  if (fm != static_cast<std::uint32_t>(M) ||
      ft != static_cast<std::uint32_t>(T) ||
      ff != static_cast<std::uint32_t>(F))
    throw std::runtime_error(
        "mask: dimension mismatch, file has (" + std::to_string(fm) + "," +
        std::to_string(ft) + "," + std::to_string(ff) + "), expected (" +
        std::to_string(M) + "," + std::to_string(T) + "," +
        std::to_string(F) + ")");

  MaskTensor mask;
  mask.M = M;
  mask.T = T;
  mask.F = F;
  mask.weights.resize(static_cast<std::size_t>(M) * T * F);
  for (std::size_t i = 0; i < mask.weights.size(); ++i) {
    char b[4];
    is.read(b, 4);
    if (!is) throw std::runtime_error("mask: truncated data in " + path);
    float v;
    std::memcpy(&v, b, 4);
    if (!(v >= 0.0f && v <= 1.0f)) {
      const int m = static_cast<int>(i / (static_cast<std::size_t>(T) * F));
      const int t = static_cast<int>((i / F) % static_cast<std::size_t>(T));
      const int f = static_cast<int>(i % static_cast<std::size_t>(F));
      throw std::runtime_error("mask: value out of [0,1] at (" +
                               std::to_string(m) + "," + std::to_string(t) +
                               "," + std::to_string(f) + ") in " + path);
    }
    mask.weights[i] = static_cast<double>(v);
  }
  return mask;
}

PostProc parse_postproc(const std::string& name) {
  using Kind = PostProc::Kind;
  if (name == "identity") return {Kind::identity, 0.5};
  if (name == "minimum") return {Kind::minimum, 0.5};
  if (name == "maximum") return {Kind::maximum, 0.5};
  if (name == "arith_mean") return {Kind::arith_mean, 0.5};
  if (name == "arith_median") return {Kind::arith_median, 0.5};
  if (name == "hadamard") return {Kind::hadamard, 0.5};
  if (name == "geo_mean") return {Kind::geo_mean, 0.5};
  if (name == "constant") return {Kind::constant, 0.5};
  const std::string prefix = "binary_threshold(";
  if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
    const std::string num = name.substr(prefix.size(),
                                        name.size() - prefix.size() - 1);
    PostProc pp{Kind::binary_threshold, std::stod(num)};
    check_beta(pp);
    return pp;
  }
  throw std::invalid_argument("unknown post-processing: " + name);
}

std::string to_string(const PostProc& pp) {
  using Kind = PostProc::Kind;
  switch (pp.kind) {
    case Kind::identity: return "identity";
    case Kind::minimum: return "minimum";
    case Kind::maximum: return "maximum";
    case Kind::arith_mean: return "arith_mean";
    case Kind::arith_median: return "arith_median";
    case Kind::hadamard: return "hadamard";
    case Kind::geo_mean: return "geo_mean";
    case Kind::constant: return "constant";
    case Kind::binary_threshold: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "binary_threshold(%g)", pp.beta);
      return buf;
    }
  }
  return "unknown";
}

}  // namespace tfdoa
