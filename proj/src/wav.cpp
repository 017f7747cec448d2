// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tfdoa {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

void write_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ofstream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

TimeSignal load_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("wav: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("wav: not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const char* id = reinterpret_cast<const char*>(buf.data() + pos);
    const std::uint32_t sz = read_u32(buf.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + sz > buf.size())
      throw std::runtime_error("wav: truncated chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (sz < 16) throw std::runtime_error("wav: bad fmt chunk in " + path);
      format = read_u16(buf.data() + body);
      channels = read_u16(buf.data() + body + 2);
      rate = read_u32(buf.data() + body + 4);
      bits = read_u16(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = sz;
    }
    pos = body + sz + (sz & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_off == 0)
    throw std::runtime_error("wav: missing fmt/data chunk in " + path);
  if (format != 1 || bits != 16)
    throw std::runtime_error("wav: unsupported encoding (need 16-bit PCM): " +
                             path);
  if (channels != 1)
    throw std::runtime_error("wav: expected mono, got " +
                             std::to_string(channels) + " channels: " + path);
  if (rate != 16000)
    throw std::runtime_error("wav: expected 16000 Hz, got " +
                             std::to_string(rate) + ": " + path);
  if (data_len % 2 != 0)
    throw std::runtime_error("wav: truncated sample data in " + path);

  TimeSignal sig;
  sig.sample_rate = 16000.0;
  const std::size_t n = data_len / 2;
  sig.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int16_t s = static_cast<std::int16_t>(
        read_u16(buf.data() + data_off + 2 * i));
    sig.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return sig;
}

void save_wav(const std::string& path, const TimeSignal& signal,
              double* peak_factor) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("wav: cannot write " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
  const std::uint32_t rate =
      static_cast<std::uint32_t>(std::lround(signal.sample_rate));

  os.write("RIFF", 4);
  write_u32(os, 36 + 2 * n);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32(os, 16);
  write_u16(os, 1);  // PCM
  write_u16(os, 1);  // mono
  write_u32(os, rate);
  write_u32(os, rate * 2);
  write_u16(os, 2);
  write_u16(os, 16);
  os.write("data", 4);
  write_u32(os, 2 * n);

  double peak = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const double v = signal.samples[i];
    peak = std::max(peak, std::fabs(v));
    const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
    const std::int16_t s =
        static_cast<std::int16_t>(std::lround(clipped * 32768.0) > 32767
                                      ? 32767
                                      : std::lround(clipped * 32768.0));
    write_u16(os, static_cast<std::uint16_t>(s));
  }
  if (peak_factor) *peak_factor = peak;
  if (!os) throw std::runtime_error("wav: write failed: " + path);
}

}  // namespace tfdoa
