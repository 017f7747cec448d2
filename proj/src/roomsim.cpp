// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#include "tfdoa/roomsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "tfdoa/fft.hpp"
#include "tfdoa/rng.hpp"

namespace tfdoa {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSincHalf = 40;  // 81-tap fractional delay kernel

double mean_power(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

bool inside_room(const RoomConfig& room, Vec3 p) {
  return p.x > 0.0 && p.x < room.dims[0] && p.y > 0.0 && p.y < room.dims[1] &&
         p.z > 0.0 && p.z < room.dims[2];
}

}  // namespace

double sabine_absorption(const RoomConfig& room) {
  if (room.rt60 <= 0.0) throw std::invalid_argument("sabine: rt60 <= 0");
  const double lx = room.dims[0], ly = room.dims[1], lz = room.dims[2];
  if (lx <= 0.0 || ly <= 0.0 || lz <= 0.0)
    throw std::invalid_argument("sabine: invalid room dimensions");
  const double volume = lx * ly * lz;
  const double surface = 2.0 * (lx * ly + lx * lz + ly * lz);
  const double alpha = 0.161 * volume / (surface * room.rt60);
  if (alpha > 1.0)
    throw std::invalid_argument("sabine: room too small for requested rt60");
  return alpha;
}

TimeSignal simulate_rir(const RoomConfig& room, Vec3 src, Vec3 mic,
                        double alpha, RirMode mode, double c) {
  if (!inside_room(room, src) || !inside_room(room, mic))
    throw std::invalid_argument("rir: source/mic outside room");
  if (src.x == mic.x && src.y == mic.y && src.z == mic.z)
    throw std::invalid_argument("rir: source and mic coincide");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("rir: alpha out of (0, 1]");

  const double beta = std::sqrt(1.0 - alpha);
  const double t_max = 1.25 * room.rt60 + 0.05;
  const double d_max = c * t_max;
  const int order = room.max_image_order;

  const std::size_t len =
      static_cast<std::size_t>(std::ceil(t_max * room.fs)) + 2 * kSincHalf + 2;
  std::vector<double> h(len, 0.0);

  const double s[3] = {src.x, src.y, src.z};
  const double m[3] = {mic.x, mic.y, mic.z};
  const double L[3] = {room.dims[0], room.dims[1], room.dims[2]};

  // the order bounds the total reflection count of an image; per axis the
  // lattice index never needs to exceed it, and the max delay tightens it
  int n_lim[3];
  for (int a = 0; a < 3; ++a)
    n_lim[a] = std::min(order / 2 + 1,
                        static_cast<int>(std::ceil(d_max / (2.0 * L[a]))) + 1);

  // powers of the reflection coefficient, indexed by reflection count
  std::vector<double> beta_pow(static_cast<std::size_t>(order) + 1, 1.0);
  for (std::size_t r = 1; r < beta_pow.size(); ++r)
    beta_pow[r] = beta_pow[r - 1] * beta;

  // the lattice factorizes per axis: one displacement and one reflection
  // count for every (n, q) pair, pruned against distance and order
  struct AxisTerm {
    double d;
    int refl;
  };
  std::vector<AxisTerm> axis[3];
  for (int a = 0; a < 3; ++a) {
    for (int n = -n_lim[a]; n <= n_lim[a]; ++n) {
      for (int q = 0; q < 2; ++q) {
        // image - mic displacement, written symmetrically in src and mic
        const double da = q == 0 ? (s[a] - m[a]) + 2.0 * n * L[a]
                                 : 2.0 * n * L[a] - (s[a] + m[a]);
        if (std::fabs(da) > d_max) continue;
        const int refl = std::abs(n - q) + std::abs(n);
        if (refl > order) continue;
        axis[a].push_back({da, refl});
      }
    }
  }

  const double dmax2 = d_max * d_max;
  const double fs_over_c = room.fs / c;
  const double cd = std::cos(kPi / (kSincHalf + 1));
  const double sd = std::sin(kPi / (kSincHalf + 1));

  for (const AxisTerm& ax : axis[0]) {
    const double dx2 = ax.d * ax.d;
    if (dx2 > dmax2) continue;
    for (const AxisTerm& ay : axis[1]) {
      const double dxy2 = dx2 + ay.d * ay.d;
      if (dxy2 > dmax2) continue;
      const int rxy = ax.refl + ay.refl;
      if (rxy > order) continue;
      for (const AxisTerm& az : axis[2]) {
        const int refl = rxy + az.refl;
        if (refl > order) continue;
        const double d2 = dxy2 + az.d * az.d;
        if (d2 > dmax2 || d2 <= 0.0) continue;
        const double d = std::sqrt(d2);
        const double gain =
            beta_pow[static_cast<std::size_t>(refl)] / (4.0 * kPi * d);
        if (gain == 0.0) continue;
        const double delay = d * fs_over_c;
        const long center = std::lround(delay);

        if (mode == RirMode::nearest_sample) {
          if (center >= 0 && static_cast<std::size_t>(center) < len)
            h[static_cast<std::size_t>(center)] += gain;
          continue;
        }

        const double frac = delay - static_cast<double>(center);
        if (frac == 0.0) {
          // the sinc collapses to a single unit tap
          if (center >= 0 && static_cast<std::size_t>(center) < len)
            h[static_cast<std::size_t>(center)] += gain;
          continue;
        }
        // sin(pi (j - frac)) = -(-1)^j sin(pi frac): one sine for all taps,
        // and the Hann window advances by a fixed rotation per tap
        const double s0 = std::sin(kPi * frac) / kPi;
        const double theta0 =
            kPi * (static_cast<double>(-kSincHalf) - frac) / (kSincHalf + 1);
        double wc = std::cos(theta0);
        double ws = std::sin(theta0);
        double sign = (kSincHalf % 2 == 0) ? -1.0 : 1.0;  // -(-1)^j at j=-40
        for (long j = -kSincHalf; j <= kSincHalf; ++j) {
          const long k = center + j;
          if (k >= 0 && static_cast<std::size_t>(k) < len) {
            const double sinc =
                sign * s0 / (static_cast<double>(j) - frac);
            const double win = 0.5 * (1.0 + wc);
            h[static_cast<std::size_t>(k)] += gain * sinc * win;
          }
          const double wc_next = wc * cd - ws * sd;
          ws = ws * cd + wc * sd;
          wc = wc_next;
          sign = -sign;
        }
      }
    }
  }
  return TimeSignal{std::move(h), room.fs};
}

Scenario sample_scenario(const ScenarioParams& params, std::uint64_t seed) {
  if (params.K < 0) throw std::invalid_argument("scenario: K < 0");
  Scenario sc;
  sc.room.rt60 = params.rt60;
  sc.snr_db = params.snr_db;
  sc.sir_db = params.sir_db;
  sc.seed = seed;
  sc.array = rect_array(3, 3, 0.02, {4.5, 3.5, 1.75});

  Rng rng(seed);
  const int n_src = params.K + 1;
  std::vector<double> r(static_cast<std::size_t>(n_src));
  std::vector<double> z(static_cast<std::size_t>(n_src));
  for (int i = 0; i < n_src; ++i) {
    r[static_cast<std::size_t>(i)] = rng.uniform(1.0, 3.0);
    z[static_cast<std::size_t>(i)] = rng.uniform(1.0, 1.8);
  }

  std::vector<double> theta(static_cast<std::size_t>(n_src));
  bool ok = false;
  for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
    for (int i = 0; i < n_src; ++i)
      theta[static_cast<std::size_t>(i)] = rng.uniform(0.0, 360.0);
    ok = true;
    for (int i = 0; i < n_src && ok; ++i)
      for (int j = i + 1; j < n_src && ok; ++j)
        if (angular_distance(theta[static_cast<std::size_t>(i)],
                             theta[static_cast<std::size_t>(j)]) < 10.0)
          ok = false;
  }
  if (!ok)
    throw std::runtime_error(
        "scenario: could not satisfy angular separation after 10000 attempts");

  sc.speaker = {r[0], theta[0], z[0]};
  for (int k = 1; k < n_src; ++k)
    sc.interferers.push_back({r[static_cast<std::size_t>(k)],
                              theta[static_cast<std::size_t>(k)],
                              z[static_cast<std::size_t>(k)]});
  return sc;
}

Vec3 source_position(const Scenario& scenario, const SourcePlacement& p) {
  const Vec3 c = scenario.array.centroid();
  const double th = p.theta_deg * kPi / 180.0;
  return {c.x + p.r * std::cos(th), c.y + p.r * std::sin(th), p.z};
}

RenderedSignals render_scenario(const Scenario& scenario,
                                const TimeSignal& speech,
                                const std::vector<TimeSignal>& interferers,
                                RirMode mode) {
  if (interferers.size() != scenario.interferers.size())
    throw std::invalid_argument("render: interferer count mismatch");
  for (const TimeSignal& sig : interferers)
    if (sig.samples.size() != speech.samples.size())
      throw std::invalid_argument("render: source durations differ");

  const std::size_t n = speech.samples.size();
  const std::size_t n_mics = scenario.array.positions.size();
  const double alpha = sabine_absorption(scenario.room);

  auto render_source = [&](const SourcePlacement& place,
                           const std::vector<double>& dry) {
    const Vec3 pos = source_position(scenario, place);
    std::vector<TimeSignal> rirs;
    rirs.reserve(n_mics);
    std::size_t rir_len = 0;
    for (std::size_t m = 0; m < n_mics; ++m) {
      rirs.push_back(simulate_rir(scenario.room, pos,
                                  scenario.array.positions[m], alpha, mode));
      rir_len = std::max(rir_len, rirs.back().samples.size());
    }

    // one forward transform for the dry signal, then two real RIRs per
    // complex transform (the imaginary part carries the second channel)
    std::size_t nfft = 1;
    while (nfft < n + rir_len - 1) nfft <<= 1;
    std::vector<cplx> dry_f(nfft, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) dry_f[i] = cplx(dry[i], 0.0);
    fft_inplace(dry_f, false);

    std::vector<std::vector<double>> images(n_mics);
    std::vector<cplx> z(nfft);
    for (std::size_t m = 0; m < n_mics; m += 2) {
      const bool paired = m + 1 < n_mics;
      std::fill(z.begin(), z.end(), cplx(0.0, 0.0));
      const std::vector<double>& ha = rirs[m].samples;
      for (std::size_t i = 0; i < ha.size(); ++i) z[i] = cplx(ha[i], 0.0);
      if (paired) {
        const std::vector<double>& hb = rirs[m + 1].samples;
        for (std::size_t i = 0; i < hb.size(); ++i)
          z[i] = cplx(z[i].real(), hb[i]);
      }
      fft_inplace(z, false);
      for (std::size_t i = 0; i < nfft; ++i) z[i] *= dry_f[i];
      fft_inplace(z, true);
      images[m].resize(n);  // keep the dry-signal duration
      for (std::size_t i = 0; i < n; ++i) images[m][i] = z[i].real();
      if (paired) {
        images[m + 1].resize(n);
        for (std::size_t i = 0; i < n; ++i) images[m + 1][i] = z[i].imag();
      }
    }
    return images;
  };

  RenderedSignals out;
  std::vector<std::vector<double>> speech_img =
      render_source(scenario.speaker, speech.samples);
  const double p_speech = mean_power(speech_img[0]);
  if (p_speech <= 0.0)
    throw std::runtime_error("render: silent speech image at reference mic");

  // interference: per-source unit power at mic 1, then joint SIR scaling
  std::vector<std::vector<double>> interf_sum(n_mics,
                                              std::vector<double>(n, 0.0));
  if (!interferers.empty()) {
    for (std::size_t k = 0; k < interferers.size(); ++k) {
      std::vector<std::vector<double>> img =
          render_source(scenario.interferers[k], interferers[k].samples);
      const double pk = mean_power(img[0]);
      const double gk = pk > 0.0 ? 1.0 / std::sqrt(pk) : 0.0;
      for (std::size_t m = 0; m < n_mics; ++m)
        for (std::size_t i = 0; i < n; ++i)
          interf_sum[m][i] += gk * img[m][i];
    }
    const double p_interf = mean_power(interf_sum[0]);
    if (p_interf > 0.0) {
      const double target = p_speech * std::pow(10.0, -scenario.sir_db / 10.0);
      const double g = std::sqrt(target / p_interf);
      for (std::size_t m = 0; m < n_mics; ++m)
        for (std::size_t i = 0; i < n; ++i) interf_sum[m][i] *= g;
    }
  }

  const bool add_noise = std::isfinite(scenario.snr_db);
  const double sigma =
      add_noise ? std::sqrt(p_speech * std::pow(10.0, -scenario.snr_db / 10.0))
                : 0.0;
  Rng noise_rng(scenario.seed ^ 0x6d69636e6f697365ULL);  // noise stream

  out.mixture.resize(n_mics);
  out.speech_images.resize(n_mics);
  out.nonspeech_images.resize(n_mics);
  for (std::size_t m = 0; m < n_mics; ++m) {
    std::vector<double> nonspeech = std::move(interf_sum[m]);
    if (add_noise) {
      Rng mic_rng = noise_rng.split();
      for (std::size_t i = 0; i < n; ++i) nonspeech[i] += sigma * mic_rng.gaussian();
    }
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = speech_img[m][i] + nonspeech[i];
    out.speech_images[m] = TimeSignal{std::move(speech_img[m]), speech.sample_rate};
    out.nonspeech_images[m] = TimeSignal{std::move(nonspeech), speech.sample_rate};
    out.mixture[m] = TimeSignal{std::move(mix), speech.sample_rate};
  }
  return out;
}

std::string scenario_to_json_string(const Scenario& sc) {
  nlohmann::json j;
  j["room"] = {{"dims", sc.room.dims},
               {"rt60", sc.room.rt60},
               {"fs", sc.room.fs},
               {"max_image_order", sc.room.max_image_order}};
  nlohmann::json pos = nlohmann::json::array();
  for (const Vec3& p : sc.array.positions) pos.push_back({p.x, p.y, p.z});
  j["array"] = {{"positions_m", pos},
                {"speed_of_sound", sc.array.speed_of_sound}};
  auto place = [](const SourcePlacement& p) {
    return nlohmann::json{{"r", p.r}, {"theta_deg", p.theta_deg}, {"z", p.z}};
  };
  j["speaker"] = place(sc.speaker);
  j["interferers"] = nlohmann::json::array();
  for (const SourcePlacement& p : sc.interferers)
    j["interferers"].push_back(place(p));
  j["snr_db"] = std::isfinite(sc.snr_db) ? nlohmann::json(sc.snr_db)
                                         : nlohmann::json("inf");
  j["sir_db"] = sc.sir_db;
  j["seed"] = sc.seed;
  return j.dump(2);
}

Scenario scenario_from_json_string(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Scenario sc;
  const auto& room = j.at("room");
  sc.room.dims = room.at("dims").get<std::array<double, 3>>();
  sc.room.rt60 = room.at("rt60").get<double>();
  sc.room.fs = room.at("fs").get<double>();
  sc.room.max_image_order = room.at("max_image_order").get<int>();
  sc.array = geometry_from_json_string(j.at("array").dump());
  auto place = [](const nlohmann::json& p) {
    return SourcePlacement{p.at("r").get<double>(),
                           p.at("theta_deg").get<double>(),
                           p.at("z").get<double>()};
  };
  sc.speaker = place(j.at("speaker"));
  for (const auto& p : j.at("interferers")) sc.interferers.push_back(place(p));
  sc.snr_db = j.at("snr_db").is_string()
                  ? std::numeric_limits<double>::infinity()
                  : j.at("snr_db").get<double>();
  sc.sir_db = j.at("sir_db").get<double>();
  sc.seed = j.at("seed").get<std::uint64_t>();
  return sc;
}

std::vector<double> schroeder_decay_db(const TimeSignal& rir) {
  const std::size_t n = rir.samples.size();
  std::vector<double> decay(n, -400.0);
  if (n == 0) return decay;
  std::vector<double> tail(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += rir.samples[i] * rir.samples[i];
    tail[i] = acc;
  }
  const double total = tail[0];
  if (total <= 0.0) return decay;
  for (std::size_t i = 0; i < n; ++i)
    decay[i] = tail[i] > 0.0 ? 10.0 * std::log10(tail[i] / total) : -400.0;
  return decay;
}

double decay_crossing_time(const std::vector<double>& decay_db, double fs,
                           double level_db) {
  for (std::size_t i = 0; i < decay_db.size(); ++i)
    if (decay_db[i] <= level_db) return static_cast<double>(i) / fs;
  return static_cast<double>(decay_db.size()) / fs;
}

}  // namespace tfdoa
