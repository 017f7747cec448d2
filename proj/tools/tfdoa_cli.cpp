// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: single-scenario estimation, Monte-Carlo
// evaluation, parameter sweeps, pseudo-spectrum export, and RIR inspection.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tfdoa/eval.hpp"
#include "tfdoa/rng.hpp"
#include "tfdoa/wav.hpp"

namespace {

using namespace tfdoa;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  std::string method;
  std::string postproc;
  double sir_db = std::numeric_limits<double>::quiet_NaN();
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  double rt60 = std::numeric_limits<double>::quiet_NaN();
  int frames = -1;
  int trials = -1;
  int k_interferers = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_path, "output CSV path");
  cmd->add_option("--seed", flags.seed, "base seed")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--workers", flags.workers, "worker thread count");
  cmd->add_option("--method", flags.method,
                  "music | principal | srp | proposed");
  cmd->add_option("--postproc", flags.postproc,
                  "post-processing, e.g. hadamard or binary_threshold(0.9)");
  cmd->add_option("--sir-db", flags.sir_db, "signal-to-interference ratio");
  cmd->add_option("--snr-db", flags.snr_db, "signal-to-noise ratio");
  cmd->add_option("--rt60", flags.rt60, "reverberation time in seconds");
  cmd->add_option("--frames", flags.frames, "number of STFT frames T");
  cmd->add_option("--trials", flags.trials, "Monte-Carlo trial count");
  cmd->add_option("-k,--interferers", flags.k_interferers,
                  "number of interference sources");
}

ExperimentConfig build_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty())
    cfg = config_from_json_string(read_file(flags.config_path));
  if (!flags.method.empty()) cfg.method = parse_method(flags.method);
  if (!flags.postproc.empty()) cfg.postproc = parse_postproc(flags.postproc);
  if (flags.sir_db == flags.sir_db) cfg.sir_db = flags.sir_db;
  if (flags.snr_db == flags.snr_db) cfg.snr_db = flags.snr_db;
  if (flags.rt60 == flags.rt60) cfg.rt60 = flags.rt60;
  if (flags.frames > 0) cfg.T_frames = flags.frames;
  if (flags.trials > 0) cfg.trials = flags.trials;
  if (flags.k_interferers >= 0) cfg.K = flags.k_interferers;
  if (flags.seed_set) cfg.base_seed = flags.seed;
  return cfg;
}

// Rebuilds the run_trial pipeline but keeps the spectrum for export.
int run_estimate(const CommonFlags& flags, bool spectrum_only) {
  ExperimentConfig cfg = build_config(flags);

  AngleGrid grid(cfg.grid_resolution);
  StftConfig stft;
  const ArrayGeometry geom = rect_array(3, 3, 0.02, {4.5, 3.5, 1.75});
  std::vector<double> bin_freqs;
  for (int k = 0; k <= stft.fft_size / 2; ++k) {
    const double fk = static_cast<double>(k) * kSampleRate / stft.fft_size;
    if (fk >= stft.f_lo && fk <= stft.f_hi) bin_freqs.push_back(fk);
  }
  const SteeringField field = build_steering_field(geom, grid, bin_freqs);
  const double duration =
      (stft.fft_size + static_cast<double>(cfg.T_frames) * stft.hop) /
          kSampleRate +
      0.05;

  std::uint64_t stream = cfg.base_seed;
  Rng seeds(splitmix64(stream));
  const Scenario scenario = sample_scenario(
      {cfg.rt60, cfg.snr_db, cfg.sir_db, cfg.K}, seeds.next_u64());
  const TimeSignal speech = synth_speech_like(seeds.next_u64(), duration);
  std::vector<TimeSignal> interferers;
  const InterfKind kinds[3] = {InterfKind::machine, InterfKind::water_like,
                               InterfKind::wind_like};
  for (int k = 0; k < cfg.K; ++k)
    interferers.push_back(
        synth_interference(kinds[k % 3], seeds.next_u64(), duration));
  const RenderedSignals rendered =
      render_scenario(scenario, speech, interferers);

  auto stack = [&](const std::vector<TimeSignal>& channels) {
    std::vector<Spectrogram> specs;
    for (const TimeSignal& ch : channels)
      specs.push_back(compute_stft(ch, stft));
    return pad_or_truncate(stack_snapshots(specs), cfg.T_frames);
  };
  const SnapshotTensor y = stack(rendered.mixture);

  MaskTensor g;
  switch (cfg.mask_source.kind) {
    case MaskSource::Kind::constant:
      g = ones_mask(y.M, y.T, y.F);
      break;
    case MaskSource::Kind::oracle:
      g = oracle_irm(stack(rendered.speech_images),
                     stack(rendered.nonspeech_images));
      break;
    case MaskSource::Kind::file:
      g = load_mask(cfg.mask_source.path, y.M, y.T, y.F);
      break;
  }
  const MaskTensor w = post_process(cfg.postproc, g);

  SpatialSpectrum spectrum;
  switch (cfg.method) {
    case Method::music:
      spectrum = spectrum_music(compute_wscm(y, w), field);
      break;
    case Method::principal:
      spectrum = spectrum_principal(compute_wscm(y, w), field);
      break;
    case Method::srp:
      spectrum = spectrum_srp(compute_wscm(y, w), field);
      break;
    case Method::proposed:
      spectrum = spectrum_proposed(compute_norm_scm(y, w), field);
      break;
  }

  const double theta_hat = estimate_doa(spectrum, grid);
  const double err = angular_distance(theta_hat, scenario.speaker.theta_deg);
  if (!spectrum_only) {
    std::printf("theta_hat_deg: %.4f\n", theta_hat);
    std::printf("theta_gt_deg:  %.4f\n", scenario.speaker.theta_deg);
    std::printf("abs_error_deg: %.4f\n", err);
  }
  if (!flags.out_path.empty()) {
    export_spectrum_csv(spectrum, grid, flags.out_path);
    std::printf("spectrum csv:  %s\n", flags.out_path.c_str());
  } else if (spectrum_only) {
    throw std::runtime_error("spectrum: --out is required");
  }
  return 0;
}

int run_eval(const CommonFlags& flags) {
  const ExperimentConfig cfg = build_config(flags);
  const ExperimentSummary summary = run_experiment(cfg, flags.workers);
  std::printf("method=%s postproc=%s accuracy=%.4f mae=%.4f deg (%.1fs)\n",
              to_string(cfg.method).c_str(), to_string(cfg.postproc).c_str(),
              summary.accuracy, summary.mae_deg, summary.wall_time_s);
  if (!flags.out_path.empty()) {
    emit_report({summary}, flags.out_path);
    std::printf("report csv: %s\n", flags.out_path.c_str());
  }
  return 0;
}

int run_sweep_cmd(const CommonFlags& flags) {
  if (flags.config_path.empty())
    throw std::runtime_error("sweep: --config is required");
  SweepConfig sweep = sweep_from_json_string(read_file(flags.config_path));
  if (flags.seed_set) sweep.base.base_seed = flags.seed;
  if (flags.trials > 0) sweep.base.trials = flags.trials;
  const std::vector<ExperimentSummary> summaries =
      run_sweep(sweep, flags.workers);
  for (const ExperimentSummary& s : summaries)
    std::printf("method=%s postproc=%s rt60=%.2f sir=%+.1f T=%d acc=%.4f "
                "mae=%.4f\n",
                to_string(s.config.method).c_str(),
                to_string(s.config.postproc).c_str(), s.config.rt60,
                s.config.sir_db, s.config.T_frames, s.accuracy, s.mae_deg);
  if (!flags.out_path.empty()) {
    emit_report(summaries, flags.out_path);
    std::printf("report csv: %s\n", flags.out_path.c_str());
  }
  return 0;
}

int run_rir(const CommonFlags& flags, const std::string& wav_path,
            const std::string& decay_path, int order) {
  RoomConfig room;
  if (flags.rt60 == flags.rt60) room.rt60 = flags.rt60;
  if (order > 0) room.max_image_order = order;

  Rng rng(flags.seed_set ? flags.seed : 1);
  const Vec3 src{rng.uniform(1.0, 8.0), rng.uniform(1.0, 6.0),
                 rng.uniform(1.0, 2.5)};
  const Vec3 mic{4.5, 3.5, 1.75};
  const double alpha = sabine_absorption(room);
  const TimeSignal rir =
      simulate_rir(room, src, mic, alpha, RirMode::frac_delay);

  if (!wav_path.empty()) {
    // normalize peak to avoid PCM clipping
    TimeSignal scaled = rir;
    double peak = 0.0;
    for (double v : scaled.samples) peak = std::max(peak, std::fabs(v));
    if (peak > 0.0)
      for (double& v : scaled.samples) v *= 0.99 / peak;
    double peak_factor = 0.0;
    save_wav(wav_path, scaled, &peak_factor);
    std::printf("rir wav: %s (peak scale %.6g)\n", wav_path.c_str(), peak);
  }
  const std::vector<double> decay = schroeder_decay_db(rir);
  if (!decay_path.empty()) {
    std::ofstream os(decay_path);
    os << "time_s,decay_db\n";
    for (std::size_t i = 0; i < decay.size(); ++i)
      os << static_cast<double>(i) / room.fs << "," << decay[i] << "\n";
    std::printf("decay csv: %s\n", decay_path.c_str());
  }
  std::printf("rt60 requested %.3f s, -60 dB crossing %.3f s\n", room.rt60,
              decay_crossing_time(decay, room.fs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wideband DoA estimation toolkit"};
  app.require_subcommand(1);

  CommonFlags est_flags, spec_flags, eval_flags, sweep_flags, rir_flags;
  std::string rir_wav = "rir.wav", rir_decay = "decay.csv";
  int rir_order = 0;

  CLI::App* est = app.add_subcommand("estimate",
                                     "run one scenario and report theta_hat");
  add_common(est, est_flags);

  CLI::App* spec = app.add_subcommand(
      "spectrum", "emit a normalized pseudo-spectrum CSV for one scenario");
  add_common(spec, spec_flags);

  CLI::App* evalc = app.add_subcommand("eval", "run a Monte-Carlo experiment");
  add_common(evalc, eval_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "run a Cartesian sweep");
  add_common(sweep, sweep_flags);

  CLI::App* rir = app.add_subcommand("rir",
                                     "emit an RIR WAV and Schroeder decay CSV");
  add_common(rir, rir_flags);
  rir->add_option("--wav", rir_wav, "output WAV path");
  rir->add_option("--decay-out", rir_decay, "output decay CSV path");
  rir->add_option("--order", rir_order, "image source order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return run_estimate(est_flags, false);
    if (spec->parsed()) return run_estimate(spec_flags, true);
    if (evalc->parsed()) return run_eval(eval_flags);
    if (sweep->parsed()) return run_sweep_cmd(sweep_flags);
    if (rir->parsed()) return run_rir(rir_flags, rir_wav, rir_decay, rir_order);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
