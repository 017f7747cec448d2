// Copyright 2026 The tfdoa Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfdoa/criteria.hpp"
#include "tfdoa/mask.hpp"
#include "tfdoa/roomsim.hpp"

namespace tfdoa {

enum class Method { music, principal, srp, proposed };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct MaskSource {
  enum class Kind { oracle, file, constant };
  Kind kind = Kind::oracle;
  std::string path;  // file kind only
};

struct ExperimentConfig {
  Method method = Method::proposed;
  PostProc postproc{PostProc::Kind::hadamard, 0.5};
  MaskSource mask_source;
  double rt60 = 0.3;
  double snr_db = 20.0;
  double sir_db = 0.0;
  int K = 2;
  int T_frames = 50;
  int trials = 50;
  std::uint64_t base_seed = 0;
  double grid_resolution = 0.5;
};

struct TrialResult {
  double theta_hat = 0.0;
  double theta_gt = 0.0;
  double abs_error_deg = 0.0;
  bool success = false;  // strict |err| < 3 degrees
};

struct ExperimentSummary {
  ExperimentConfig config;
  double accuracy = 0.0;
  double mae_deg = 0.0;
  std::vector<TrialResult> results;
  double wall_time_s = 0.0;
};

constexpr double kSuccessThresholdDeg = 3.0;

// One full pipeline pass: scenario -> synthesis -> render -> STFT ->
// mask/post-processing -> criterion -> grid search.
TrialResult run_trial(const ExperimentConfig& cfg, int trial_index);

// Trials 0..trials-1, optionally spread over worker threads (0 = hardware
// concurrency). Results are deterministic regardless of worker count.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, int workers = 0);

struct SweepConfig {
  ExperimentConfig base;
  std::vector<Method> methods;
  std::vector<PostProc> postprocs;
  std::vector<double> rt60s;
  std::vector<double> sir_dbs;
  std::vector<int> T_values;
};

// Cartesian sweep, rows nested method > postproc > rt60 > sir > T.
std::vector<ExperimentSummary> run_sweep(const SweepConfig& sweep,
                                         int workers = 0);

// CSV: method,postproc,rt60_s,snr_db,sir_db,K,T,trials,accuracy,mae_deg,seed
void emit_report(const std::vector<ExperimentSummary>& summaries,
                 const std::string& path);

ExperimentConfig config_from_json_string(const std::string& text);
SweepConfig sweep_from_json_string(const std::string& text);

}  // namespace tfdoa
