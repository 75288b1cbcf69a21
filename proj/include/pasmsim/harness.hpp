// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pasmsim/analysis.hpp"
#include "pasmsim/config.hpp"
#include "pasmsim/detect.hpp"

namespace pasm {

enum class DetectorKind { ml, zf, mmse, sic_zf, sic_mmse, vamp };

std::string detector_name(DetectorKind k);
DetectorKind detector_from_name(const std::string& name);

struct SweepConfig {
  PasmConfig system;
  VampParams vamp;
  std::vector<DetectorKind> detectors{DetectorKind::vamp};
  std::vector<double> power_dbm{0.0};
  int frames = 10000;
  uint64_t seed = 1;
  int ls_block_frames = 100;  // large-scale redraw period
  int stop_errors = 500;      // early stop per detector, 0 disables
  bool pssm_geometry = false; // fixed center-array baseline
  bool record_wall_time = false;

  // bound evaluation
  int bound_ls_draws = 100;
  bool bound_use_approx = false;
  bool bound_match_sim_blocks = false;  // reuse the sweep's per-block draws
  uint64_t bound_max_pairs = uint64_t{1} << 14;
  bool bound_truncate = false;

  std::string profile;  // preset name when built from one

  // test hook: bypass geometry/fading with a fixed channel matrix
  std::optional<Eigen::MatrixXcd> fixed_channel;
};

struct BerRecord {
  double power_dbm = 0.0;
  std::string detector;
  uint64_t frames = 0;
  uint64_t bits = 0;
  uint64_t errors = 0;
  double ber = 0.0;
  double ci95 = 0.0;        // binomial normal-approximation half width
  double iters_mean = 0.0;
  double seconds = 0.0;
};

std::vector<std::string> profile_names();
SweepConfig profile_config(const std::string& name);

SweepConfig config_from_json(const std::string& text);
SweepConfig load_config_file(const std::string& path);
std::string config_to_json(const SweepConfig& cfg);

// Monte-Carlo BER sweep; one record per (power, detector).
std::vector<BerRecord> run_sweep(const SweepConfig& cfg);

// Union-bound curve; detector column reads bound-exact / bound-chiani.
std::vector<BerRecord> run_bound(const SweepConfig& cfg);

// Same pipeline over the fixed center-array baseline geometry.
std::vector<BerRecord> run_pssm_baseline(SweepConfig cfg);

std::string csv_string(const std::vector<BerRecord>& records);
void write_csv(const std::string& path, const std::vector<BerRecord>& records);
void write_metadata(const std::string& csv_path, const SweepConfig& cfg, double wall_seconds);

// log-domain linear interpolation of the power where a BER curve crosses
// `target`; empty if the curve never brackets it.
std::optional<double> crossing_power_dbm(const std::vector<BerRecord>& records,
                                         const std::string& detector, double target);

}  // namespace pasm
