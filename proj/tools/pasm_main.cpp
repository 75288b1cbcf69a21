// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: BER sweeps, union-bound curves, the fixed-array
// baseline, side-by-side comparison and operation-count estimates.
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pasmsim/analysis.hpp"
#include "pasmsim/harness.hpp"

namespace {

struct CommonArgs {
  std::string profile;
  std::string config_path;
  std::string out_path;
  std::optional<uint64_t> seed;
  std::optional<int> frames;
  std::vector<double> powers;
  std::vector<std::string> detectors;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, const std::string& default_out) {
  a.out_path = default_out;
  cmd->add_option("--profile", a.profile, "preset name: fig4 fig5 fig6a fig6b fig9");
  cmd->add_option("--config", a.config_path, "JSON config file (may reference a profile)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", a.out_path, "output CSV path")->capture_default_str();
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--frames", a.frames, "frames per power point");
  cmd->add_option("--powers", a.powers, "power grid override, dBm")->delimiter(',');
  cmd->add_option("--detectors", a.detectors,
                  "detector list: ml zf mmse sic-zf sic-mmse vamp")
      ->delimiter(',');
  cmd->add_flag("--timing", a.timing, "record per-detector wall time in the seconds column");
}

pasm::SweepConfig resolve(const CommonArgs& a) {
  pasm::SweepConfig sc;
  if (!a.config_path.empty())
    sc = pasm::load_config_file(a.config_path);
  else if (!a.profile.empty())
    sc = pasm::profile_config(a.profile);
  if (a.seed) sc.seed = *a.seed;
  if (a.frames) sc.frames = *a.frames;
  if (!a.powers.empty()) sc.power_dbm = a.powers;
  if (!a.detectors.empty()) {
    sc.detectors.clear();
    for (const auto& n : a.detectors) sc.detectors.push_back(pasm::detector_from_name(n));
  }
  sc.record_wall_time = a.timing;
  return sc;
}

int emit(const std::string& path, const pasm::SweepConfig& sc,
         const std::vector<pasm::BerRecord>& records, double wall) {
  pasm::write_csv(path, records);
  pasm::write_metadata(path, sc, wall);
  std::printf("wrote %zu records to %s\n", records.size(), path.c_str());
  return 0;
}

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinching-antenna spatial multiplexing link simulator"};
  app.require_subcommand(1);

  CommonArgs sweep_args, bound_args, pssm_args, cmp_args, flops_args;

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo BER sweep over a power grid");
  add_common(sweep, sweep_args, "sweep.csv");

  auto* bound = app.add_subcommand("bound", "analytical union-bound BER curve");
  add_common(bound, bound_args, "bound.csv");
  bool chiani = false;
  std::optional<int> draws;
  bool match_blocks = false;
  bound->add_flag("--chiani", chiani, "two-exponential tail instead of the quadrature");
  bound->add_option("--draws", draws, "large-scale draws to average over");
  bound->add_flag("--match-sim-blocks", match_blocks,
                  "reuse the sweep's per-block large-scale streams");

  auto* pssm = app.add_subcommand("pssm", "fixed center-array baseline sweep");
  add_common(pssm, pssm_args, "pssm.csv");

  auto* cmp = app.add_subcommand("compare", "pinched and fixed-array sweeps in one CSV");
  add_common(cmp, cmp_args, "compare.csv");
  bool with_bound = false;
  cmp->add_flag("--with-bound", with_bound, "append union-bound rows");

  auto* flops = app.add_subcommand("flops", "operation-count estimates per detector");
  add_common(flops, flops_args, "flops.csv");
  int flop_iters = 10;
  flops->add_option("--iters", flop_iters, "iteration count for the message-passing detector")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    auto t0 = std::chrono::steady_clock::now();
    if (sweep->parsed()) {
      auto sc = resolve(sweep_args);
      auto rec = pasm::run_sweep(sc);
      return emit(sweep_args.out_path, sc, rec, wall_since(t0));
    }
    if (bound->parsed()) {
      auto sc = resolve(bound_args);
      sc.bound_use_approx = chiani;
      if (draws) sc.bound_ls_draws = *draws;
      sc.bound_match_sim_blocks = match_blocks;
      auto rec = pasm::run_bound(sc);
      return emit(bound_args.out_path, sc, rec, wall_since(t0));
    }
    if (pssm->parsed()) {
      auto sc = resolve(pssm_args);
      auto rec = pasm::run_pssm_baseline(sc);
      return emit(pssm_args.out_path, sc, rec, wall_since(t0));
    }
    if (cmp->parsed()) {
      auto sc = resolve(cmp_args);
      auto rec = pasm::run_sweep(sc);
      auto base = pasm::run_pssm_baseline(sc);
      for (auto& r : base) r.detector = "pssm-" + r.detector;
      rec.insert(rec.end(), base.begin(), base.end());
      if (with_bound) {
        auto b = pasm::run_bound(sc);
        rec.insert(rec.end(), b.begin(), b.end());
      }
      return emit(cmp_args.out_path, sc, rec, wall_since(t0));
    }
    if (flops->parsed()) {
      auto sc = resolve(flops_args);
      auto f = pasm::flop_estimate(sc.system, flop_iters);
      std::printf("config: n_wg=%d n_pa=%d n_rx=%d mod_b=%d mod_p=%d\n", sc.system.n_wg,
                  sc.system.n_pa, sc.system.n_rx, sc.system.mod_b, sc.system.mod_p);
      std::printf("%-14s %14.6e\n", "ml", f.ml);
      std::printf("%-14s %14.6e (%d iters, %.6e per iter)\n", "vamp", f.vamp, flop_iters,
                  f.vamp_per_iter);
      std::printf("%-14s %14.6e\n", "mmse", f.mmse);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
