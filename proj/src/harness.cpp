// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pasmsim/channel.hpp"
#include "pasmsim/geometry.hpp"
#include "pasmsim/rng.hpp"

namespace pasm {

namespace {

enum : uint64_t { kTagLargeScale = 1, kTagFrame = 2, kTagBoundDraw = 3 };

Rng stream_rng(uint64_t seed, std::initializer_list<uint64_t> path) {
  return Rng(seed, substream(seed, path));
}

struct Scene {
  DeploymentGeometry geom;
  ActivationPattern pat;
  Eigen::MatrixXcd hbar;
};

Scene build_scene(const SweepConfig& sc) {
  Scene s;
  s.geom = build_deployment(sc.system);
  s.pat = sc.pssm_geometry ? fixed_array_pattern(s.geom, sc.system)
                           : select_activation(s.geom, s.geom.user, sc.system);
  s.hbar = mean_channel(s.pat, s.geom, sc.system.lambda0());
  return s;
}

void validate_sweep(const SweepConfig& sc) {
  sc.system.validate();
  if (sc.frames < 1) throw std::invalid_argument("sweep: frame count must be positive");
  if (sc.power_dbm.empty()) throw std::invalid_argument("sweep: power grid is empty");
  if (sc.detectors.empty()) throw std::invalid_argument("sweep: detector list is empty");
  if (sc.ls_block_frames < 1) throw std::invalid_argument("sweep: block length must be positive");
  if (sc.stop_errors < 0) throw std::invalid_argument("sweep: stop threshold must be >= 0");
  if (sc.bound_ls_draws < 1) throw std::invalid_argument("sweep: bound draw count must be positive");
  if (sc.fixed_channel &&
      (sc.fixed_channel->rows() != sc.system.n_rx || sc.fixed_channel->cols() != sc.system.n_tx()))
    throw std::invalid_argument("sweep: fixed channel shape mismatch");
}

DetectionResult detect_one(DetectorKind k, const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                           const PasmConfig& sys, const CompositeConstellation& cc,
                           const VampParams& vp) {
  switch (k) {
    case DetectorKind::ml:
      return ml_detect(y, h, sys, cc);
    case DetectorKind::zf:
      return linear_detect(y, h, sys, cc, LinearKind::zf);
    case DetectorKind::mmse:
      return linear_detect(y, h, sys, cc, LinearKind::mmse);
    case DetectorKind::sic_zf:
      return sic_detect(y, h, sys, cc, LinearKind::zf);
    case DetectorKind::sic_mmse:
      return sic_detect(y, h, sys, cc, LinearKind::mmse);
    case DetectorKind::vamp:
      return vamp_detect(y, h, sys, cc, vp);
  }
  throw std::logic_error("sweep: unknown detector");
}

BerRecord finish_record(double power, const std::string& name, uint64_t frames, uint64_t bits,
                        uint64_t errors, double iters_sum, double seconds) {
  BerRecord r;
  r.power_dbm = power;
  r.detector = name;
  r.frames = frames;
  r.bits = bits;
  r.errors = errors;
  r.ber = bits ? double(errors) / double(bits) : 0.0;
  r.ci95 = bits ? 1.96 * std::sqrt(r.ber * (1.0 - r.ber) / double(bits)) : 0.0;
  r.iters_mean = frames ? iters_sum / double(frames) : 0.0;
  r.seconds = seconds;
  return r;
}

}  // namespace

std::string detector_name(DetectorKind k) {
  switch (k) {
    case DetectorKind::ml: return "ml";
    case DetectorKind::zf: return "zf";
    case DetectorKind::mmse: return "mmse";
    case DetectorKind::sic_zf: return "sic-zf";
    case DetectorKind::sic_mmse: return "sic-mmse";
    case DetectorKind::vamp: return "vamp";
  }
  throw std::logic_error("sweep: unknown detector");
}

DetectorKind detector_from_name(const std::string& name) {
  if (name == "ml") return DetectorKind::ml;
  if (name == "zf") return DetectorKind::zf;
  if (name == "mmse") return DetectorKind::mmse;
  if (name == "sic-zf") return DetectorKind::sic_zf;
  if (name == "sic-mmse") return DetectorKind::sic_mmse;
  if (name == "vamp") return DetectorKind::vamp;
  throw std::invalid_argument("sweep: unknown detector name: " + name);
}

std::vector<BerRecord> run_sweep(const SweepConfig& sc) {
  validate_sweep(sc);
  const PasmConfig& base = sc.system;
  auto cc = build_constellation(base);
  const int eta = spectral_efficiency(base);
  const int n_rx = base.n_rx;
  const int ndet = static_cast<int>(sc.detectors.size());

  Scene scene;
  if (!sc.fixed_channel) scene = build_scene(sc);

  std::vector<BerRecord> records;
  records.reserve(sc.power_dbm.size() * ndet);

  for (size_t pi = 0; pi < sc.power_dbm.size(); ++pi) {
    PasmConfig sys = base;
    sys.power_w = dbm_to_watt(sc.power_dbm[pi]);
    const double sqrt_delta = std::sqrt(sys.delta());

    std::vector<uint64_t> errors(ndet, 0);
    std::vector<uint64_t> frames_done(ndet, 0);
    std::vector<double> iters_sum(ndet, 0.0), seconds(ndet, 0.0);
    std::vector<char> active(ndet, 1);

    int frame_base = 0, block = 0;
    while (frame_base < sc.frames) {
      bool any = false;
      for (char a : active) any |= a;
      if (!any) break;

      const int nb = std::min(sc.ls_block_frames, sc.frames - frame_base);
      LargeScaleState ls;
      if (!sc.fixed_channel) {
        // keyed by block only: every power point sees the same channel draws,
        // so curves differ by transmit power alone (common random numbers)
        Rng lr = stream_rng(sc.seed, {kTagLargeScale, uint64_t(block)});
        ls = draw_large_scale(scene.pat, scene.geom, sys.large_scale, lr);
      }
      const std::vector<char> run_det = active;

      std::vector<uint32_t> err_slot(size_t(nb) * ndet, 0);
      std::vector<int32_t> iter_slot(size_t(nb) * ndet, 0);
      std::vector<double> sec_slot(sc.record_wall_time ? size_t(nb) * ndet : 0, 0.0);

#pragma omp parallel for schedule(dynamic)
      for (int f = 0; f < nb; ++f) {
        Rng fr = stream_rng(sc.seed, {kTagFrame, uint64_t(frame_base + f)});
        std::vector<uint8_t> bits(eta);
        for (int i = 0; i < eta; ++i) bits[i] = fr.uniform() < 0.5 ? 0 : 1;
        TransmitFrame frame = map_bits(bits, sys, cc);

        Eigen::MatrixXcd h_eff;
        if (sc.fixed_channel) {
          h_eff = sqrt_delta * (*sc.fixed_channel);
        } else {
          h_eff = sqrt_delta * draw_channel_small_scale(ls, scene.hbar, fr).h;
        }
        Eigen::VectorXcd y = h_eff * frame.x;
        const double nsd = std::sqrt(sys.noise_w);
        for (int j = 0; j < n_rx; ++j) y(j) += nsd * fr.cnormal();

        for (int d = 0; d < ndet; ++d) {
          if (!run_det[d]) continue;
          auto t0 = std::chrono::steady_clock::now();
          DetectionResult res = detect_one(sc.detectors[d], y, h_eff, sys, cc, sc.vamp);
          if (sc.record_wall_time) {
            auto t1 = std::chrono::steady_clock::now();
            sec_slot[size_t(f) * ndet + d] = std::chrono::duration<double>(t1 - t0).count();
          }
          uint32_t e = 0;
          for (int i = 0; i < eta; ++i) e += res.bits[i] != bits[i];
          err_slot[size_t(f) * ndet + d] = e;
          iter_slot[size_t(f) * ndet + d] = res.iters;
        }
      }

      for (int d = 0; d < ndet; ++d) {
        if (!run_det[d]) continue;
        for (int f = 0; f < nb; ++f) {
          errors[d] += err_slot[size_t(f) * ndet + d];
          iters_sum[d] += iter_slot[size_t(f) * ndet + d];
          if (sc.record_wall_time) seconds[d] += sec_slot[size_t(f) * ndet + d];
        }
        frames_done[d] += uint64_t(nb);
        if (sc.stop_errors > 0 && errors[d] >= uint64_t(sc.stop_errors)) active[d] = 0;
      }
      frame_base += nb;
      ++block;
    }

    for (int d = 0; d < ndet; ++d)
      records.push_back(finish_record(sc.power_dbm[pi], detector_name(sc.detectors[d]),
                                      frames_done[d], frames_done[d] * uint64_t(eta), errors[d],
                                      iters_sum[d], sc.record_wall_time ? seconds[d] : 0.0));
  }
  return records;
}

std::vector<BerRecord> run_bound(const SweepConfig& sc) {
  validate_sweep(sc);
  if (sc.fixed_channel)
    throw std::invalid_argument("bound: fixed-channel override is not supported");
  const PasmConfig& base = sc.system;
  auto cc = build_constellation(base);

  UnionBoundOptions opt;
  opt.max_pairs = sc.bound_max_pairs;
  opt.truncate = sc.bound_truncate;
  opt.use_approx = sc.bound_use_approx;
  auto pairs = codeword_pairs(base, cc, opt);

  Scene scene = build_scene(sc);
  const size_t np = sc.power_dbm.size();
  std::vector<double> deltas(np);
  for (size_t pi = 0; pi < np; ++pi) {
    PasmConfig sys = base;
    sys.power_w = dbm_to_watt(sc.power_dbm[pi]);
    deltas[pi] = sys.delta();
  }

  std::vector<double> acc(np, 0.0);
  const bool match = sc.bound_match_sim_blocks;
  const int draws =
      match ? (sc.frames + sc.ls_block_frames - 1) / sc.ls_block_frames : sc.bound_ls_draws;
  for (int b = 0; b < draws; ++b) {
    Rng lr = match ? stream_rng(sc.seed, {kTagLargeScale, uint64_t(b)})
                   : stream_rng(sc.seed, {kTagBoundDraw, uint64_t(b)});
    auto ls = draw_large_scale(scene.pat, scene.geom, base.large_scale, lr);
    auto cm = channel_moments(ls, scene.hbar);
    for (size_t pi = 0; pi < np; ++pi)
      acc[pi] += union_bound_from_pairs(cm, pairs, base, deltas[pi], base.noise_w,
                                        sc.bound_use_approx);
  }

  const std::string name = sc.bound_use_approx ? "bound-chiani" : "bound-exact";
  std::vector<BerRecord> records;
  records.reserve(np);
  for (size_t pi = 0; pi < np; ++pi) {
    BerRecord r;
    r.power_dbm = sc.power_dbm[pi];
    r.detector = name;
    r.frames = uint64_t(draws);
    r.ber = acc[pi] / double(draws);
    records.push_back(r);
  }
  return records;
}

std::vector<BerRecord> run_pssm_baseline(SweepConfig cfg) {
  cfg.pssm_geometry = true;
  return run_sweep(cfg);
}

std::string csv_string(const std::vector<BerRecord>& records) {
  std::string out = "power_dbm,detector,frames,bits,errors,ber,ci95,iters_mean,seconds\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf,
                  "%.10g,%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6e,%.6e,%.4f,%.3f\n",
                  r.power_dbm, r.detector.c_str(), r.frames, r.bits, r.errors, r.ber, r.ci95,
                  r.iters_mean, r.seconds);
    out += buf;
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<BerRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("sweep: cannot open output file: " + path);
  f << csv_string(records);
  if (!f) throw std::runtime_error("sweep: write failed: " + path);
}

// --- config (de)serialization ---

namespace {

using nlohmann::json;

json system_to_json(const PasmConfig& c) {
  const auto& L = c.large_scale;
  return json{{"n_wg", c.n_wg},
              {"n_pa", c.n_pa},
              {"n_rx", c.n_rx},
              {"mod_b", c.mod_b},
              {"mod_p", c.mod_p},
              {"power_w", c.power_w},
              {"noise_w", c.noise_w},
              {"carrier_hz", c.carrier_hz},
              {"eff_index", c.eff_index},
              {"region_m", c.region_m},
              {"feed_height_m", c.feed_height_m},
              {"user_pos", c.user_pos},
              {"rx_spacing_m", c.rx_spacing_m},
              {"large_scale",
               json{{"los_cutoff_m", L.los_cutoff_m},
                    {"k_exp_a", L.k_exp_a},
                    {"k_exp_b", L.k_exp_b},
                    {"pl_los_offset_db", L.pl_los_offset_db},
                    {"pl_los_slope", L.pl_los_slope},
                    {"pl_nlos_offset_db", L.pl_nlos_offset_db},
                    {"pl_nlos_slope", L.pl_nlos_slope},
                    {"shadow_sigma_db", L.shadow_sigma_db},
                    {"shadow_mix", L.shadow_mix},
                    {"decorr_dist_m", L.decorr_dist_m}}}};
}

void system_from_json(const json& j, PasmConfig& c) {
  c.n_wg = j.value("n_wg", c.n_wg);
  c.n_pa = j.value("n_pa", c.n_pa);
  c.n_rx = j.value("n_rx", c.n_rx);
  c.mod_b = j.value("mod_b", c.mod_b);
  c.mod_p = j.value("mod_p", c.mod_p);
  c.power_w = j.value("power_w", c.power_w);
  c.noise_w = j.value("noise_w", c.noise_w);
  c.carrier_hz = j.value("carrier_hz", c.carrier_hz);
  c.eff_index = j.value("eff_index", c.eff_index);
  c.region_m = j.value("region_m", c.region_m);
  c.feed_height_m = j.value("feed_height_m", c.feed_height_m);
  c.user_pos = j.value("user_pos", c.user_pos);
  c.rx_spacing_m = j.value("rx_spacing_m", c.rx_spacing_m);
  if (j.contains("large_scale")) {
    const json& l = j.at("large_scale");
    auto& L = c.large_scale;
    L.los_cutoff_m = l.value("los_cutoff_m", L.los_cutoff_m);
    L.k_exp_a = l.value("k_exp_a", L.k_exp_a);
    L.k_exp_b = l.value("k_exp_b", L.k_exp_b);
    L.pl_los_offset_db = l.value("pl_los_offset_db", L.pl_los_offset_db);
    L.pl_los_slope = l.value("pl_los_slope", L.pl_los_slope);
    L.pl_nlos_offset_db = l.value("pl_nlos_offset_db", L.pl_nlos_offset_db);
    L.pl_nlos_slope = l.value("pl_nlos_slope", L.pl_nlos_slope);
    L.shadow_sigma_db = l.value("shadow_sigma_db", L.shadow_sigma_db);
    L.shadow_mix = l.value("shadow_mix", L.shadow_mix);
    L.decorr_dist_m = l.value("decorr_dist_m", L.decorr_dist_m);
  }
}

json sweep_to_json(const SweepConfig& sc) {
  json j;
  if (!sc.profile.empty()) j["profile"] = sc.profile;
  j["system"] = system_to_json(sc.system);
  j["vamp"] = json{{"max_iters", sc.vamp.max_iters},   {"damping", sc.vamp.damping},
                   {"gamma_min", sc.vamp.gamma_min},   {"gamma_max", sc.vamp.gamma_max},
                   {"tol", sc.vamp.tol},               {"llr_clip", sc.vamp.llr_clip}};
  std::vector<std::string> det;
  for (auto k : sc.detectors) det.push_back(detector_name(k));
  j["detectors"] = det;
  j["power_dbm"] = sc.power_dbm;
  j["frames"] = sc.frames;
  j["seed"] = sc.seed;
  j["ls_block_frames"] = sc.ls_block_frames;
  j["stop_errors"] = sc.stop_errors;
  j["pssm_geometry"] = sc.pssm_geometry;
  j["record_wall_time"] = sc.record_wall_time;
  j["bound_ls_draws"] = sc.bound_ls_draws;
  j["bound_use_approx"] = sc.bound_use_approx;
  j["bound_match_sim_blocks"] = sc.bound_match_sim_blocks;
  j["bound_max_pairs"] = sc.bound_max_pairs;
  j["bound_truncate"] = sc.bound_truncate;
  return j;
}

SweepConfig sweep_from_json(const json& j) {
  SweepConfig sc;
  if (j.contains("profile")) sc = profile_config(j.at("profile").get<std::string>());
  if (j.contains("system")) system_from_json(j.at("system"), sc.system);
  if (j.contains("vamp")) {
    const json& v = j.at("vamp");
    sc.vamp.max_iters = v.value("max_iters", sc.vamp.max_iters);
    sc.vamp.damping = v.value("damping", sc.vamp.damping);
    sc.vamp.gamma_min = v.value("gamma_min", sc.vamp.gamma_min);
    sc.vamp.gamma_max = v.value("gamma_max", sc.vamp.gamma_max);
    sc.vamp.tol = v.value("tol", sc.vamp.tol);
    sc.vamp.llr_clip = v.value("llr_clip", sc.vamp.llr_clip);
  }
  if (j.contains("detectors")) {
    sc.detectors.clear();
    for (const auto& name : j.at("detectors"))
      sc.detectors.push_back(detector_from_name(name.get<std::string>()));
  }
  if (j.contains("power_dbm")) sc.power_dbm = j.at("power_dbm").get<std::vector<double>>();
  sc.frames = j.value("frames", sc.frames);
  sc.seed = j.value("seed", sc.seed);
  sc.ls_block_frames = j.value("ls_block_frames", sc.ls_block_frames);
  sc.stop_errors = j.value("stop_errors", sc.stop_errors);
  sc.pssm_geometry = j.value("pssm_geometry", sc.pssm_geometry);
  sc.record_wall_time = j.value("record_wall_time", sc.record_wall_time);
  sc.bound_ls_draws = j.value("bound_ls_draws", sc.bound_ls_draws);
  sc.bound_use_approx = j.value("bound_use_approx", sc.bound_use_approx);
  sc.bound_match_sim_blocks = j.value("bound_match_sim_blocks", sc.bound_match_sim_blocks);
  sc.bound_max_pairs = j.value("bound_max_pairs", sc.bound_max_pairs);
  sc.bound_truncate = j.value("bound_truncate", sc.bound_truncate);
  return sc;
}

}  // namespace

SweepConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  return sweep_from_json(j);
}

SweepConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("sweep: cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const SweepConfig& cfg) { return sweep_to_json(cfg).dump(2) + "\n"; }

void write_metadata(const std::string& csv_path, const SweepConfig& cfg, double wall_seconds) {
  json j;
  j["csv"] = csv_path;
  j["wall_seconds"] = wall_seconds;
  j["config"] = json::parse(config_to_json(cfg));
  std::ofstream f(csv_path + ".meta.json", std::ios::binary);
  if (!f) throw std::runtime_error("sweep: cannot open metadata file");
  f << j.dump(2) << "\n";
}

std::vector<std::string> profile_names() { return {"fig4", "fig5", "fig6a", "fig6b", "fig9"}; }

SweepConfig profile_config(const std::string& name) {
  SweepConfig sc;
  sc.profile = name;
  auto grid = [](double lo, double hi, double step) {
    std::vector<double> g;
    for (double p = lo; p <= hi + 1e-9; p += step) g.push_back(p);
    return g;
  };
  if (name == "fig4") {
    sc.system.n_wg = 1;
    sc.system.n_pa = 2;
    sc.system.n_rx = 2;
    sc.system.mod_b = 2;  // left open in the source table; smallest APM order
    sc.system.mod_p = 2;
    sc.detectors = {DetectorKind::ml};
    sc.power_dbm = grid(-10, 30, 5);
    sc.frames = 100000;
    sc.bound_match_sim_blocks = true;
  } else if (name == "fig5") {
    sc.system.n_wg = 1;
    sc.system.n_pa = 2;
    sc.system.n_rx = 2;
    sc.system.mod_b = 4;  // from the 4 bits/s/Hz operating point
    sc.system.mod_p = 4;
    sc.detectors = {DetectorKind::ml};
    sc.power_dbm = grid(-20, 55, 5);
    sc.frames = 20000;
  } else if (name == "fig6a" || name == "fig6b") {
    sc.system.n_wg = 1;
    sc.system.n_pa = 4;
    sc.system.n_rx = name == "fig6b" ? 6 : 4;
    sc.system.mod_b = 16;
    sc.system.mod_p = 4;
    sc.detectors = {DetectorKind::ml,       DetectorKind::vamp, DetectorKind::sic_mmse,
                    DetectorKind::sic_zf,   DetectorKind::mmse, DetectorKind::zf};
    sc.power_dbm = grid(0, 40, 5);
    sc.frames = 10000;
  } else if (name == "fig9") {
    sc.system.n_wg = 1;
    sc.system.n_pa = 2;
    sc.system.n_rx = 2;
    sc.system.mod_b = 4;
    sc.system.mod_p = 4;
    sc.detectors = {DetectorKind::ml};
    sc.power_dbm = {10.0};
    sc.frames = 20000;
  } else {
    throw std::invalid_argument("sweep: unknown profile: " + name);
  }
  return sc;
}

std::optional<double> crossing_power_dbm(const std::vector<BerRecord>& records,
                                         const std::string& detector, double target) {
  if (target <= 0.0) throw std::invalid_argument("sweep: crossing target must be positive");
  std::vector<std::pair<double, double>> curve;
  for (const auto& r : records)
    if (r.detector == detector) curve.emplace_back(r.power_dbm, r.ber);
  std::sort(curve.begin(), curve.end());
  const double floor_ber = 1e-12;
  for (size_t i = 1; i < curve.size(); ++i) {
    double b0 = curve[i - 1].second, b1 = curve[i].second;
    if (b0 >= target && b1 <= target) {
      double l0 = std::log(std::max(b0, floor_ber));
      double l1 = std::log(std::max(b1, floor_ber));
      double lt = std::log(target);
      if (l0 == l1) return curve[i - 1].first;
      double f = (lt - l0) / (l1 - l0);
      return curve[i - 1].first + f * (curve[i].first - curve[i - 1].first);
    }
  }
  return std::nullopt;
}

}  // namespace pasm
