// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace pasm {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Distance-driven link statistics: LoS probability, Rician K factor,
// dual-branch log-distance path loss and correlated lognormal shadowing.
struct LargeScaleParams {
  double los_cutoff_m = 300.0;   // LoS probability hits zero here
  double k_exp_a = 1.3;          // K = 10^(a - b*d) on LoS links
  double k_exp_b = 0.003;
  double pl_los_offset_db = -30.18;
  double pl_los_slope = 26.0;    // dB per decade
  double pl_nlos_offset_db = -34.53;
  double pl_nlos_slope = 38.0;
  double shadow_sigma_db = 8.0;
  double shadow_mix = 0.5;       // weight of the transmit-side shadow field
  double decorr_dist_m = 100.0;  // covariance halves every decorr_dist_m
};

// One spatial-multiplexing link: n_wg waveguides (one RF chain each), n_pa
// radiating elements per waveguide, n_rx receive antennas.
struct PasmConfig {
  int n_wg = 1;
  int n_pa = 2;
  int n_rx = 2;
  int mod_b = 4;   // baseband APM order (BPSK or square QAM)
  int mod_p = 4;   // per-element phase alphabet order

  double power_w = 1e-3;   // total transmit power
  double noise_w = 1e-12;  // complex noise variance per receive antenna
  double carrier_hz = 3.0e9;
  double eff_index = 1.4;  // guided wavelength = lambda / eff_index

  // deployment
  double region_m = 500.0;
  double feed_height_m = 12.5;
  std::array<double, 3> user_pos{400.0, 50.0, 1.5};
  double rx_spacing_m = 0.0;  // 0 picks half a wavelength

  LargeScaleParams large_scale;

  int n_tx() const { return n_wg * n_pa; }
  double lambda0() const { return kSpeedOfLight / carrier_hz; }
  double lambda_g() const { return lambda0() / eff_index; }
  // per-element symbol energy: total power split over all radiating elements
  double delta() const { return power_w / (static_cast<double>(n_wg) * n_pa); }

  void validate() const;  // throws std::invalid_argument
};

struct VampParams {
  int max_iters = 50;
  double damping = 0.6;      // on posterior means only
  double gamma_min = 1e-11;
  double gamma_max = 1e11;
  double tol = 1e-4;         // relative change of the denoiser input
  double llr_clip = 50.0;
};

}  // namespace pasm
