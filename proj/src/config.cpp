// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/config.hpp"

#include <stdexcept>
#include <string>

namespace pasm {

namespace {
bool pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }
}

void PasmConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (n_wg < 1) fail("need at least one waveguide");
  if (n_pa < 1) fail("need at least one element per waveguide");
  if (n_rx < 1) fail("need at least one receive antenna");
  if (mod_b != 2 && mod_b != 4 && mod_b != 16 && mod_b != 64)
    fail("baseband order must be 2 (BPSK) or square QAM 4/16/64");
  if (!pow2(mod_p) || mod_p < 2) fail("phase alphabet order must be a power of two >= 2");
  if (!(power_w > 0.0)) fail("transmit power must be positive");
  if (!(noise_w > 0.0)) fail("noise power must be positive");
  if (!(carrier_hz > 0.0)) fail("carrier frequency must be positive");
  if (!(eff_index >= 1.0)) fail("effective index must be >= 1");
  if (!(region_m > 0.0)) fail("region size must be positive");
  if (!(feed_height_m > 0.0)) fail("feed height must be positive");
  if (rx_spacing_m < 0.0) fail("receive spacing must be nonnegative");
  if (!(large_scale.los_cutoff_m > 0.0)) fail("LoS cutoff must be positive");
  if (!(large_scale.decorr_dist_m > 0.0)) fail("decorrelation distance must be positive");
  if (large_scale.shadow_mix < 0.0 || large_scale.shadow_mix > 1.0)
    fail("shadow mix must lie in [0, 1]");
}

}  // namespace pasm
