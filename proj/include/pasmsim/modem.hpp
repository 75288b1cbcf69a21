// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pasmsim/config.hpp"

namespace pasm {

// Per-waveguide joint alphabet: one APM symbol replicated over the slots,
// rotated by the per-slot phase alphabet (anchor slot fixed at 1). Point
// index == bit label: [apm bits | slot-2 phase bits | ... | slot-Na bits].
struct CompositeConstellation {
  int n_pa = 0;
  int mod_b = 0;
  int mod_p = 0;
  int bits_b = 0;        // log2(mod_b)
  int bits_p = 0;        // log2(mod_p), per non-anchor slot
  int bits_per_wg = 0;   // bits_b + (n_pa - 1) * bits_p
  Eigen::MatrixXcd points;    // n_pa x size, column l is the point with label l
  std::vector<cplx> apm;      // APM symbol per bit label
  std::vector<cplx> phase;    // shifter value per bit label

  int size() const { return static_cast<int>(points.cols()); }
};

// One mapped channel use.
struct TransmitFrame {
  std::vector<uint8_t> bits;   // eta entries, the frame layout below
  Eigen::VectorXcd baseband;   // one APM symbol per waveguide
  Eigen::VectorXcd shift;      // per-element phase vector, anchors = 1
  Eigen::VectorXcd x;          // element-domain signal, waveguide-major
};

// Frame layout: [APM bits, waveguide-major][phase bits, waveguide-major then
// slot-major]. eta = n_wg*log2(mod_b) + (n_tx - n_wg)*log2(mod_p).
int spectral_efficiency(const PasmConfig& cfg);

inline int int_log2(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}
inline bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }
inline uint32_t gray_encode(uint32_t v) { return v ^ (v >> 1); }
uint32_t gray_decode(uint32_t g);

// Guided-wave phase picked up over feed_dist of propagation.
cplx waveguide_phase(double feed_dist, double lambda_g);

// Gray-labelled unit-mean-power APM set: BPSK for order 2, square QAM else.
std::vector<cplx> apm_constellation(int order);

// Phase alphabet from slot micro-displacements of k*lambda_g/order:
// exp(-j*2*pi*k/order), Gray-labelled over k.
std::vector<cplx> phase_alphabet(int order);

CompositeConstellation build_constellation(const PasmConfig& cfg);

TransmitFrame map_bits(const std::vector<uint8_t>& bits, const PasmConfig& cfg,
                       const CompositeConstellation& cc);

// Nearest composite point (squared Euclidean, lowest label on ties).
int slice_waveguide(const Eigen::Ref<const Eigen::VectorXcd>& v, const CompositeConstellation& cc);

// Hard per-waveguide demap of a linear estimate given as (baseband estimate,
// phase-vector estimate); reconstructs the per-waveguide estimate and slices
// it against the full composite set.
std::vector<uint8_t> demap_hard(const Eigen::VectorXcd& baseband_est, const Eigen::VectorXcd& shift_est,
                                const PasmConfig& cfg, const CompositeConstellation& cc);

// LLR sign slicer; positive LLR decides bit 1.
std::vector<uint8_t> demap_soft(const std::vector<double>& llr_b, const std::vector<double>& llr_p,
                                const PasmConfig& cfg);

// label <-> frame-bit layout helpers
uint32_t waveguide_label(const std::vector<uint8_t>& bits, int wg, const PasmConfig& cfg,
                         const CompositeConstellation& cc);
void store_waveguide_label(uint32_t label, int wg, const PasmConfig& cfg,
                           const CompositeConstellation& cc, std::vector<uint8_t>& bits);

}  // namespace pasm
