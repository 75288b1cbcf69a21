// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/modem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pasm {

int spectral_efficiency(const PasmConfig& cfg) {
  return cfg.n_wg * int_log2(cfg.mod_b) + (cfg.n_tx() - cfg.n_wg) * int_log2(cfg.mod_p);
}

uint32_t gray_decode(uint32_t g) {
  g ^= g >> 16;
  g ^= g >> 8;
  g ^= g >> 4;
  g ^= g >> 2;
  g ^= g >> 1;
  return g;
}

cplx waveguide_phase(double feed_dist, double lambda_g) {
  return std::polar(1.0, -2.0 * std::numbers::pi * feed_dist / lambda_g);
}

std::vector<cplx> apm_constellation(int order) {
  if (order == 2) return {cplx(1, 0), cplx(-1, 0)};
  if (order != 4 && order != 16 && order != 64)
    throw std::invalid_argument("apm_constellation: unsupported order");
  const int bits = int_log2(order);
  const int half = bits / 2;
  const int levels = 1 << half;
  // unit mean power over the square grid
  const double scale = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);
  std::vector<cplx> c(order);
  for (int b = 0; b < order; ++b) {
    const uint32_t bi = static_cast<uint32_t>(b) >> half;
    const uint32_t bq = static_cast<uint32_t>(b) & (levels - 1);
    const double ai = 2.0 * gray_decode(bi) - levels + 1;
    const double aq = 2.0 * gray_decode(bq) - levels + 1;
    c[b] = scale * cplx(ai, aq);
  }
  return c;
}

std::vector<cplx> phase_alphabet(int order) {
  if (!is_pow2(order) || order < 2) throw std::invalid_argument("phase_alphabet: bad order");
  std::vector<cplx> p(order);
  for (int k = 0; k < order; ++k)
    p[gray_encode(k)] = std::polar(1.0, -2.0 * std::numbers::pi * k / order);
  return p;
}

CompositeConstellation build_constellation(const PasmConfig& cfg) {
  cfg.validate();
  CompositeConstellation cc;
  cc.n_pa = cfg.n_pa;
  cc.mod_b = cfg.mod_b;
  cc.mod_p = cfg.mod_p;
  cc.bits_b = int_log2(cfg.mod_b);
  cc.bits_p = int_log2(cfg.mod_p);
  cc.bits_per_wg = cc.bits_b + (cfg.n_pa - 1) * cc.bits_p;
  if (cc.bits_per_wg > 26)
    throw std::invalid_argument("build_constellation: composite set too large");
  cc.apm = apm_constellation(cfg.mod_b);
  cc.phase = phase_alphabet(cfg.mod_p);

  const int size = 1 << cc.bits_per_wg;
  cc.points.resize(cfg.n_pa, size);
  for (int l = 0; l < size; ++l) {
    const uint32_t apm_label = static_cast<uint32_t>(l) >> ((cfg.n_pa - 1) * cc.bits_p);
    const cplx s = cc.apm[apm_label];
    cc.points(0, l) = s;  // anchor slot
    for (int i = 1; i < cfg.n_pa; ++i) {
      const int shift = (cfg.n_pa - 1 - i) * cc.bits_p;
      const uint32_t ph_label = (static_cast<uint32_t>(l) >> shift) & (cfg.mod_p - 1);
      cc.points(i, l) = s * cc.phase[ph_label];
    }
  }
  return cc;
}

namespace {
uint32_t take_bits(const std::vector<uint8_t>& bits, int at, int count) {
  uint32_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | (bits[at + i] & 1);
  return v;
}
void put_bits(uint32_t v, int at, int count, std::vector<uint8_t>& bits) {
  for (int i = 0; i < count; ++i) bits[at + i] = (v >> (count - 1 - i)) & 1;
}
}  // namespace

TransmitFrame map_bits(const std::vector<uint8_t>& bits, const PasmConfig& cfg,
                       const CompositeConstellation& cc) {
  const int eta = spectral_efficiency(cfg);
  if (static_cast<int>(bits.size()) != eta)
    throw std::invalid_argument("map_bits: frame length != spectral efficiency");

  TransmitFrame f;
  f.bits = bits;
  f.baseband.resize(cfg.n_wg);
  f.shift = Eigen::VectorXcd::Ones(cfg.n_tx());
  f.x.resize(cfg.n_tx());

  const int phase_base = cfg.n_wg * cc.bits_b;
  for (int m = 0; m < cfg.n_wg; ++m) {
    f.baseband[m] = cc.apm[take_bits(bits, m * cc.bits_b, cc.bits_b)];
    for (int i = 1; i < cfg.n_pa; ++i) {
      const int at = phase_base + (m * (cfg.n_pa - 1) + (i - 1)) * cc.bits_p;
      f.shift[m * cfg.n_pa + i] = cc.phase[take_bits(bits, at, cc.bits_p)];
    }
    for (int i = 0; i < cfg.n_pa; ++i) {
      const int t = m * cfg.n_pa + i;
      f.x[t] = f.baseband[m] * f.shift[t];
    }
  }
  return f;
}

int slice_waveguide(const Eigen::Ref<const Eigen::VectorXcd>& v, const CompositeConstellation& cc) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int l = 0; l < cc.size(); ++l) {
    const double d = (v - cc.points.col(l)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = l;
    }
  }
  return best;
}

uint32_t waveguide_label(const std::vector<uint8_t>& bits, int wg, const PasmConfig& cfg,
                         const CompositeConstellation& cc) {
  uint32_t label = take_bits(bits, wg * cc.bits_b, cc.bits_b);
  const int phase_base = cfg.n_wg * cc.bits_b;
  for (int i = 1; i < cfg.n_pa; ++i) {
    const int at = phase_base + (wg * (cfg.n_pa - 1) + (i - 1)) * cc.bits_p;
    label = (label << cc.bits_p) | take_bits(bits, at, cc.bits_p);
  }
  return label;
}

void store_waveguide_label(uint32_t label, int wg, const PasmConfig& cfg,
                           const CompositeConstellation& cc, std::vector<uint8_t>& bits) {
  const uint32_t apm_label = label >> ((cfg.n_pa - 1) * cc.bits_p);
  put_bits(apm_label, wg * cc.bits_b, cc.bits_b, bits);
  const int phase_base = cfg.n_wg * cc.bits_b;
  for (int i = 1; i < cfg.n_pa; ++i) {
    const int shift = (cfg.n_pa - 1 - i) * cc.bits_p;
    const uint32_t ph = (label >> shift) & (cfg.mod_p - 1);
    const int at = phase_base + (wg * (cfg.n_pa - 1) + (i - 1)) * cc.bits_p;
    put_bits(ph, at, cc.bits_p, bits);
  }
}

std::vector<uint8_t> demap_hard(const Eigen::VectorXcd& baseband_est,
                                const Eigen::VectorXcd& shift_est, const PasmConfig& cfg,
                                const CompositeConstellation& cc) {
  std::vector<uint8_t> bits(spectral_efficiency(cfg), 0);
  Eigen::VectorXcd v(cfg.n_pa);
  for (int m = 0; m < cfg.n_wg; ++m) {
    for (int i = 0; i < cfg.n_pa; ++i) v[i] = baseband_est[m] * shift_est[m * cfg.n_pa + i];
    store_waveguide_label(slice_waveguide(v, cc), m, cfg, cc, bits);
  }
  return bits;
}

std::vector<uint8_t> demap_soft(const std::vector<double>& llr_b, const std::vector<double>& llr_p,
                                const PasmConfig& cfg) {
  const int eta = spectral_efficiency(cfg);
  const int nb = cfg.n_wg * int_log2(cfg.mod_b);
  if (static_cast<int>(llr_b.size()) != nb || static_cast<int>(llr_p.size()) != eta - nb)
    throw std::invalid_argument("demap_soft: LLR lengths do not match the frame layout");
  std::vector<uint8_t> bits(eta);
  for (int i = 0; i < nb; ++i) bits[i] = llr_b[i] > 0.0 ? 1 : 0;
  for (int i = nb; i < eta; ++i) bits[i] = llr_p[i - nb] > 0.0 ? 1 : 0;
  return bits;
}

}  // namespace pasm
