// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pasmsim/config.hpp"
#include "pasmsim/modem.hpp"

namespace pasm {

enum class LinearKind { zf, mmse };

struct DetectionResult {
  std::vector<uint8_t> bits;
  std::vector<double> llr_b;  // n_wg * log2(mod_b)
  std::vector<double> llr_p;  // n_wg * (n_pa - 1) * log2(mod_p)
  Eigen::VectorXcd x_est;     // element-domain estimate (posterior mean or slice)
  int iters = 1;
  bool converged = true;
};

// All detectors take the effective channel sqrt(delta)*H; the power split is
// absorbed once at the call site.

// Exhaustive joint search over the per-waveguide composite sets. Refuses
// candidate counts above `guard`. Ties resolve to the lowest label.
DetectionResult ml_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                          const PasmConfig& cfg, const CompositeConstellation& cc,
                          uint64_t guard = uint64_t{1} << 24);

// ZF / MMSE filter followed by per-waveguide composite slicing.
DetectionResult linear_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                              const PasmConfig& cfg, const CompositeConstellation& cc,
                              LinearKind kind);

// Waveguide-ordered successive cancellation (descending column-block norm),
// re-filtering the remaining system after each subtraction.
DetectionResult sic_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                           const PasmConfig& cfg, const CompositeConstellation& cc,
                           LinearKind kind);

// --- message-passing building blocks ---

struct DenoiserOut {
  Eigen::VectorXcd mean;  // posterior mean over the composite set
  double divergence;      // gamma * average per-component posterior variance
};

// MAP-prior denoiser for one waveguide: discrete posterior over the
// composite set under an isotropic Gaussian likelihood of precision gamma.
DenoiserOut denoise_waveguide(const Eigen::Ref<const Eigen::VectorXcd>& r, double gamma,
                              const CompositeConstellation& cc);

// Per-frame LMMSE precomputation: eigenbasis of H^H*H and the matched filter.
struct LmmseCache {
  Eigen::MatrixXcd basis;   // eigenvectors of H^H H
  Eigen::VectorXd evals;    // eigenvalues, ascending
  Eigen::VectorXcd hty;     // H^H y
  double gamma_w = 0.0;     // 1 / noise_w
};
LmmseCache make_lmmse_cache(const Eigen::MatrixXcd& h_eff, const Eigen::VectorXcd& y,
                            double noise_w);

struct LmmseOut {
  Eigen::VectorXcd mean;
  double divergence;  // (gamma2 / n_tx) * trace((gamma_w H^H H + gamma2 I)^-1)
};
LmmseOut lmmse_stage(const Eigen::VectorXcd& r2, double gamma2, const LmmseCache& cache);
LmmseOut lmmse_stage(const Eigen::VectorXcd& r2, double gamma2, const Eigen::MatrixXcd& h_eff,
                     const Eigen::VectorXcd& y, double noise_w);

// Max-log-free exact bit LLRs from the denoiser-side posterior; clipped.
void compute_llrs(const Eigen::VectorXcd& r1, double gamma1, const PasmConfig& cfg,
                  const CompositeConstellation& cc, double clip, std::vector<double>& llr_b,
                  std::vector<double>& llr_p);

struct VampTrace {
  std::vector<double> gamma1, gamma2, alpha1, alpha2;
};

// Two-stage iteration between the composite-prior denoiser and the LMMSE
// stage, with precision clipping, message damping and a relative-change stop.
// Falls back to the MMSE answer if the state leaves the finite range.
DetectionResult vamp_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                            const PasmConfig& cfg, const CompositeConstellation& cc,
                            const VampParams& vp, VampTrace* trace = nullptr);

}  // namespace pasm
