// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pasm {

namespace {

constexpr double kHardLlr = 50.0;

void fill_hard_llrs(const std::vector<uint8_t>& bits, const PasmConfig& cfg,
                    const CompositeConstellation& cc, DetectionResult& res) {
  const int nb = cfg.n_wg * cc.bits_b;
  res.llr_b.resize(nb);
  res.llr_p.resize(cfg.n_wg * (cfg.n_pa - 1) * cc.bits_p);
  for (int i = 0; i < nb; ++i) res.llr_b[i] = bits[i] ? kHardLlr : -kHardLlr;
  for (size_t i = 0; i < res.llr_p.size(); ++i)
    res.llr_p[i] = bits[nb + i] ? kHardLlr : -kHardLlr;
}

void check_shapes(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                  const PasmConfig& cfg) {
  if (h_eff.rows() != cfg.n_rx || h_eff.cols() != cfg.n_tx())
    throw std::invalid_argument("detect: channel shape mismatch");
  if (y.size() != cfg.n_rx) throw std::invalid_argument("detect: observation shape mismatch");
}

}  // namespace

DetectionResult ml_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                          const PasmConfig& cfg, const CompositeConstellation& cc,
                          uint64_t guard) {
  check_shapes(y, h_eff, cfg);
  const int sz = cc.size(), nw = cfg.n_wg, na = cfg.n_pa;
  uint64_t total = 1;
  for (int m = 0; m < nw; ++m) {
    if (total > guard / uint64_t(sz)) throw std::invalid_argument("detect: ml search too large");
    total *= uint64_t(sz);
  }

  // per-waveguide candidate images through the channel block
  std::vector<Eigen::MatrixXcd> img(nw);
  for (int m = 0; m < nw; ++m) img[m] = h_eff.middleCols(m * na, na) * cc.points;

  std::vector<Eigen::VectorXcd> partial(nw + 1, y);
  std::vector<int> label(nw, 0), best(nw, 0);
  double best_metric = std::numeric_limits<double>::infinity();
  int depth = 0;
  while (depth >= 0) {
    if (label[depth] == sz) {
      label[depth] = 0;
      --depth;
      if (depth >= 0) ++label[depth];
      continue;
    }
    partial[depth + 1] = partial[depth] - img[depth].col(label[depth]);
    if (depth + 1 == nw) {
      double m = partial[nw].squaredNorm();
      if (m < best_metric) {
        best_metric = m;
        best = label;
      }
      ++label[depth];
    } else {
      ++depth;
    }
  }

  DetectionResult res;
  res.bits.resize(spectral_efficiency(cfg));
  res.x_est.resize(cfg.n_tx());
  for (int m = 0; m < nw; ++m) {
    store_waveguide_label(uint32_t(best[m]), m, cfg, cc, res.bits);
    res.x_est.segment(m * na, na) = cc.points.col(best[m]);
  }
  fill_hard_llrs(res.bits, cfg, cc, res);
  return res;
}

DetectionResult linear_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                              const PasmConfig& cfg, const CompositeConstellation& cc,
                              LinearKind kind) {
  check_shapes(y, h_eff, cfg);
  const int n_tx = cfg.n_tx(), na = cfg.n_pa;
  Eigen::MatrixXcd gram = h_eff.adjoint() * h_eff;
  Eigen::VectorXcd rhs = h_eff.adjoint() * y;
  Eigen::VectorXcd xhat;
  if (kind == LinearKind::zf) {
    if (cfg.n_rx < n_tx) throw std::invalid_argument("detect: zf needs n_rx >= n_tx");
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
    if (!lu.isInvertible()) throw std::runtime_error("detect: zf Gram matrix is singular");
    xhat = lu.solve(rhs);
  } else {
    gram.diagonal().array() += cfg.noise_w;
    xhat = gram.ldlt().solve(rhs);
  }

  DetectionResult res;
  res.bits.resize(spectral_efficiency(cfg));
  res.x_est = xhat;
  for (int m = 0; m < cfg.n_wg; ++m) {
    int l = slice_waveguide(xhat.segment(m * na, na), cc);
    store_waveguide_label(uint32_t(l), m, cfg, cc, res.bits);
  }
  fill_hard_llrs(res.bits, cfg, cc, res);
  return res;
}

DetectionResult sic_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                           const PasmConfig& cfg, const CompositeConstellation& cc,
                           LinearKind kind) {
  check_shapes(y, h_eff, cfg);
  const int nw = cfg.n_wg, na = cfg.n_pa;
  if (kind == LinearKind::zf && cfg.n_rx < cfg.n_tx())
    throw std::invalid_argument("detect: zf needs n_rx >= n_tx");

  std::vector<int> order(nw);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(nw);
  for (int m = 0; m < nw; ++m) norms[m] = h_eff.middleCols(m * na, na).squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return norms[a] > norms[b]; });

  DetectionResult res;
  res.bits.resize(spectral_efficiency(cfg));
  res.x_est.resize(cfg.n_tx());
  Eigen::VectorXcd y_res = y;
  for (int step = 0; step < nw; ++step) {
    const int n_rem = nw - step;
    Eigen::MatrixXcd hr(cfg.n_rx, n_rem * na);
    for (int k = 0; k < n_rem; ++k)
      hr.middleCols(k * na, na) = h_eff.middleCols(order[step + k] * na, na);
    Eigen::MatrixXcd gram = hr.adjoint() * hr;
    Eigen::VectorXcd rhs = hr.adjoint() * y_res;
    Eigen::VectorXcd xr;
    if (kind == LinearKind::zf) {
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
      if (!lu.isInvertible()) throw std::runtime_error("detect: zf Gram matrix is singular");
      xr = lu.solve(rhs);
    } else {
      gram.diagonal().array() += cfg.noise_w;
      xr = gram.ldlt().solve(rhs);
    }
    int wg = order[step];
    int l = slice_waveguide(xr.segment(0, na), cc);
    store_waveguide_label(uint32_t(l), wg, cfg, cc, res.bits);
    res.x_est.segment(wg * na, na) = cc.points.col(l);
    y_res -= h_eff.middleCols(wg * na, na) * cc.points.col(l);
  }
  fill_hard_llrs(res.bits, cfg, cc, res);
  return res;
}

DenoiserOut denoise_waveguide(const Eigen::Ref<const Eigen::VectorXcd>& r, double gamma,
                              const CompositeConstellation& cc) {
  const int na = cc.n_pa, sz = cc.size();
  if (r.size() != na) throw std::invalid_argument("detect: denoiser input shape mismatch");
  Eigen::VectorXd dist(sz);
  for (int l = 0; l < sz; ++l) dist(l) = (r - cc.points.col(l)).squaredNorm();
  int nearest = 0;
  double dmin = dist.minCoeff(&nearest);

  DenoiserOut out;
  if (!std::isfinite(gamma) || !std::isfinite(dmin)) {
    out.mean = cc.points.col(nearest);
    out.divergence = 0.0;
    return out;
  }
  double wsum = 0;
  Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(na);
  Eigen::VectorXd second = Eigen::VectorXd::Zero(na);
  for (int l = 0; l < sz; ++l) {
    double w = std::exp(-gamma * (dist(l) - dmin));
    wsum += w;
    mean += w * cc.points.col(l);
    second += w * cc.points.col(l).cwiseAbs2();
  }
  mean /= wsum;
  second /= wsum;
  double var = (second - mean.cwiseAbs2()).cwiseMax(0.0).sum();
  out.mean = std::move(mean);
  out.divergence = gamma * var / na;
  return out;
}

LmmseCache make_lmmse_cache(const Eigen::MatrixXcd& h_eff, const Eigen::VectorXcd& y,
                            double noise_w) {
  if (noise_w <= 0.0) throw std::invalid_argument("detect: noise variance must be positive");
  LmmseCache c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_eff.adjoint() * h_eff);
  if (es.info() != Eigen::Success) throw std::runtime_error("detect: eigensolver failed");
  c.basis = es.eigenvectors();
  c.evals = es.eigenvalues().cwiseMax(0.0);
  c.hty = h_eff.adjoint() * y;
  c.gamma_w = 1.0 / noise_w;
  return c;
}

LmmseOut lmmse_stage(const Eigen::VectorXcd& r2, double gamma2, const LmmseCache& cache) {
  const int n = static_cast<int>(cache.evals.size());
  Eigen::VectorXd denom = (cache.gamma_w * cache.evals).array() + gamma2;
  Eigen::VectorXcd w = cache.basis.adjoint() * (cache.gamma_w * cache.hty + gamma2 * r2);
  w.array() /= denom.array().cast<cplx>();
  LmmseOut out;
  out.mean = cache.basis * w;
  out.divergence = gamma2 * denom.cwiseInverse().sum() / n;
  return out;
}

LmmseOut lmmse_stage(const Eigen::VectorXcd& r2, double gamma2, const Eigen::MatrixXcd& h_eff,
                     const Eigen::VectorXcd& y, double noise_w) {
  return lmmse_stage(r2, gamma2, make_lmmse_cache(h_eff, y, noise_w));
}

void compute_llrs(const Eigen::VectorXcd& r1, double gamma1, const PasmConfig& cfg,
                  const CompositeConstellation& cc, double clip, std::vector<double>& llr_b,
                  std::vector<double>& llr_p) {
  const int na = cc.n_pa, sz = cc.size(), bits = cc.bits_per_wg;
  llr_b.assign(cfg.n_wg * cc.bits_b, 0.0);
  llr_p.assign(cfg.n_wg * (na - 1) * cc.bits_p, 0.0);
  Eigen::VectorXd logw(sz);
  for (int m = 0; m < cfg.n_wg; ++m) {
    auto r = r1.segment(m * na, na);
    double mx = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < sz; ++l) {
      logw(l) = -gamma1 * (r - cc.points.col(l)).squaredNorm();
      mx = std::max(mx, logw(l));
    }
    for (int p = 0; p < bits; ++p) {
      double s1 = 0, s0 = 0;
      for (int l = 0; l < sz; ++l) {
        double w = std::exp(logw(l) - mx);
        if ((l >> (bits - 1 - p)) & 1)
          s1 += w;
        else
          s0 += w;
      }
      double v = std::clamp(std::log(s1) - std::log(s0), -clip, clip);
      if (p < cc.bits_b)
        llr_b[m * cc.bits_b + p] = v;
      else
        llr_p[m * (na - 1) * cc.bits_p + (p - cc.bits_b)] = v;
    }
  }
}

namespace {

// Extrinsic message towards the other stage: exact mean with the raw
// precision, clipped precision for the report. Degenerate confidences pass
// the posterior mean through directly.
struct Extrinsic {
  Eigen::VectorXcd r;
  double gamma;
};

Extrinsic extrinsic_message(const Eigen::VectorXcd& xhat, const Eigen::VectorXcd& r_in,
                            double gamma_in, double alpha, const VampParams& vp) {
  Extrinsic out;
  double eta = alpha > 0.0 ? gamma_in / alpha : std::numeric_limits<double>::infinity();
  if (!std::isfinite(eta)) {
    // stage output is numerically a point mass
    out.r = xhat;
    out.gamma = vp.gamma_max;
    return out;
  }
  double den = eta - gamma_in;
  if (!(den > 0.0)) {
    // stage added no information beyond its input
    out.r = xhat;
    out.gamma = vp.gamma_min;
    return out;
  }
  out.r = (eta * xhat - gamma_in * r_in) / den;
  out.gamma = std::clamp(den, vp.gamma_min, vp.gamma_max);
  return out;
}

bool finite(const Eigen::VectorXcd& v) { return v.allFinite(); }

}  // namespace

DetectionResult vamp_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_eff,
                            const PasmConfig& cfg, const CompositeConstellation& cc,
                            const VampParams& vp, VampTrace* trace) {
  check_shapes(y, h_eff, cfg);
  const int n_tx = cfg.n_tx(), na = cfg.n_pa, nw = cfg.n_wg;
  LmmseCache cache = make_lmmse_cache(h_eff, y, cfg.noise_w);

  // Start on the LMMSE side under the unit-energy prior so the first pass
  // reproduces the plain MMSE solution; the constellation denoiser then
  // refines from that state instead of from an unregularized inverse.
  // Damping acts on the exchanged messages, never on the posterior means
  // inside an extrinsic computation: dividing a damped mean by 1 - alpha
  // amplifies the damping perturbation without bound as alpha approaches 1.
  Eigen::VectorXcd r1 = Eigen::VectorXcd::Zero(n_tx), r2 = Eigen::VectorXcd::Zero(n_tx);
  double g1 = 1.0, g2 = 1.0;
  Eigen::VectorXcd x1 = Eigen::VectorXcd::Zero(n_tx);

  auto damp_message = [&](int k, const Extrinsic& e, Eigen::VectorXcd& r, double& g) {
    if (k == 0) {
      r = e.r;
      g = e.gamma;
    } else {
      r = vp.damping * e.r + (1.0 - vp.damping) * r;
      g = std::exp(vp.damping * std::log(e.gamma) + (1.0 - vp.damping) * std::log(g));
    }
    g = std::clamp(g, vp.gamma_min, vp.gamma_max);
  };

  DetectionResult res;
  res.converged = false;
  int iters = 0;
  for (int k = 0; k < vp.max_iters; ++k) {
    iters = k + 1;

    auto o2 = lmmse_stage(r2, g2, cache);
    double alpha2 = o2.divergence;
    auto e2 = extrinsic_message(o2.mean, r2, g2, alpha2, vp);

    Eigen::VectorXcd prev_r1 = r1;
    damp_message(k, e2, r1, g1);

    Eigen::VectorXcd x1_new(n_tx);
    double alpha1 = 0;
    for (int m = 0; m < nw; ++m) {
      auto o = denoise_waveguide(r1.segment(m * na, na), g1, cc);
      x1_new.segment(m * na, na) = o.mean;
      alpha1 += o.divergence;
    }
    alpha1 = std::clamp(alpha1 / nw, 0.0, 1.0);
    x1 = std::move(x1_new);

    auto e1 = extrinsic_message(x1, r1, g1, alpha1, vp);

    if (trace) {
      trace->gamma1.push_back(g1);
      trace->gamma2.push_back(g2);
      trace->alpha1.push_back(alpha1);
      trace->alpha2.push_back(alpha2);
    }

    if (!finite(x1) || !finite(r1) || !finite(e1.r) ||
        !std::isfinite(g1) || !std::isfinite(e1.gamma)) {
      auto fb = linear_detect(y, h_eff, cfg, cc, LinearKind::mmse);
      fb.iters = iters;
      fb.converged = false;
      return fb;
    }

    damp_message(k, e1, r2, g2);

    double rel = (r1 - prev_r1).norm() / std::max(r1.norm(), 1e-300);
    if (k > 0 && rel < vp.tol) {
      res.converged = true;
      break;
    }
  }

  res.iters = iters;
  res.x_est = x1;
  compute_llrs(r1, g1, cfg, cc, vp.llr_clip, res.llr_b, res.llr_p);
  res.bits = demap_soft(res.llr_b, res.llr_p, cfg);
  return res;
}

}  // namespace pasm
