// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pasm {

double los_probability(double dist_m, const LargeScaleParams& p) {
  if (dist_m <= 0.0) throw std::invalid_argument("channel: distance must be positive");
  if (dist_m >= p.los_cutoff_m) return 0.0;
  return 1.0 - dist_m / p.los_cutoff_m;
}

double rician_k(double dist_m, bool los, const LargeScaleParams& p) {
  if (dist_m <= 0.0) throw std::invalid_argument("channel: distance must be positive");
  if (!los) return 0.0;
  return std::pow(10.0, p.k_exp_a - p.k_exp_b * dist_m);
}

double path_loss_db(double dist_m, bool los, double shadow_db, const LargeScaleParams& p) {
  if (dist_m <= 0.0) throw std::invalid_argument("channel: distance must be positive");
  double l = std::log10(dist_m);
  if (los) return p.pl_los_offset_db - p.pl_los_slope * l + shadow_db;
  return p.pl_nlos_offset_db - p.pl_nlos_slope * l + shadow_db;
}

Eigen::MatrixXd link_distances(const ActivationPattern& pat, const DeploymentGeometry& geom) {
  const int n_rx = static_cast<int>(geom.rx.size());
  const int n_tx = static_cast<int>(pat.pos.size());
  Eigen::MatrixXd d(n_rx, n_tx);
  for (int t = 0; t < n_tx; ++t)
    for (int j = 0; j < n_rx; ++j) d(j, t) = (pat.pos[t] - geom.rx[j]).norm();
  return d;
}

Eigen::MatrixXcd mean_channel(const ActivationPattern& pat, const DeploymentGeometry& geom,
                              double lambda_m) {
  if (lambda_m <= 0.0) throw std::invalid_argument("channel: wavelength must be positive");
  Eigen::MatrixXd d = link_distances(pat, geom);
  Eigen::MatrixXcd h(d.rows(), d.cols());
  for (int t = 0; t < d.cols(); ++t)
    for (int j = 0; j < d.rows(); ++j)
      h(j, t) = std::polar(1.0, -2.0 * std::numbers::pi * d(j, t) / lambda_m);
  return h;
}

namespace {

// Symmetric square root with one jitter retry for near-singular inputs.
Eigen::MatrixXd sym_sqrt(Eigen::MatrixXd c, double scale) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() > -1e-8 * scale) {
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }
    c.diagonal().array() += 1e-10 * scale;
  }
  throw std::runtime_error("channel: shadow covariance is not positive semidefinite");
}

Eigen::MatrixXd correlated_gaussian_sqrt(const std::vector<Eigen::Vector3d>& pts,
                                         const LargeScaleParams& p) {
  const int n = static_cast<int>(pts.size());
  const double s2 = p.shadow_sigma_db * p.shadow_sigma_db;
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double d = (pts[i] - pts[j]).norm();
      c(i, j) = c(j, i) = s2 * std::exp2(-d / p.decorr_dist_m);
    }
  return sym_sqrt(std::move(c), s2);
}

}  // namespace

Eigen::MatrixXd draw_shadow_field(const ActivationPattern& pat, const DeploymentGeometry& geom,
                                  const LargeScaleParams& p, Rng& rng) {
  const int n_tx = static_cast<int>(pat.pos.size());
  const int n_rx = static_cast<int>(geom.rx.size());
  Eigen::MatrixXd se = correlated_gaussian_sqrt(pat.pos, p);
  Eigen::MatrixXd sb = correlated_gaussian_sqrt(geom.rx, p);
  Eigen::VectorXd ze(n_tx), zb(n_rx);
  for (int i = 0; i < n_tx; ++i) ze(i) = rng.normal();
  for (int j = 0; j < n_rx; ++j) zb(j) = rng.normal();
  Eigen::VectorXd e = se * ze;
  Eigen::VectorXd b = sb * zb;
  const double we = std::sqrt(p.shadow_mix);
  const double wb = std::sqrt(1.0 - p.shadow_mix);
  Eigen::MatrixXd f(n_rx, n_tx);
  for (int t = 0; t < n_tx; ++t)
    for (int j = 0; j < n_rx; ++j) f(j, t) = we * e(t) + wb * b(j);
  return f;
}

LargeScaleState draw_large_scale(const ActivationPattern& pat, const DeploymentGeometry& geom,
                                 const LargeScaleParams& p, Rng& rng) {
  LargeScaleState ls;
  ls.dist = link_distances(pat, geom);
  ls.shadow_db = draw_shadow_field(pat, geom, p, rng);
  const int n_rx = static_cast<int>(ls.dist.rows());
  const int n_tx = static_cast<int>(ls.dist.cols());
  ls.los.resize(n_rx, n_tx);
  ls.amp.resize(n_rx, n_tx);
  ls.k_los.resize(n_rx, n_tx);
  ls.k_nlos.resize(n_rx, n_tx);
  for (int t = 0; t < n_tx; ++t)
    for (int j = 0; j < n_rx; ++j) {
      double d = ls.dist(j, t);
      bool los = rng.uniform() < los_probability(d, p);
      ls.los(j, t) = los ? 1 : 0;
      double k = rician_k(d, los, p);
      ls.k_los(j, t) = std::sqrt(k / (k + 1.0));
      ls.k_nlos(j, t) = std::sqrt(1.0 / (k + 1.0));
      ls.amp(j, t) = std::sqrt(db_to_linear(path_loss_db(d, los, ls.shadow_db(j, t), p)));
    }
  return ls;
}

ChannelRealization draw_channel_small_scale(const LargeScaleState& ls,
                                            const Eigen::MatrixXcd& h_mean, Rng& rng) {
  const int n_rx = static_cast<int>(ls.dist.rows());
  const int n_tx = static_cast<int>(ls.dist.cols());
  if (h_mean.rows() != n_rx || h_mean.cols() != n_tx)
    throw std::invalid_argument("channel: mean matrix shape mismatch");
  ChannelRealization out;
  out.ls = ls;
  out.h_mean = h_mean;
  out.h_diffuse.resize(n_rx, n_tx);
  for (int t = 0; t < n_tx; ++t)
    for (int j = 0; j < n_rx; ++j) out.h_diffuse(j, t) = rng.cnormal();
  out.h = ls.amp.cast<std::complex<double>>().cwiseProduct(
      ls.k_los.cast<std::complex<double>>().cwiseProduct(h_mean) +
      ls.k_nlos.cast<std::complex<double>>().cwiseProduct(out.h_diffuse));
  return out;
}

ChannelRealization draw_channel(const ActivationPattern& pat, const DeploymentGeometry& geom,
                                const PasmConfig& cfg, Rng& rng) {
  auto hbar = mean_channel(pat, geom, cfg.lambda0());
  auto ls = draw_large_scale(pat, geom, cfg.large_scale, rng);
  return draw_channel_small_scale(ls, hbar, rng);
}

ChannelMoments channel_moments(const LargeScaleState& ls, const Eigen::MatrixXcd& h_mean) {
  const int n_rx = static_cast<int>(ls.dist.rows());
  const int n_tx = static_cast<int>(ls.dist.cols());
  if (h_mean.rows() != n_rx || h_mean.cols() != n_tx)
    throw std::invalid_argument("channel: mean matrix shape mismatch");
  const int n = n_rx * n_tx;
  ChannelMoments cm;
  cm.mean.resize(n);
  cm.cov = Eigen::MatrixXcd::Zero(n, n);
  // stacked columns of the adjoint: index j*n_tx + t holds conj(H(j,t))
  for (int j = 0; j < n_rx; ++j)
    for (int t = 0; t < n_tx; ++t) {
      int i = j * n_tx + t;
      cm.mean(i) = std::conj(ls.amp(j, t) * ls.k_los(j, t) * h_mean(j, t));
      double s = ls.amp(j, t) * ls.k_nlos(j, t);
      cm.cov(i, i) = s * s;
    }
  return cm;
}

}  // namespace pasm
