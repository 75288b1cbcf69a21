// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "pasmsim/config.hpp"
#include "pasmsim/geometry.hpp"
#include "pasmsim/rng.hpp"

namespace pasm {
class Rng;

// Slowly varying per-link state, redrawn once per coherence block: LoS
// indicators, correlated shadowing, and the derived amplitude/Rician weights.
struct LargeScaleState {
  Eigen::MatrixXd dist;       // n_rx x n_tx link distances
  Eigen::MatrixXi los;        // 1 = LoS link
  Eigen::MatrixXd shadow_db;  // composite shadow field F
  Eigen::MatrixXd amp;        // sqrt(beta)
  Eigen::MatrixXd k_los;      // sqrt(K / (K + 1))
  Eigen::MatrixXd k_nlos;     // sqrt(1 / (K + 1))
};

struct ChannelRealization {
  Eigen::MatrixXcd h;          // composed n_rx x n_tx channel
  Eigen::MatrixXcd h_mean;     // deterministic steering component
  Eigen::MatrixXcd h_diffuse;  // unit-variance scattered draw
  LargeScaleState ls;
};

// First and second moments of vec(H^H) conditioned on the large-scale state.
struct ChannelMoments {
  Eigen::VectorXcd mean;
  Eigen::MatrixXcd cov;
};

double los_probability(double d, const LargeScaleParams& p);
double rician_k(double d, bool los, const LargeScaleParams& p);
double path_loss_db(double d, bool los, double shadow_db, const LargeScaleParams& p);

Eigen::MatrixXd link_distances(const ActivationPattern& pat, const DeploymentGeometry& geom);

// Free-space steering component exp(-j*2*pi*d/lambda) per link.
Eigen::MatrixXcd mean_channel(const ActivationPattern& pat, const DeploymentGeometry& geom,
                              double lambda0);

// Composite shadow field: sqrt(mix)*e_tx + sqrt(1-mix)*b_rx, both fields
// N(0, sigma^2) with covariance sigma^2 * 2^(-d/decorr) over their element
// positions. Sampled through a symmetric square root of the covariance.
Eigen::MatrixXd draw_shadow_field(const ActivationPattern& pat, const DeploymentGeometry& geom,
                                  const LargeScaleParams& p, Rng& rng);

LargeScaleState draw_large_scale(const ActivationPattern& pat, const DeploymentGeometry& geom,
                                 const LargeScaleParams& p, Rng& rng);

// Fresh diffuse draw on top of a fixed large-scale state.
ChannelRealization draw_channel_small_scale(const LargeScaleState& ls,
                                            const Eigen::MatrixXcd& h_mean, Rng& rng);

ChannelRealization draw_channel(const ActivationPattern& pat, const DeploymentGeometry& geom,
                                const LargeScaleParams& p, double lambda0, Rng& rng);

ChannelMoments channel_moments(const LargeScaleState& ls, const Eigen::MatrixXcd& h_mean);

}  // namespace pasm
