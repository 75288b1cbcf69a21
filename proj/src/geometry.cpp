// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pasm {

DeploymentGeometry build_deployment(const PasmConfig& cfg) {
  cfg.validate();
  const double side = cfg.region_m;

  DeploymentGeometry g;
  g.region_m = side;
  g.feed_height_m = cfg.feed_height_m;
  g.user = {cfg.user_pos[0], cfg.user_pos[1], cfg.user_pos[2]};
  if (g.user.x() < 0.0 || g.user.x() > side || g.user.y() < 0.0 || g.user.y() > side)
    throw std::invalid_argument("deployment: user outside the service region");

  g.feeds.reserve(cfg.n_wg);
  for (int m = 0; m < cfg.n_wg; ++m) {
    // single guide runs along the region edge through the origin; several
    // guides sit on the partition-center lanes of an even split in y
    const double y = cfg.n_wg == 1 ? 0.0 : side * (2 * m + 1) / (2.0 * cfg.n_wg);
    g.feeds.emplace_back(0.0, y, cfg.feed_height_m);
  }

  const double spacing = cfg.rx_spacing_m > 0.0 ? cfg.rx_spacing_m : cfg.lambda0() / 2;
  if ((cfg.n_rx - 1) * spacing > side)
    throw std::invalid_argument("deployment: receive array wider than the region");
  g.rx.reserve(cfg.n_rx);
  for (int j = 0; j < cfg.n_rx; ++j) {
    const double x = g.user.x() + (j - (cfg.n_rx - 1) / 2.0) * spacing;
    g.rx.emplace_back(x, g.user.y(), g.user.z());
  }
  return g;
}

ActivationPattern select_activation(const DeploymentGeometry& geom, const Eigen::Vector3d& user,
                                    const PasmConfig& cfg) {
  if (user.x() < 0.0 || user.x() > geom.region_m || user.y() < 0.0 || user.y() > geom.region_m)
    throw std::invalid_argument("activation: user outside the service region");

  ActivationPattern pat;
  pat.n_wg = cfg.n_wg;
  pat.n_pa = cfg.n_pa;
  pat.pos.reserve(static_cast<size_t>(cfg.n_wg) * cfg.n_pa);
  pat.feed_dist.reserve(pat.pos.capacity());

  const double pitch = cfg.lambda0() / 2;
  const double span = geom.region_m;
  const auto n_cand = static_cast<long>(std::floor(span / pitch));
  const double run = (cfg.n_pa - 1) * pitch;
  if (run > span) throw std::invalid_argument("activation: slot run longer than the waveguide");

  for (int m = 0; m < cfg.n_wg; ++m) {
    const Eigen::Vector3d& feed = geom.feeds[m];
    // largest path gain == smallest distance, so scan for the distance argmin
    double best_d = std::numeric_limits<double>::infinity();
    double best_x = 0.0;
    for (long k = 0; k <= n_cand; ++k) {
      const double x = k * pitch;
      const double d = (Eigen::Vector3d(x, feed.y(), feed.z()) - user).norm();
      if (d < best_d) {
        best_d = d;
        best_x = x;
      }
    }
    double anchor_x = best_x;
    if (anchor_x + run > span) {
      anchor_x = span - run;  // keep the whole slot run on the guide
      pat.clipped = true;
    }
    for (int i = 0; i < cfg.n_pa; ++i) {
      const double x = anchor_x + i * pitch;
      pat.pos.emplace_back(x, feed.y(), feed.z());
      pat.feed_dist.push_back(x);
    }
  }
  return pat;
}

ActivationPattern fixed_array_pattern(const DeploymentGeometry& geom, const PasmConfig& cfg) {
  ActivationPattern pat;
  pat.n_wg = cfg.n_wg;
  pat.n_pa = cfg.n_pa;
  pat.fixed_array = true;
  const int n_tx = cfg.n_tx();
  const double pitch = cfg.lambda0() / 2;
  const double cx = geom.region_m / 2;
  pat.pos.reserve(n_tx);
  pat.feed_dist.assign(n_tx, 0.0);
  for (int t = 0; t < n_tx; ++t) {
    const double x = cx + (t - (n_tx - 1) / 2.0) * pitch;
    pat.pos.emplace_back(x, geom.region_m / 2, geom.feed_height_m);
  }
  return pat;
}

}  // namespace pasm
