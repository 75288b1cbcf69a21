// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pasmsim/config.hpp"

namespace pasm {

// Waveguide feed points and the receive array for one square service region.
struct DeploymentGeometry {
  double region_m = 0.0;
  double feed_height_m = 0.0;
  std::vector<Eigen::Vector3d> feeds;  // one per waveguide, on the x = 0 edge
  std::vector<Eigen::Vector3d> rx;     // receive ULA element positions
  Eigen::Vector3d user;                // receive array center
};

// Activated element placement, waveguide-major. Slot 0 of each waveguide is
// the anchor (zero-phase reference); the rest trail at half-wavelength pitch.
struct ActivationPattern {
  int n_wg = 0;
  int n_pa = 0;
  std::vector<Eigen::Vector3d> pos;
  std::vector<double> feed_dist;  // along-guide distance from the feed
  bool clipped = false;           // slot run hit the far end and was shifted back
  bool fixed_array = false;       // conventional-array baseline, no guided feed

  const Eigen::Vector3d& at(int wg, int i) const { return pos[static_cast<size_t>(wg) * n_pa + i]; }
  double dist(int wg, int i) const { return feed_dist[static_cast<size_t>(wg) * n_pa + i]; }
};

// Feeds on the x = 0 edge (single waveguide on the region edge lane y = 0,
// several waveguides on equidistant partition-center lanes), receive ULA
// along x centered on the user position.
DeploymentGeometry build_deployment(const PasmConfig& cfg);

// Anchor slot = candidate grid point (half-wavelength pitch along the guide)
// closest to the user; equivalently the largest-mean-gain candidate, since
// path gain is monotone decreasing in distance.
ActivationPattern select_activation(const DeploymentGeometry& geom, const Eigen::Vector3d& user,
                                    const PasmConfig& cfg);

// Baseline: fixed half-wavelength ULA at the region center at feed height,
// driven by ideal phase shifters instead of guided-wave placement.
ActivationPattern fixed_array_pattern(const DeploymentGeometry& geom, const PasmConfig& cfg);

}  // namespace pasm
