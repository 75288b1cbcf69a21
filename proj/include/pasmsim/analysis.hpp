// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pasmsim/channel.hpp"
#include "pasmsim/config.hpp"
#include "pasmsim/modem.hpp"

namespace pasm {

// Nodes/weights for integrating over [a, b].
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
Quadrature gauss_legendre(int order, double a, double b);

double q_func(double x);    // Gaussian tail
double q_chiani(double x);  // two-exponential tail approximation

// Permutation with K * vec(A) = vec(A^T) for A of shape rows x cols.
Eigen::MatrixXd commutation_matrix(int rows, int cols);

// MGF of the Hermitian quadratic form u^H Q u, u ~ CN(mean, cov), at real
// a <= 0: exp(a * mean^H Q (I - a cov Q)^-1 mean) / det(I - a cov Q).
double mgf_quadratic(const Eigen::VectorXcd& mean, const Eigen::MatrixXcd& cov,
                     const Eigen::MatrixXcd& q, double a);

// Pairwise error probability of confusing two codewords separated by psi,
// averaged over the conditioned channel distribution.
double pep_exact(const ChannelMoments& cm, const Eigen::VectorXcd& psi, double delta,
                 double noise_w, int quad_order = 64);
double pep_approx(const ChannelMoments& cm, const Eigen::VectorXcd& psi, double delta,
                  double noise_w);

struct UnionBoundOptions {
  uint64_t max_pairs = uint64_t{1} << 14;
  bool truncate = false;   // keep the smallest-distance pairs up to max_pairs
  bool use_approx = false; // two-exponential tail instead of the quadrature
  int quad_order = 64;
};

struct UnionBoundResult {
  double ber = 0.0;
  uint64_t pairs_used = 0;
  bool truncated = false;
};

// One unordered codeword pair: element-domain difference and Hamming weight
// of the differing message bits.
struct PairTerm {
  Eigen::VectorXcd psi;
  int nbits = 0;
};

// Enumerates (optionally the closest-by-norm subset of) all codeword pairs.
// The list depends only on the constellation, so callers averaging over many
// channel states build it once.
std::vector<PairTerm> codeword_pairs(const PasmConfig& cfg, const CompositeConstellation& cc,
                                     const UnionBoundOptions& opt = {}, bool* truncated = nullptr);

double union_bound_from_pairs(const ChannelMoments& cm, const std::vector<PairTerm>& pairs,
                              const PasmConfig& cfg, double delta, double noise_w,
                              bool use_approx, int quad_order = 64);

// Bit-weighted union bound over all codeword pairs of the full frame
// alphabet, conditioned on one large-scale state.
UnionBoundResult union_bound_ber(const ChannelMoments& cm, const PasmConfig& cfg,
                                 const CompositeConstellation& cc,
                                 const UnionBoundOptions& opt = {});

// Documented operation-count model (see analysis.cpp for the constants).
struct FlopEstimate {
  double ml = 0.0;
  double vamp_per_iter = 0.0;
  double vamp = 0.0;
  double mmse = 0.0;
};
FlopEstimate flop_estimate(const PasmConfig& cfg, int vamp_iters);

}  // namespace pasm
