// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "pasmsim/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pasm {

Quadrature gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("analysis: quadrature order must be positive");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix for Legendre
  // polynomials gives nodes and first-component weights on [-1, 1].
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    double off = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success) throw std::runtime_error("analysis: quadrature solver failed");
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    q.nodes(i) = mid + half * es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    q.weights(i) = 2.0 * v0 * v0 * half;
  }
  return q;
}

double q_func(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_chiani(double x) {
  return std::exp(-0.5 * x * x) / 12.0 + std::exp(-2.0 * x * x / 3.0) / 4.0;
}

Eigen::MatrixXd commutation_matrix(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("analysis: bad commutation shape");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(rows * cols, rows * cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) k(i * cols + j, j * rows + i) = 1.0;
  return k;
}

double mgf_quadratic(const Eigen::VectorXcd& mean, const Eigen::MatrixXcd& cov,
                     const Eigen::MatrixXcd& q, double a) {
  const int n = static_cast<int>(mean.size());
  if (cov.rows() != n || cov.cols() != n || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("analysis: mgf shape mismatch");
  if (a > 0.0) throw std::invalid_argument("analysis: mgf evaluated on the right half-line");
  if (a == 0.0) return 1.0;
  Eigen::MatrixXcd sys = Eigen::MatrixXcd::Identity(n, n) - a * (cov * q);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
  Eigen::VectorXcd x = lu.solve(mean);
  double quad = (mean.adjoint() * (q * x))(0).real();
  return std::exp(a * quad - logdet);
}

namespace {

// Weighting of the stacked-adjoint channel vector by one codeword
// difference: block-diagonal replication of psi*psi^H per receive antenna.
Eigen::MatrixXcd pair_weight(const Eigen::VectorXcd& psi, int n_rx) {
  const int n_tx = static_cast<int>(psi.size());
  Eigen::MatrixXcd outer = psi * psi.adjoint();
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n_rx * n_tx, n_rx * n_tx);
  for (int j = 0; j < n_rx; ++j) q.block(j * n_tx, j * n_tx, n_tx, n_tx) = outer;
  return q;
}

}  // namespace

double pep_exact(const ChannelMoments& cm, const Eigen::VectorXcd& psi, double delta,
                 double noise_w, int quad_order) {
  const int n_tx = static_cast<int>(psi.size());
  const int n_rx = static_cast<int>(cm.mean.size()) / n_tx;
  Eigen::MatrixXcd q = pair_weight(psi, n_rx);
  auto quad = gauss_legendre(quad_order, 0.0, std::numbers::pi / 2);
  double acc = 0.0;
  for (int i = 0; i < quad_order; ++i) {
    double s = std::sin(quad.nodes(i));
    acc += quad.weights(i) * mgf_quadratic(cm.mean, cm.cov, q, -delta / (4.0 * noise_w * s * s));
  }
  return acc / std::numbers::pi;
}

double pep_approx(const ChannelMoments& cm, const Eigen::VectorXcd& psi, double delta,
                  double noise_w) {
  const int n_tx = static_cast<int>(psi.size());
  const int n_rx = static_cast<int>(cm.mean.size()) / n_tx;
  Eigen::MatrixXcd q = pair_weight(psi, n_rx);
  return mgf_quadratic(cm.mean, cm.cov, q, -delta / (4.0 * noise_w)) / 12.0 +
         mgf_quadratic(cm.mean, cm.cov, q, -delta / (3.0 * noise_w)) / 4.0;
}

std::vector<PairTerm> codeword_pairs(const PasmConfig& cfg, const CompositeConstellation& cc,
                                     const UnionBoundOptions& opt, bool* truncated) {
  const int eta = spectral_efficiency(cfg);
  if (eta > 26) throw std::invalid_argument("analysis: frame alphabet too large");
  const uint64_t nw = uint64_t{1} << eta;
  const uint64_t total = nw * (nw - 1) / 2;
  if (truncated) *truncated = false;
  if (total > opt.max_pairs) {
    if (!opt.truncate)
      throw std::invalid_argument("analysis: pair count exceeds the budget; enable truncation");
    if (total > (uint64_t{1} << 21))
      throw std::invalid_argument("analysis: pair count too large even for truncation");
  }

  std::vector<Eigen::VectorXcd> words(nw);
  std::vector<uint8_t> bits(eta);
  for (uint64_t w = 0; w < nw; ++w) {
    for (int i = 0; i < eta; ++i) bits[i] = (w >> (eta - 1 - i)) & 1;
    words[w] = map_bits(bits, cfg, cc).x;
  }

  std::vector<PairTerm> out;
  if (total <= opt.max_pairs) {
    out.reserve(total);
    for (uint64_t i = 0; i < nw; ++i)
      for (uint64_t j = i + 1; j < nw; ++j)
        out.push_back({words[i] - words[j], std::popcount(i ^ j)});
    return out;
  }

  // keep the closest pairs; deterministic order via full sort with index ties
  struct Entry {
    double norm2;
    uint32_t i, j;
  };
  std::vector<Entry> entries;
  entries.reserve(total);
  for (uint64_t i = 0; i < nw; ++i)
    for (uint64_t j = i + 1; j < nw; ++j)
      entries.push_back({(words[i] - words[j]).squaredNorm(), uint32_t(i), uint32_t(j)});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  entries.resize(opt.max_pairs);
  out.reserve(entries.size());
  for (const auto& e : entries)
    out.push_back({words[e.i] - words[e.j], std::popcount(uint64_t(e.i) ^ uint64_t(e.j))});
  if (truncated) *truncated = true;
  return out;
}

double union_bound_from_pairs(const ChannelMoments& cm, const std::vector<PairTerm>& pairs,
                              const PasmConfig& cfg, double delta, double noise_w,
                              bool use_approx, int quad_order) {
  const int eta = spectral_efficiency(cfg);
  const double nw = std::ldexp(1.0, eta);
  double acc = 0.0;
  for (const auto& p : pairs) {
    double pep = use_approx ? pep_approx(cm, p.psi, delta, noise_w)
                            : pep_exact(cm, p.psi, delta, noise_w, quad_order);
    acc += 2.0 * pep * p.nbits;
  }
  return acc / (nw * eta);
}

UnionBoundResult union_bound_ber(const ChannelMoments& cm, const PasmConfig& cfg,
                                 const CompositeConstellation& cc, const UnionBoundOptions& opt) {
  bool truncated = false;
  auto pairs = codeword_pairs(cfg, cc, opt, &truncated);
  UnionBoundResult res;
  res.pairs_used = pairs.size();
  res.truncated = truncated;
  res.ber = union_bound_from_pairs(cm, pairs, cfg, cfg.delta(), cfg.noise_w, opt.use_approx,
                                   opt.quad_order);
  return res;
}

// Operation-count model, in real flops, one complex multiply-add taken as
// eight. ML pays one candidate image column per composite word of the whole
// frame; the iterative detector pays a cubic solve plus a composite scan per
// waveguide each pass; the one-shot filter pays the cubic solve once.
FlopEstimate flop_estimate(const PasmConfig& cfg, int vamp_iters) {
  cfg.validate();
  if (vamp_iters < 1) throw std::invalid_argument("analysis: iteration count must be positive");
  const double n_tx = cfg.n_tx(), n_rx = cfg.n_rx;
  const double cand =
      std::pow(double(cfg.mod_b), cfg.n_wg) * std::pow(double(cfg.mod_p), n_tx - cfg.n_wg);
  const double comp_set = double(cfg.mod_b) * std::pow(double(cfg.mod_p), cfg.n_pa - 1);
  FlopEstimate f;
  f.ml = 8.0 * n_rx * n_tx * cand;
  f.vamp_per_iter = 16.0 * n_tx * n_tx * n_tx + 8.0 * n_tx * comp_set;
  f.vamp = vamp_iters * f.vamp_per_iter;
  f.mmse = 8.0 * n_rx * n_tx * n_tx + 16.0 * n_tx * n_tx * n_tx / 3.0;
  return f;
}

}  // namespace pasm
