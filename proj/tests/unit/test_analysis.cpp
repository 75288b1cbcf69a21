// Copyright 2026 The pasmsim Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <bit>
#include <cmath>
#include <numbers>

#include "pasmsim/analysis.hpp"
#include "pasmsim/geometry.hpp"
#include "pasmsim/rng.hpp"

using namespace pasm;

namespace {

Eigen::MatrixXcd random_psd(int n, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.cnormal();
  return scale * (a * a.adjoint() / n);
}

}  // namespace

TEST_CASE("gauss-legendre nodes integrate polynomials and the craig kernel") {
  auto q = gauss_legendre(5, 0.0, 1.0);
  REQUIRE(q.nodes.size() == 5);
  CHECK(q.weights.minCoeff() > 0.0);
  CHECK(q.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
  double acc = 0;
  for (int i = 0; i < 5; ++i) acc += q.weights(i) * std::pow(q.nodes(i), 9);
  CHECK(acc == doctest::Approx(0.1).epsilon(1e-12));  // degree 9 exact at order 5

  auto c = gauss_legendre(64, 0.0, std::numbers::pi / 2);
  double s2 = 0;
  for (int i = 0; i < 64; ++i) s2 += c.weights(i) * std::pow(std::sin(c.nodes(i)), 2);
  CHECK(s2 == doctest::Approx(std::numbers::pi / 4).epsilon(1e-13));
}

TEST_CASE("gaussian tail values and the two-exponential approximation") {
  CHECK(q_func(0.0) == doctest::Approx(0.5));
  CHECK(q_func(1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
  CHECK(q_func(3.0) == doctest::Approx(0.0013498980316300933).epsilon(1e-10));
  CHECK(q_chiani(0.0) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  // exceeds the true tail once the argument clears the knee near 1
  for (double x : {1.0, 2.0, 3.0, 5.0}) CHECK(q_chiani(x) > q_func(x));
  // and stays close over the whole range of interest
  for (double x : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    CHECK(std::abs(q_chiani(x) / q_func(x) - 1.0) < 0.30);
  }
}

TEST_CASE("commutation matrix transposes stacked storage") {
  for (auto [m, n] : {std::pair{2, 3}, {3, 2}, {4, 4}, {1, 5}}) {
    auto k = commutation_matrix(m, n);
    REQUIRE(k.rows() == m * n);
    // permutation: orthogonal with unit row sums
    CHECK((k * k.transpose() - Eigen::MatrixXd::Identity(m * n, m * n)).norm() == 0.0);
    CHECK(k.sum() == doctest::Approx(m * n));

    Rng rng(7, m * 10 + n);
    Eigen::MatrixXcd a(m, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) a(i, j) = rng.cnormal();
    Eigen::VectorXcd va = Eigen::Map<Eigen::VectorXcd>(a.data(), m * n);
    Eigen::MatrixXcd at = a.transpose();
    Eigen::VectorXcd vat = Eigen::Map<Eigen::VectorXcd>(at.data(), m * n);
    CHECK((k * va - vat).norm() < 1e-14);

    // independent construction through unit-vector kronecker products
    Eigen::MatrixXd k2 = Eigen::MatrixXd::Zero(m * n, m * n);
    for (int j = 0; j < n; ++j) {
      Eigen::RowVectorXd ejt = Eigen::RowVectorXd::Zero(n);
      ejt(j) = 1.0;
      Eigen::VectorXd ej = ejt.transpose();
      Eigen::MatrixXd block = Eigen::kroneckerProduct(
          ejt, Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(m, m), ej).eval());
      k2 += block;
    }
    CHECK((k - k2).norm() == 0.0);
  }
}

TEST_CASE("mgf closed forms: unit case, isotropic case, scalar rician case") {
  // a = 0 always gives 1
  Rng rng(11, 0);
  Eigen::VectorXcd mean(3);
  for (int i = 0; i < 3; ++i) mean(i) = rng.cnormal();
  auto cov = random_psd(3, rng);
  auto q = random_psd(3, rng);
  CHECK(mgf_quadratic(mean, cov, q, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  // zero mean, identity covariance and weighting: (1 - a)^-n
  int n = 4;
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(n);
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
  for (double a : {-0.3, -2.0, -50.0})
    CHECK(mgf_quadratic(zero, eye, eye, a) ==
          doctest::Approx(std::pow(1.0 - a, -n)).epsilon(1e-12));

  // scalar case against the textbook expression
  Eigen::VectorXcd mu(1);
  mu(0) = cplx(0.7, -0.4);
  Eigen::MatrixXcd c(1, 1), w(1, 1);
  c(0, 0) = 0.6;
  w(0, 0) = 1.9;
  for (double a : {-0.1, -1.0, -10.0}) {
    double qa = 1.9, s2 = 0.6, m2 = std::norm(mu(0));
    double want = std::exp(a * qa * m2 / (1.0 - a * qa * s2)) / (1.0 - a * qa * s2);
    CHECK(mgf_quadratic(mu, c, w, a) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("mgf agrees with monte carlo on random instances") {
  Rng rng(13, 5);
  for (int inst = 0; inst < 3; ++inst) {
    const int n = 3;
    Eigen::VectorXcd mean(n);
    for (int i = 0; i < n; ++i) mean(i) = 0.8 * rng.cnormal();
    auto cov = random_psd(n, rng, 0.7);
    auto q = random_psd(n, rng, 1.1);
    Eigen::LLT<Eigen::MatrixXcd> llt(cov +
                                     1e-12 * Eigen::MatrixXcd::Identity(n, n));
    Eigen::MatrixXcd l = llt.matrixL();
    const double a = -0.8;
    const int trials = 200000;
    double acc = 0, acc2 = 0;
    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXcd z(n);
      for (int i = 0; i < n; ++i) z(i) = rng.cnormal();
      Eigen::VectorXcd u = mean + l * z;
      double v = std::exp(a * (u.adjoint() * q * u)(0).real());
      acc += v;
      acc2 += v * v;
    }
    double mc = acc / trials;
    double se = std::sqrt((acc2 / trials - mc * mc) / trials);
    double want = mgf_quadratic(mean, cov, q, a);
    CHECK(std::abs(mc - want) < 4.0 * se + 1e-9);
  }
}

namespace {

ChannelMoments moments_fixture(const PasmConfig& cfg, Rng& rng, LargeScaleState* ls_out = nullptr,
                               Eigen::MatrixXcd* hbar_out = nullptr) {
  auto geom = build_deployment(cfg);
  auto pat = select_activation(geom, geom.user, cfg);
  auto hbar = mean_channel(pat, geom, cfg.lambda0());
  auto ls = draw_large_scale(pat, geom, cfg.large_scale, rng);
  if (ls_out) *ls_out = ls;
  if (hbar_out) *hbar_out = hbar;
  return channel_moments(ls, hbar);
}

}  // namespace

TEST_CASE("moments via the commutation route match the direct construction") {
  PasmConfig cfg;
  cfg.n_wg = 2;
  cfg.n_pa = 2;
  cfg.n_rx = 3;
  cfg.mod_b = 4;
  cfg.mod_p = 2;
  Rng rng(17, 0);
  LargeScaleState ls;
  Eigen::MatrixXcd hbar;
  auto cm = moments_fixture(cfg, rng, &ls, &hbar);

  const int n_rx = cfg.n_rx, n_tx = cfg.n_tx();
  auto k = commutation_matrix(n_rx, n_tx);
  Eigen::MatrixXcd mmat =
      ls.amp.cwiseProduct(ls.k_los).cast<std::complex<double>>().cwiseProduct(hbar);
  Eigen::VectorXcd vm = Eigen::Map<Eigen::VectorXcd>(mmat.data(), n_rx * n_tx);
  CHECK((cm.mean - (k * vm).conjugate()).norm() < 1e-14);

  Eigen::MatrixXd smat = ls.amp.cwiseProduct(ls.k_nlos).cwiseAbs2();
  Eigen::VectorXd vs = Eigen::Map<Eigen::VectorXd>(smat.data(), n_rx * n_tx);
  Eigen::MatrixXcd cov2 =
      (k * vs.asDiagonal() * k.transpose()).cast<std::complex<double>>();
  CHECK((cm.cov - cov2).norm() < 1e-14);
}

TEST_CASE("pep reference cases") {
  PasmConfig cfg;
  cfg.n_wg = 1;
  cfg.n_pa = 2;
  cfg.n_rx = 2;
  cfg.mod_b = 2;
  cfg.mod_p = 2;
  Rng rng(23, 1);
  LargeScaleState ls;
  Eigen::MatrixXcd hbar;
  auto cm = moments_fixture(cfg, rng, &ls, &hbar);
  const int n_tx = cfg.n_tx();

  // identical codewords: half for the quadrature, a third for the chiani form
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(n_tx);
  CHECK(pep_exact(cm, zero, 1e-3, 1e-12) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pep_approx(cm, zero, 1e-3, 1e-12) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // deterministic channel: closed-form gaussian tail
  ChannelMoments det = cm;
  det.cov.setZero();
  Eigen::MatrixXcd hmean(cfg.n_rx, n_tx);
  for (int j = 0; j < cfg.n_rx; ++j)
    for (int t = 0; t < n_tx; ++t) hmean(j, t) = std::conj(det.mean(j * n_tx + t));
  Eigen::VectorXcd psi(n_tx);
  psi << cplx(0.9, 0.1), cplx(-0.3, 0.7);
  // pick the power so the tail argument sits at 2, well inside the
  // region the quadrature resolves
  double noise = 1e-12;
  double delta = 8.0 * noise / (hmean * psi).squaredNorm();
  double arg = std::sqrt(delta * (hmean * psi).squaredNorm() / (2 * noise));
  CHECK(arg == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pep_exact(det, psi, delta, noise) == doctest::Approx(q_func(arg)).epsilon(1e-10));

  // more power, fewer confusions
  double last = 1.0;
  for (double scale : {0.1, 1.0, 10.0, 100.0}) {
    double v = pep_exact(cm, psi, scale * delta, noise);
    CHECK(v < last);
    CHECK(v > 0.0);
    last = v;
  }

  // quadrature is settled by order 64
  CHECK(pep_exact(cm, psi, delta, noise, 64) ==
        doctest::Approx(pep_exact(cm, psi, delta, noise, 128)).epsilon(1e-9));
}

TEST_CASE("union bound matches a direct pairwise sum and handles truncation") {
  PasmConfig cfg;
  cfg.n_wg = 1;
  cfg.n_pa = 2;
  cfg.n_rx = 2;
  cfg.mod_b = 2;
  cfg.mod_p = 2;
  auto cc = build_constellation(cfg);
  Rng rng(29, 3);
  auto cm = moments_fixture(cfg, rng);

  const int eta = spectral_efficiency(cfg);
  REQUIRE(eta == 2);
  const int nw = 4;
  const double delta = 1e-9, noise = 1e-12;
  cfg.power_w = delta * cfg.n_tx();
  cfg.noise_w = noise;

  // direct enumeration of all 6 unordered pairs
  std::vector<Eigen::VectorXcd> words;
  for (int w = 0; w < nw; ++w) {
    std::vector<uint8_t> bits(eta);
    for (int i = 0; i < eta; ++i) bits[i] = (w >> (eta - 1 - i)) & 1;
    words.push_back(map_bits(bits, cfg, cc).x);
  }
  double acc = 0;
  for (int i = 0; i < nw; ++i)
    for (int j = i + 1; j < nw; ++j) {
      int nbits = std::popcount(unsigned(i ^ j));
      acc += 2.0 * pep_exact(cm, words[i] - words[j], delta, noise) * nbits;
    }
  double want = acc / (double(nw) * eta);

  auto res = union_bound_ber(cm, cfg, cc);
  CHECK(res.pairs_used == 6);
  CHECK(!res.truncated);
  CHECK(res.ber == doctest::Approx(want).epsilon(1e-12));

  // truncation keeps the closest pairs and can only lower the sum
  UnionBoundOptions opt;
  opt.max_pairs = 3;
  CHECK_THROWS(union_bound_ber(cm, cfg, cc, opt));
  opt.truncate = true;
  auto tr = union_bound_ber(cm, cfg, cc, opt);
  CHECK(tr.pairs_used == 3);
  CHECK(tr.truncated);
  CHECK(tr.ber < res.ber);
  CHECK(tr.ber > 0.0);

  // chiani route stays within a modest factor of the quadrature route
  UnionBoundOptions ap;
  ap.use_approx = true;
  auto ares = union_bound_ber(cm, cfg, cc, ap);
  CHECK(ares.ber == doctest::Approx(res.ber).epsilon(0.35));
}

TEST_CASE("flop model scaling properties") {
  PasmConfig small;
  small.n_wg = 1;
  small.n_pa = 2;
  small.n_rx = 2;
  small.mod_b = 2;
  small.mod_p = 2;
  PasmConfig dbl = small;
  dbl.mod_b = 4;
  auto a = flop_estimate(small, 10);
  auto b = flop_estimate(dbl, 10);
  CHECK(b.ml == doctest::Approx(2.0 * a.ml));
  CHECK(b.mmse == doctest::Approx(a.mmse));

  PasmConfig big;
  big.n_wg = 4;
  big.n_pa = 4;
  big.n_rx = 4;
  big.mod_b = 16;
  big.mod_p = 4;
  auto f = flop_estimate(big, 10);
  CHECK(f.ml / f.vamp >= 100.0);
  CHECK(f.vamp == doctest::Approx(10.0 * f.vamp_per_iter));
}
