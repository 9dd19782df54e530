#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "qcm/desync.h"
#include "qcm/errors.h"
#include "qcm/robustness.h"

namespace qcm {
namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// max_n ||F^n||_1 over a long fixed horizon.
double oracle_power_max(const Matrix& F, int horizon) {
  double best = 1;
  Matrix P = Matrix::Identity(F.rows(), F.cols());
  for (int n = 1; n <= horizon; ++n) {
    P = P * F;
    best = std::max(best, oracle::col_sum_norm(P));
  }
  return best;
}

TEST(Generators, Build) {
  const auto g = mixture_generator(m2(0, 0.5, 0.5, 0), Matrix::Ones(2, 2));
  const auto f = g.make(0.25);
  EXPECT_EQ(f[0], m2(0.25, 0.75, 0, 1));
  EXPECT_FALSE(g.description.empty());
  const MatrixFamily base({m2(1, 0, 0, 1), m2(0, 1, 0, 0)}, NormTag::kL1);
  const auto a = affine_generator(base, {m2(1, 1, 1, 1), m2(0, 0, 1, 0)}).make(0.5);
  EXPECT_EQ(a[0], m2(1.5, 0.5, 0.5, 1.5));
  EXPECT_EQ(a[1], m2(0, 1, 0.5, 0));
  EXPECT_THROW(affine_generator(base, {m2(1, 1, 1, 1)}), InvalidArgument);
}

TEST(Sweep, ConstantGeneratorRowsEqual) {
  const MatrixFamily f(oracle::mixture(m2(0, 0.5, 0.5, 0)), NormTag::kL1);
  SearchConfig cfg;
  cfg.starts = 8;
  const auto t = measure_sweep(constant_generator(f), 2, {0.5, 0.25, 0.125}, cfg, 4);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.sigma_upper, t.baseline.sigma_upper);
    EXPECT_EQ(r.sigma_lower, t.baseline.sigma_lower);
    EXPECT_EQ(r.gap, 0.0);
    EXPECT_EQ(r.chi_T, t.baseline.chi_T);
  }
  EXPECT_LT(t.rows[0].tau, t.rows[2].tau);
}

TEST(Sweep, ContinuityOfMeasure) {
  SearchConfig cfg;
  cfg.starts = 16;
  cfg.certify = false;
  std::vector<double> taus;
  for (int k = 1; k <= 12; ++k) taus.push_back(std::ldexp(1.0, -k));
  const auto t =
      measure_sweep(mixture_generator(m2(0, 0.5, 0.5, 0), Matrix::Ones(2, 2)), 2, taus, cfg, 2);
  // rows ascend in tau, so k = 12 is first
  EXPECT_LT(t.rows.front().gap, 1e-3);
  EXPECT_LT(t.rows.front().gap, t.rows.back().gap);
}

TEST(Sweep, CriterionFlips) {
  // A + tau B hits eigenvalue 1 at tau = 0.5
  SearchConfig cfg;
  cfg.starts = 4;
  cfg.certify = false;
  const auto t = measure_sweep(mixture_generator(m2(0, 0.5, 0.5, 0), m2(0, 1, 1, 0)), 2,
                               {0.25, 0.5}, cfg, 2);
  EXPECT_EQ(t.rows[0].qc, QCStatus::kQuasiControllable);
  EXPECT_EQ(t.rows[1].qc, QCStatus::kReducible);
}

TEST(Probe, PersistenceForSmallTau) {
  const Matrix R = m2(1.5, 0.2, 0.3, 0.4);
  const Matrix S = m2(0, 1, 1, 0);
  const MatrixFamily base({R, S}, NormTag::kL1);
  const auto gen = affine_generator(base, {R, Matrix::Zero(2, 2)});
  SearchConfig cfg;
  cfg.starts = 16;
  const auto t = instability_robustness_probe(gen, 1, {-0.9, -0.01, 0.001, 0.01}, 8, cfg, 4);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_FALSE(t.rows[0].persists);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_TRUE(t.rows[i].persists) << t.rows[i].tau;
    EXPECT_TRUE(t.rows[i].witness_ok) << t.rows[i].witness_note;
  }
}

TEST(Probe, ConstantUnstableFamily) {
  const MatrixFamily f({m2(1.5, 0.2, 0.3, 0.4), m2(0, 1, 1, 0)}, NormTag::kL1);
  SearchConfig cfg;
  cfg.starts = 16;
  const auto t = instability_robustness_probe(constant_generator(f), 1, {0.1, 0.2}, 8, cfg, 4);
  for (const auto& r : t.rows) EXPECT_TRUE(r.persists);
}

TEST(Probe, InapplicableWithoutViolation) {
  const MatrixFamily f(oracle::mixture(m2(0, 0.5, 0.5, 0)), NormTag::kL1);
  SearchConfig cfg;
  cfg.starts = 8;
  EXPECT_THROW(instability_robustness_probe(constant_generator(f), 2, {0.1}, 6, cfg),
               PreconditionFailed);
}

TEST(PowerOvershoot, MatchesLongHorizon) {
  std::mt19937_64 rng(181);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix F = oracle::random_matrix(rng, 3);
    const double rho = Eigen::EigenSolver<Matrix>(F).eigenvalues().cwiseAbs().maxCoeff();
    F *= 0.9 / rho;
    EXPECT_NEAR(power_overshoot(F, NormTag::kL1), oracle_power_max(F, 3000), 1e-9);
  }
  EXPECT_DOUBLE_EQ(power_overshoot(m2(0.5, 0, 0, 0.5), NormTag::kL1), 1.0);
  EXPECT_THROW(power_overshoot(m2(1, 1, 0, 1), NormTag::kL1, 1000), Error);
}

TEST(Limits, Suite) {
  const std::vector<int> ms{2, 4, 8, 16, 32, 64};
  const auto s = limit_family_suite(ms, 20);
  EXPECT_DOUBLE_EQ(s.chi_T_limit_E, 21.0);
  EXPECT_NE(s.qc_limit_E, QCStatus::kQuasiControllable);
  EXPECT_DOUBLE_EQ(s.chi_limit_F, 1.0);
  EXPECT_NE(s.qc_limit_F, QCStatus::kQuasiControllable);
  ASSERT_EQ(s.rows.size(), ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& r = s.rows[i];
    const double m = ms[i];
    EXPECT_EQ(r.stability_E, Stability::kCertifiedStable);
    EXPECT_EQ(r.stability_F, Stability::kCertifiedStable);
    EXPECT_NEAR(r.rho_F, 1 - 1 / (m * m), 1e-12);
    EXPECT_NEAR(r.rho_E, 1 - 1 / m, 1e-12);
    EXPECT_NE(r.qc_E, QCStatus::kQuasiControllable);
    EXPECT_NE(r.qc_F, QCStatus::kQuasiControllable);
    if (i > 0) EXPECT_GT(r.chi_F, s.rows[i - 1].chi_F);
  }
  // closed form: ||F^n||_1 = lambda^n + n lambda^(n-1) / m
  const double m = 4, lam = 1 - 1 / (m * m);
  double want = 1;
  for (int n = 1; n < 2000; ++n)
    want = std::max(want, std::pow(lam, n) + n * std::pow(lam, n - 1) / m);
  EXPECT_NEAR(s.rows[1].chi_F, want, 1e-9);
}

TEST(PeakDemo, Examples) {
  auto d = intro_peak_demo(1.0, 0.1);
  EXPECT_NEAR(d.closed_loop(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(d.closed_loop(0, 1), 0.1, 1e-12);
  EXPECT_NEAR(d.closed_loop(1, 0), -10.0, 1e-9);
  EXPECT_NEAR(d.closed_loop(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(d.closed_loop_norm, 11.0, 1e-9);
  for (const auto& ev : d.eigenvalues) EXPECT_LE(std::abs(ev), 1e-6);
  EXPECT_NEAR(d.flipped_corner(1, 0), 10.0, 1e-9);
  bool nonzero = false;
  for (const auto& ev : d.flipped_eigenvalues) nonzero = nonzero || std::abs(ev) > 1e-3;
  EXPECT_TRUE(nonzero);
  d = intro_peak_demo(0.0, 0.3);
  EXPECT_NEAR(d.b(0), 0.0, 1e-15);
  EXPECT_NEAR(d.b(1), -0.3, 1e-15);
  EXPECT_NEAR(d.closed_loop_norm, 0.3, 1e-15);
  EXPECT_THROW(intro_peak_demo(1.0, 0.0), InvalidArgument);
  const auto half = intro_peak_demo(2.0, 0.05);
  const auto full = intro_peak_demo(2.0, 0.1);
  EXPECT_NEAR(half.closed_loop(1, 0) / full.closed_loop(1, 0), 2.0, 1e-3);
}

TEST(PeakDemo, EigenvaluesNearZero) {
  for (double a : {0.5, 1.0, 3.0})
    for (double eps : {0.5, 0.1, -0.01, 0.001}) {
      const auto d = intro_peak_demo(a, eps);
      // nilpotent: the square vanishes
      EXPECT_LE((d.closed_loop * d.closed_loop).cwiseAbs().maxCoeff(),
                1e-9 * d.closed_loop_norm * d.closed_loop_norm);
      for (const auto& ev : d.eigenvalues) EXPECT_LE(std::abs(ev), 1e-6 * d.closed_loop_norm);
    }
}

}  // namespace
}  // namespace qcm
