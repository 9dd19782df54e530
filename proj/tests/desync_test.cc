#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "qcm/desync.h"
#include "qcm/errors.h"

namespace qcm {
namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(MixtureFamily, Examples) {
  const auto f = mixture_family(m2(1, 2, 3, 4));
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0], m2(1, 2, 0, 1));
  EXPECT_EQ(f[1], m2(1, 0, 3, 4));
  const auto id = mixture_family(Matrix::Identity(3, 3));
  for (const auto& m : id.members()) EXPECT_EQ(m, Matrix::Identity(3, 3));
}

TEST(MixtureFamily, OnlyCoordinateIChanges) {
  std::mt19937_64 rng(151);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    const Matrix A = oracle::random_matrix(rng, n);
    const auto f = mixture_family(A);
    const auto ref = oracle::mixture(A);
    const Vector x = oracle::random_vector(rng, n);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(f[static_cast<std::size_t>(i)], ref[static_cast<std::size_t>(i)]);
      const Vector y = f[static_cast<std::size_t>(i)] * x;
      for (int j = 0; j < n; ++j)
        if (j != i) EXPECT_EQ(y(j), x(j));
      EXPECT_NEAR(y(i), A.row(i).dot(x), 1e-12);
      EXPECT_LE(oracle::col_sum_norm(f[static_cast<std::size_t>(i)]),
                std::max(1.0, oracle::col_sum_norm(A)) + 1);
    }
  }
}

TEST(VertexFamily, Examples) {
  Matrix a(1, 1);
  a << 0.3;
  const auto f1 = vertex_family(a);
  ASSERT_EQ(f1.size(), 2u);
  EXPECT_DOUBLE_EQ(f1[1](0, 0), -0.3);
  const auto f2 = vertex_family(Matrix::Identity(2, 2));
  ASSERT_EQ(f2.size(), 3u);
  EXPECT_EQ(f2[1], m2(-1, 0, 0, 1));
  EXPECT_EQ(f2[2], m2(1, 0, 0, -1));
  std::mt19937_64 rng(157);
  const Matrix A = oracle::random_matrix(rng, 3);
  const auto f3 = vertex_family(A);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Eigen::RowVectorXd want = i == j ? Eigen::RowVectorXd(-A.row(j)) : Eigen::RowVectorXd(A.row(j));
      EXPECT_EQ(Eigen::RowVectorXd(f3[static_cast<std::size_t>(i + 1)].row(j)), want);
    }
  for (const auto& m : f3.members())
    EXPECT_LE(oracle::col_sum_norm(m), std::max(1.0, oracle::col_sum_norm(A)) + 1);
}

TEST(Laws, Parse) {
  EXPECT_EQ(parse_law("round_robin", 0).kind, UpdateLaw::Kind::kRoundRobin);
  const auto l = parse_law("iid_uniform", 9);
  EXPECT_EQ(l.kind, UpdateLaw::Kind::kIidUniform);
  EXPECT_EQ(l.seed, 9u);
  EXPECT_EQ(parse_law("greedy", 0).kind, UpdateLaw::Kind::kGreedyAdversarial);
  EXPECT_THROW(parse_law("chaotic", 0), Error);
}

TEST(Laws, Words) {
  const auto f = mixture_family(m2(0, 0.5, 0.5, 0));
  EXPECT_EQ(law_word(f, UpdateLaw::round_robin(), v2(1, 0), 5), (Word{0, 1, 0, 1, 0}));
  const auto a = law_word(f, UpdateLaw::iid_uniform(3), v2(1, 0), 50);
  EXPECT_EQ(a, law_word(f, UpdateLaw::iid_uniform(3), v2(1, 0), 50));
  EXPECT_NE(a, law_word(f, UpdateLaw::iid_uniform(4), v2(1, 0), 50));
  for (int i : a) EXPECT_TRUE(i == 0 || i == 1);
  // greedy: first step from e1 gives A_1 e1 = (0,0) or A_2 e1 = (1, 0.5); picks 1
  EXPECT_EQ(law_word(f, UpdateLaw::greedy_adversarial(), v2(1, 0), 1), (Word{1}));
  // ties go to the lowest index
  EXPECT_EQ(law_word(mixture_family(Matrix::Identity(2, 2)), UpdateLaw::greedy_adversarial(),
                     v2(1, 1), 3),
            (Word{0, 0, 0}));
}

TEST(Simulate, Examples) {
  const auto t = simulate_desync(Matrix::Identity(3, 3), UpdateLaw::round_robin(), Vector::Ones(3), 9);
  for (const auto& s : t.states) EXPECT_EQ(s, Vector::Ones(3));
  const auto h = simulate_desync(m2(0, 0.5, 0.5, 0), UpdateLaw::round_robin(), v2(1, 0), 6);
  EXPECT_EQ(h.states[1], v2(0, 0));
  EXPECT_DOUBLE_EQ(h.peak, 1.0);
  EXPECT_EQ(simulate_desync(m2(0, 0.5, 0.5, 0), UpdateLaw::round_robin(), v2(1, 0), 0).states.size(), 1u);
}

TEST(Simulate, RoundRobinIsGaussSeidelSweep) {
  std::mt19937_64 rng(163);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const Matrix A = oracle::random_matrix(rng, n);
    Vector x = oracle::random_vector(rng, n);
    const auto t = simulate_desync(A, UpdateLaw::round_robin(), x, n);
    for (int i = 0; i < n; ++i) x(i) = A.row(i).dot(x);
    EXPECT_LE((t.states.back() - x).norm(), 1e-12 * (1 + x.norm()));
  }
}

TEST(Simulate, GreedyPeakAtLeastRoundRobinUsually) {
  // logged comparison, not a theorem
  std::mt19937_64 rng(167);
  int greedy_wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = oracle::random_matrix(rng, 3, 0.6);
    const Vector x = oracle::random_vector(rng, 3);
    const double g = simulate_desync(A, UpdateLaw::greedy_adversarial(), x, 30).peak;
    const double r = simulate_desync(A, UpdateLaw::round_robin(), x, 30).peak;
    if (g >= r) ++greedy_wins;
  }
  RecordProperty("greedy_at_least_round_robin", greedy_wins);
  EXPECT_GT(greedy_wins, 0);
}

TEST(Bound, Examples) {
  auto r = desync_overshoot_bound(m2(0, 0.5, 0.5, 0));
  EXPECT_NEAR(r.bound, 32.0, 1e-12);
  EXPECT_NEAR(r.structured.alpha, 0.125, 1e-15);
  EXPECT_NEAR(r.structured.beta, 0.25, 1e-15);
  r = desync_overshoot_bound(m2(0, 1, 1, 0));
  EXPECT_TRUE(std::isinf(r.bound));
  EXPECT_FALSE(r.reason.empty());
}

TEST(Bound, SimulatedPeaksBelowBound) {
  std::mt19937_64 rng(173);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 6; ++trial) {
    const int n = 2 + trial % 2;
    const Matrix A = oracle::random_matrix(rng, n, 0.4);
    const auto b = desync_overshoot_bound(A);
    if (!std::isfinite(b.bound)) continue;
    if (b.stability.verdict != Stability::kCertifiedStable &&
        b.stability.verdict != Stability::kCertifiedBounded)
      continue;
    ++checked;
    double peak = 0;
    for (int k = 0; k < 1000; ++k) {
      Vector x = oracle::random_vector(rng, n);
      x /= oracle::l1(x);
      peak = std::max(peak, simulate_desync(A, UpdateLaw::round_robin(), x, 200).peak);
      peak = std::max(peak, simulate_desync(A, UpdateLaw::iid_uniform(k), x, 200).peak);
      peak = std::max(peak, simulate_desync(A, UpdateLaw::greedy_adversarial(), x, 200).peak);
    }
    EXPECT_LE(peak, b.bound * (1 + 1e-9)) << A;
  }
  EXPECT_GE(checked, 3);
}

}  // namespace
}  // namespace qcm
