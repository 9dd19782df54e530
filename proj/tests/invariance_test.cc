#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "oracles.h"
#include "qcm/errors.h"
#include "qcm/invariance.h"

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

MatrixFamily fam(std::vector<Matrix> ms) { return MatrixFamily(std::move(ms), NormTag::kL1); }

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(rng, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

// Members share the invariant span of the first d columns of q.
MatrixFamily block_triangular(std::mt19937_64& rng, int n, int d, int members) {
  const Matrix q = random_orthogonal(rng, n);
  std::vector<Matrix> ms;
  for (int i = 0; i < members; ++i) {
    Matrix b = oracle::random_matrix(rng, n);
    b.bottomLeftCorner(n - d, d).setZero();
    ms.push_back(q * b * q.transpose());
  }
  return fam(ms);
}

// Oracle verdict for Kalman pairs using the reference rank.
bool oracle_kalman(const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(A.rows());
  Matrix k(n, n);
  Vector col = b;
  for (int i = 0; i < n; ++i) {
    k.col(i) = col;
    col = A * col;
  }
  return oracle::rank(k) == n;
}

TEST(OrbitSpan, Examples) {
  const auto e = fam({Matrix::Identity(2, 2), m2(1, 1, 0, 1)});
  auto r = orbit_span_test(e, 1, v2(1, 0));
  EXPECT_FALSE(r.full);
  EXPECT_EQ(r.dim, 1);
  EXPECT_NEAR(std::abs(r.basis(0, 0)), 1.0, 1e-12);
  r = orbit_span_test(fam({m2(0, 1, 1, 0), m2(1, 0, 0, -1)}), 1, v2(1, 0));
  EXPECT_TRUE(r.full);
  EXPECT_EQ(r.dim, 2);
  EXPECT_THROW(orbit_span_test(e, 1, v2(0, 0)), InvalidArgument);
}

TEST(QC, JordanBlockReducible) {
  const auto v = is_quasi_controllable(fam({m2(1, 1, 0, 1)}));
  ASSERT_EQ(v.status, QCStatus::kReducible);
  ASSERT_EQ(v.basis.cols(), 1);
  EXPECT_NEAR(std::abs(v.basis(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(v.basis(1, 0), 0.0, 1e-12);
}

TEST(QC, RankOneExample) {
  const auto f = rank_one_family(m2(0, 1, 0, 0), v2(0, 1), v2(1, 0));
  EXPECT_TRUE(f[1].isApprox(m2(0, 0, 1, 0)));
  EXPECT_EQ(is_quasi_controllable(f).status, QCStatus::kQuasiControllable);
}

TEST(QC, IdentityPairNeverQC) {
  const auto v = is_quasi_controllable(fam({Matrix::Identity(2, 2), Matrix::Identity(2, 2)}));
  EXPECT_NE(v.status, QCStatus::kQuasiControllable);
}

TEST(QC, ScalarFamily) {
  Matrix a(1, 1);
  a << 0.3;
  EXPECT_EQ(is_quasi_controllable(fam({a})).status, QCStatus::kQuasiControllable);
}

TEST(QC, RankOneScalar) {
  Matrix a(1, 1);
  a << 2;
  Vector b(1), c(1);
  b << 3;
  c << -1;
  const auto f = rank_one_family(a, b, c);
  EXPECT_DOUBLE_EQ(f[1](0, 0), -3.0);
  const auto z = rank_one_family(m2(0, 1, 0, 0), v2(0, 0), v2(1, 0));
  EXPECT_TRUE(z[1].isZero());
}

TEST(QC, RotationPairIrreducible) {
  // a rotation has no real invariant line; complex seeds must be handled
  const double c = std::cos(0.7), s = std::sin(0.7);
  EXPECT_EQ(is_quasi_controllable(fam({m2(c, -s, s, c)})).status, QCStatus::kQuasiControllable);
}

TEST(QC, BlockTriangularNeverQC) {
  std::mt19937_64 rng(41);
  int reducible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 4;
    const int d = 1 + trial % (n - 1);
    const auto f = block_triangular(rng, n, d, 2 + trial % 2);
    const auto v = is_quasi_controllable(f);
    ASSERT_NE(v.status, QCStatus::kQuasiControllable) << "trial " << trial;
    if (v.status == QCStatus::kReducible) {
      ++reducible;
      EXPECT_GE(v.basis.cols(), 1);
      EXPECT_LT(v.basis.cols(), n);
      EXPECT_LE(invariance_residual(f, v.basis), 1e-8);
    }
  }
  EXPECT_EQ(reducible, 60);
}

TEST(QC, GenericFamiliesAreQC) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    const auto f = fam({oracle::random_matrix(rng, n), oracle::random_matrix(rng, n)});
    EXPECT_EQ(is_quasi_controllable(f).status, QCStatus::kQuasiControllable) << "trial " << trial;
  }
}

TEST(QC, TwoByTwoCommonEigenvectorOracle) {
  // In R^2 a family is reducible iff its members share a real eigenvector.
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> small(-2, 2);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Matrix> ms;
    for (int k = 0; k < 2; ++k) ms.push_back(m2(small(rng), small(rng), small(rng), small(rng)));
    bool shared = false;
    // candidate lines: integer directions cover every rational eigenvector of these matrices
    for (int a = -8; a <= 8 && !shared; ++a)
      for (int b = 0; b <= 8 && !shared; ++b) {
        if (a == 0 && b == 0) continue;
        const Vector x = v2(a, b);
        bool all = true;
        for (const auto& m : ms) {
          const Vector y = m * x;
          all = all && std::abs(x(0) * y(1) - x(1) * y(0)) < 1e-12;
        }
        shared = all;
      }
    const auto v = is_quasi_controllable(fam(ms));
    if (v.status == QCStatus::kInconclusive) continue;
    ++checked;
    if (shared) {
      EXPECT_EQ(v.status, QCStatus::kReducible) << ms[0] << "\n" << ms[1];
    } else if (v.status == QCStatus::kReducible) {
      // an irrational shared eigenvector; the certificate must still hold
      EXPECT_LE(invariance_residual(fam(ms), v.basis), 1e-8);
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(Kalman, Examples) {
  EXPECT_TRUE(kalman_controllable(m2(0, 1, 0, 0), v2(0, 1)));
  EXPECT_FALSE(kalman_controllable(Matrix::Identity(2, 2), v2(1, 2)));
  EXPECT_TRUE(kalman_controllable(m2(1, 0, 0, 2), v2(1, 1)));
  EXPECT_TRUE(kalman_observable(m2(0, 1, 0, 0), v2(1, 0)));
  EXPECT_FALSE(kalman_observable(Matrix::Identity(2, 2), v2(1, 2)));
  EXPECT_TRUE(kalman_observable(m2(1, 0, 0, 2), v2(1, 1)));
}

TEST(Kalman, EquivalenceWithGeneralTest) {
  std::mt19937_64 rng(53);
  int inconclusive = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 5;
    Matrix A = oracle::random_matrix(rng, n);
    Vector b = oracle::random_vector(rng, n);
    const Vector c = oracle::random_vector(rng, n);
    if (trial % 4 == 1 && n > 1) {
      // span{e_1} invariant under A and containing b: uncontrollable
      A.col(0).tail(n - 1).setZero();
      b = Vector::Unit(n, 0);
    }
    const bool want = oracle_kalman(A, b) && oracle_kalman(A.transpose(), c);
    EXPECT_EQ(kalman_controllable(A, b) && kalman_observable(A, c), want);
    const auto v = is_quasi_controllable(rank_one_family(A, b, c));
    if (v.status == QCStatus::kInconclusive) {
      ++inconclusive;
      continue;
    }
    EXPECT_EQ(v.status == QCStatus::kQuasiControllable, want) << "trial " << trial;
  }
  EXPECT_LT(inconclusive, 10);
}

TEST(Irreducible, Examples) {
  EXPECT_TRUE(irreducible(m2(0, 1, 1, 0)));
  EXPECT_FALSE(irreducible(m2(1, 1, 0, 1)));
  EXPECT_FALSE(irreducible(m2(2, 0, 0, 3)));
  Matrix one(1, 1);
  one << 0;
  EXPECT_TRUE(irreducible(one));
  Matrix cyc = Matrix::Zero(4, 4);
  cyc(1, 0) = cyc(2, 1) = cyc(3, 2) = cyc(0, 3) = 1;
  EXPECT_TRUE(irreducible(cyc));
  cyc(0, 3) = 0;
  EXPECT_FALSE(irreducible(cyc));
}

TEST(MixtureCriterion, Examples) {
  EXPECT_EQ(mixture_qc_criterion(m2(0, 0.5, 0.5, 0)).status, QCStatus::kQuasiControllable);
  const auto swap = mixture_qc_criterion(m2(0, 1, 1, 0));
  EXPECT_EQ(swap.status, QCStatus::kReducible);
  EXPECT_LE(invariance_residual(fam(oracle::mixture(m2(0, 1, 1, 0))), swap.basis), 1e-8);
  const auto diag = mixture_qc_criterion(m2(0.2, 0, 0, 0.3));
  EXPECT_EQ(diag.status, QCStatus::kReducible);
  EXPECT_LE(invariance_residual(fam(oracle::mixture(m2(0.2, 0, 0, 0.3))), diag.basis), 1e-8);
}

TEST(MixtureCriterion, AgreesWithGeneralTest) {
  std::mt19937_64 rng(59);
  std::bernoulli_distribution sparse(0.3);
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    Matrix A = oracle::random_matrix(rng, n);
    if (trial % 3 == 0)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && sparse(rng)) A(i, j) = 0;
    if (trial % 7 == 0 && n > 1) {
      // force eigenvalue 1
      Vector v = oracle::random_vector(rng, n);
      A += (v - A * v) * v.transpose() / v.squaredNorm();
    }
    const auto crit = mixture_qc_criterion(A);
    const auto gen = is_quasi_controllable(fam(oracle::mixture(A)));
    if (gen.status == QCStatus::kInconclusive) continue;
    ++compared;
    EXPECT_EQ(crit.status, gen.status) << "trial " << trial << "\n" << A;
  }
  EXPECT_GT(compared, 80);
}

TEST(VertexCriterion, Examples) {
  EXPECT_EQ(vertex_qc_criterion(m2(0, 1, 1, 0)).status, QCStatus::kQuasiControllable);
  EXPECT_EQ(vertex_qc_criterion(m2(1, 1, 1, 1)).status, QCStatus::kReducible);
  EXPECT_EQ(vertex_qc_criterion(m2(2, 0, 0, 3)).status, QCStatus::kReducible);
}

TEST(VertexCriterion, AgreesWithGeneralTest) {
  std::mt19937_64 rng(61);
  std::bernoulli_distribution sparse(0.35);
  int compared = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 2 + trial % 3;
    Matrix A = oracle::random_matrix(rng, n);
    if (trial % 2 == 0)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && sparse(rng)) A(i, j) = 0;
    std::vector<Matrix> ms{A};
    for (int i = 0; i < n; ++i) {
      Matrix d = A;
      d.row(i) *= -1;
      ms.push_back(d);
    }
    const auto gen = is_quasi_controllable(fam(ms));
    if (gen.status == QCStatus::kInconclusive) continue;
    ++compared;
    EXPECT_EQ(vertex_qc_criterion(A).status, gen.status) << "trial " << trial << "\n" << A;
  }
  EXPECT_GT(compared, 60);
}

}  // namespace
}  // namespace qcm
