#include "qcm/invariance.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qcm/desync.h"
#include "qcm/errors.h"
#include "qcm/products.h"

namespace qcm {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kCertificateTol = 1e-8;
constexpr double kNullTol = 1e-8;
constexpr double kEdgeTol = 1e-14;
constexpr std::uint64_t kPivotSeed = 0x9e3779b97f4a7c15ull;

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Real span of {Re v, Im v} for each column v.
Matrix real_span(const ComplexMatrix& vectors) {
  Matrix cols(vectors.rows(), 2 * vectors.cols());
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    cols.col(2 * j) = vectors.col(j).real();
    cols.col(2 * j + 1) = vectors.col(j).imag();
  }
  return orthonormal_span(cols, kRankTol);
}

// Smallest subspace containing `seed` and invariant under every member.
Matrix close_under(const MatrixFamily& family, Matrix basis) {
  const int n = family.dim();
  for (int step = 0; step <= n; ++step) {
    Matrix stacked(n, basis.cols() * static_cast<Eigen::Index>(family.size() + 1));
    stacked.leftCols(basis.cols()) = basis;
    for (std::size_t i = 0; i < family.size(); ++i) {
      stacked.middleCols(basis.cols() * static_cast<Eigen::Index>(i + 1), basis.cols()) =
          family[i] * basis;
    }
    Matrix next = orthonormal_span(stacked, kRankTol);
    if (next.cols() == basis.cols()) return basis;
    basis = std::move(next);
    if (basis.cols() == n) return basis;
  }
  return basis;
}

// Eigen-seeds of one pivot: for each eigenvalue, an orthonormal basis of its
// numerical eigenspace.
struct EigenSeed {
  std::complex<double> value;
  ComplexMatrix eigenspace;
};

std::vector<EigenSeed> eigen_seeds(const Matrix& pivot) {
  Eigen::EigenSolver<Matrix> es(pivot, /*computeEigenvectors=*/false);
  const double scale = std::max(1.0, induced_norm(pivot, NormTag::kL2));
  std::vector<EigenSeed> seeds;
  const ComplexVector values = es.eigenvalues();
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const std::complex<double> lambda = values(k);
    // The conjugate eigenvalue gives the same real span.
    if (lambda.imag() < 0.0) continue;
    ComplexMatrix shifted = pivot.cast<std::complex<double>>();
    shifted.diagonal().array() -= lambda;
    Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    Eigen::Index null_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) <= kNullTol * scale) ++null_dim;
    }
    if (null_dim == 0) null_dim = 1;  // eigenvalue inaccurate; keep the best candidate
    seeds.push_back({lambda, svd.matrixV().rightCols(null_dim)});
  }
  return seeds;
}

std::vector<Matrix> pivots_for(const MatrixFamily& family) {
  std::vector<Matrix> pivots(family.members());
  std::mt19937_64 rng(kPivotSeed);
  std::normal_distribution<double> gauss;
  const int n = family.dim();
  for (int round = 0; round < 2; ++round) {
    Matrix p = Matrix::Zero(n, n);
    for (const auto& m : family.members()) p += gauss(rng) * m;
    pivots.push_back(std::move(p));
  }
  if (family.size() <= 6) {
    Matrix p = Matrix::Zero(n, n);
    for (const auto& a : family.members()) {
      p += gauss(rng) * a;
      for (const auto& b : family.members()) p += gauss(rng) * (a * b);
    }
    pivots.push_back(std::move(p));
  }
  return pivots;
}

// Vertex set reachable from `start` along j -> i edges (A_ij != 0).
std::vector<int> reachable_from(const Matrix& A, int start) {
  const int n = static_cast<int>(A.rows());
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  std::vector<int> order;
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    order.push_back(j);
    for (int i = 0; i < n; ++i) {
      if (!seen[static_cast<std::size_t>(i)] && std::abs(A(i, j)) > kEdgeTol) {
        seen[static_cast<std::size_t>(i)] = 1;
        stack.push_back(i);
      }
    }
  }
  std::sort(order.begin(), order.end());
  return order;
}

// Coordinate subspace closed under the dependency graph, if A is reducible.
Matrix reducible_graph_certificate(const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  for (int v = 0; v < n; ++v) {
    const std::vector<int> reach = reachable_from(A, v);
    if (static_cast<int>(reach.size()) < n) {
      Matrix basis = Matrix::Zero(n, static_cast<Eigen::Index>(reach.size()));
      for (std::size_t k = 0; k < reach.size(); ++k) basis(reach[k], static_cast<Eigen::Index>(k)) = 1.0;
      return basis;
    }
  }
  return Matrix(n, 0);
}

Vector real_null_vector(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(m.cols() - 1);
}

QCVerdict one_dimensional_verdict() {
  QCVerdict v;
  v.status = QCStatus::kQuasiControllable;
  v.reason = "dimension 1 has no nonzero proper subspace";
  return v;
}

QCVerdict certified_or_reason(const MatrixFamily& family, Matrix basis, std::string reason) {
  QCVerdict v;
  v.status = QCStatus::kReducible;
  v.reason = std::move(reason);
  if (basis.cols() > 0 && basis.cols() < family.dim() &&
      invariance_residual(family, basis) <= kCertificateTol) {
    v.basis = std::move(basis);
  } else {
    v.reason += " (certificate omitted: failed verification)";
  }
  return v;
}

}  // namespace

std::string_view to_string(QCStatus status) {
  switch (status) {
    case QCStatus::kQuasiControllable:
      return "quasi_controllable";
    case QCStatus::kReducible:
      return "reducible";
    case QCStatus::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

double invariance_residual(const MatrixFamily& family, const Matrix& basis) {
  double worst = 0.0;
  const Matrix projector =
      Matrix::Identity(family.dim(), family.dim()) - basis * basis.transpose();
  for (const auto& m : family.members()) {
    worst = std::max(worst, induced_norm(projector * m * basis, NormTag::kL2));
  }
  return worst;
}

OrbitSpan orbit_span_test(const MatrixFamily& family, int p, const Vector& x) {
  if (x.size() != family.dim()) throw InvalidArgument("orbit_span_test: dimension mismatch");
  if (x.lpNorm<Eigen::Infinity>() == 0.0) throw InvalidArgument("orbit_span_test: x must be nonzero");
  const ProductSet products = enumerate_products(family, p);
  const std::vector<Vector> points = orbit_points(products, x);
  Matrix cols(family.dim(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = points[i];
  OrbitSpan out;
  out.basis = orthonormal_span(cols, kRankTol);
  out.dim = static_cast<int>(out.basis.cols());
  out.full = out.dim == family.dim();
  return out;
}

QCVerdict is_quasi_controllable(const MatrixFamily& family) {
  const int n = family.dim();
  if (n == 1) return one_dimensional_verdict();

  Matrix blocking;
  for (const Matrix& pivot : pivots_for(family)) {
    bool exact = true;
    std::vector<Matrix> checked;
    for (const EigenSeed& seed : eigen_seeds(pivot)) {
      if (seed.eigenspace.cols() > 1) {
        exact = false;
        if (blocking.size() == 0) blocking = real_span(seed.eigenspace);
      }
      for (Eigen::Index j = 0; j < seed.eigenspace.cols(); ++j) {
        const Matrix start = real_span(seed.eigenspace.col(j));
        if (start.cols() == 0) continue;
        const Matrix closure = close_under(family, start);
        if (closure.cols() < n) {
          if (invariance_residual(family, closure) <= kCertificateTol) {
            QCVerdict v;
            v.status = QCStatus::kReducible;
            v.basis = closure;
            std::ostringstream msg;
            msg << "eigen-seed closure spans a " << closure.cols()
                << "-dimensional common invariant subspace";
            v.reason = msg.str();
            return v;
          }
          exact = false;
        } else {
          checked.push_back(start);
        }
      }
    }
    if (exact) {
      QCVerdict v;
      v.status = QCStatus::kQuasiControllable;
      v.seeds = std::move(checked);
      v.reason = "every eigen-seed of a simple-spectrum pivot closes to the full space";
      return v;
    }
  }
  QCVerdict v;
  v.status = QCStatus::kInconclusive;
  v.basis = blocking;
  v.reason = "no pivot with one-dimensional eigenspaces; no invariant subspace found";
  return v;
}

bool kalman_controllable(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw InvalidArgument("kalman_controllable: dimension mismatch");
  }
  const Eigen::Index n = A.rows();
  Matrix krylov(n, n);
  krylov.col(0) = b;
  for (Eigen::Index i = 1; i < n; ++i) krylov.col(i) = A * krylov.col(i - 1);
  return numerical_rank(krylov, kRankTol) == n;
}

bool kalman_observable(const Matrix& A, const Vector& c) {
  return kalman_controllable(A.transpose(), c);
}

MatrixFamily rank_one_family(const Matrix& A, const Vector& b, const Vector& c, NormTag norm) {
  if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() != c.size()) {
    throw InvalidArgument("rank_one_family: dimension mismatch");
  }
  return MatrixFamily({A, b * c.transpose()}, norm, {"A", "bc^T"});
}

bool irreducible(const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  if (n <= 1) return true;
  if (static_cast<int>(reachable_from(A, 0).size()) < n) return false;
  return static_cast<int>(reachable_from(A.transpose(), 0).size()) == n;
}

QCVerdict mixture_qc_criterion(const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  if (n == 1) return one_dimensional_verdict();
  const MatrixFamily family = mixture_family(A);
  Eigen::EigenSolver<Matrix> es(A, false);
  const double gap = (es.eigenvalues().array() - std::complex<double>(1.0, 0.0)).abs().minCoeff();
  if (gap <= 1e-10) {
    Matrix v = real_null_vector(A - Matrix::Identity(n, n)).normalized();
    return certified_or_reason(family, v, "1 is an eigenvalue of A");
  }
  if (!irreducible(A)) {
    return certified_or_reason(family, reducible_graph_certificate(A), "A is reducible");
  }
  QCVerdict v;
  v.status = QCStatus::kQuasiControllable;
  v.reason = "1 is not an eigenvalue of A and A is irreducible";
  return v;
}

QCVerdict vertex_qc_criterion(const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  if (n == 1) return one_dimensional_verdict();
  const MatrixFamily family = vertex_family(A);
  const double scale = induced_norm(A, NormTag::kL1);
  const double det = A.determinant();
  if (scale == 0.0 || std::abs(det) <= 1e-12 * std::pow(scale, n)) {
    Matrix v = real_null_vector(A).normalized();
    return certified_or_reason(family, v, "A is singular");
  }
  if (!irreducible(A)) {
    return certified_or_reason(family, reducible_graph_certificate(A), "A is reducible");
  }
  QCVerdict v;
  v.status = QCStatus::kQuasiControllable;
  v.reason = "0 is not an eigenvalue of A and A is irreducible";
  return v;
}

}  // namespace qcm
