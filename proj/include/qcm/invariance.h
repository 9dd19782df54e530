#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qcm/core.h"

namespace qcm {

enum class QCStatus { kQuasiControllable, kReducible, kInconclusive };

std::string_view to_string(QCStatus status);

/// Outcome of a quasi-controllability decision.
///
/// For kReducible, `basis` is an orthonormal basis (N x d, 1 <= d < N) of a
/// common invariant subspace. For kQuasiControllable, `seeds` lists the real
/// eigen-seed spans that were closed to the full space. For kInconclusive,
/// `basis` holds the degenerate eigenspace that blocked the exact test.
struct QCVerdict {
  QCStatus status = QCStatus::kInconclusive;
  Matrix basis;
  std::vector<Matrix> seeds;
  std::string reason;
};

/// max_i ||(I - V V^T) A_i V||_2, zero for an invariant span.
double invariance_residual(const MatrixFamily& family, const Matrix& basis);

struct OrbitSpan {
  bool full = false;
  int dim = 0;
  Matrix basis;  // orthonormal basis of span{A_p(x)}
};

/// Rank of {L x : L in A_p} by pivoted QR. Throws InvalidArgument for x = 0.
OrbitSpan orbit_span_test(const MatrixFamily& family, int p, const Vector& x);

/// Common-invariant-subspace search by eigen-seed closure.
///
/// Every common invariant subspace V is invariant under each pivot P drawn
/// from the algebra generated by the family, so V contains the real span of
/// some eigenvector of P. If every eigenvalue of P has a one-dimensional
/// eigenspace, closing each such seed under the family either finds a proper
/// invariant subspace or proves there is none. Pivots are the members
/// followed by seeded generic elements of the algebra (random combinations
/// of members and of pairwise products).
QCVerdict is_quasi_controllable(const MatrixFamily& family);

bool kalman_controllable(const Matrix& A, const Vector& b);
bool kalman_observable(const Matrix& A, const Vector& c);

/// {A, b c^T}.
MatrixFamily rank_one_family(const Matrix& A, const Vector& b, const Vector& c,
                             NormTag norm = NormTag::kL1);

/// Strong connectivity of the digraph with an edge j -> i whenever
/// |A_ij| > 1e-14.
bool irreducible(const Matrix& A);

/// Quasi-controllability of the mixture family of A: 1 is not an eigenvalue
/// and A is irreducible.
QCVerdict mixture_qc_criterion(const Matrix& A);

/// Quasi-controllability of the vertex family of A: A is nonsingular and
/// irreducible.
QCVerdict vertex_qc_criterion(const Matrix& A);

}  // namespace qcm
