#include "qcm/core.h"

#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qcm/errors.h"

namespace qcm {

NormTag dual(NormTag norm) {
  switch (norm) {
    case NormTag::kL1:
      return NormTag::kLinf;
    case NormTag::kLinf:
      return NormTag::kL1;
    case NormTag::kL2:
      return NormTag::kL2;
  }
  return norm;
}

std::string_view to_string(NormTag norm) {
  switch (norm) {
    case NormTag::kL1:
      return "l1";
    case NormTag::kL2:
      return "l2";
    case NormTag::kLinf:
      return "linf";
  }
  return "?";
}

std::optional<NormTag> parse_norm(std::string_view text) {
  if (text == "l1") return NormTag::kL1;
  if (text == "l2") return NormTag::kL2;
  if (text == "linf") return NormTag::kLinf;
  return std::nullopt;
}

double vector_norm(const Vector& x, NormTag norm) {
  switch (norm) {
    case NormTag::kL1:
      return x.lpNorm<1>();
    case NormTag::kL2:
      return x.norm();
    case NormTag::kLinf:
      return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double dual_norm(const Vector& x, NormTag norm) { return vector_norm(x, dual(norm)); }

double induced_norm(const Matrix& m, NormTag norm) {
  if (m.size() == 0) return 0.0;
  switch (norm) {
    case NormTag::kL1:
      return m.cwiseAbs().colwise().sum().maxCoeff();
    case NormTag::kLinf:
      return m.cwiseAbs().rowwise().sum().maxCoeff();
    case NormTag::kL2: {
      Eigen::JacobiSVD<Matrix> svd(m);
      return svd.singularValues()(0);
    }
  }
  return 0.0;
}

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// c with ||x||_a <= c ||x||_b.
double vector_equivalence(NormTag a, NormTag b, int n) {
  if (a == b) return 1.0;
  const double dn = static_cast<double>(n);
  if (a == NormTag::kL1 && b == NormTag::kLinf) return dn;
  if (a == NormTag::kL1 && b == NormTag::kL2) return std::sqrt(dn);
  if (a == NormTag::kL2 && b == NormTag::kLinf) return std::sqrt(dn);
  return 1.0;  // a is the weaker norm
}

}  // namespace

double induced_norm_equivalence(NormTag a, NormTag b, int n) {
  return vector_equivalence(a, b, n) * vector_equivalence(b, a, n);
}

Vector norm_attaining_vector(const Matrix& m, NormTag norm) {
  const Eigen::Index n = m.cols();
  Vector x = Vector::Zero(n);
  if (n == 0) return x;
  switch (norm) {
    case NormTag::kL1: {
      Eigen::Index col = 0;
      m.cwiseAbs().colwise().sum().maxCoeff(&col);
      x(col) = 1.0;
      break;
    }
    case NormTag::kLinf: {
      Eigen::Index row = 0;
      m.cwiseAbs().rowwise().sum().maxCoeff(&row);
      for (Eigen::Index j = 0; j < n; ++j) x(j) = m(row, j) < 0.0 ? -1.0 : 1.0;
      break;
    }
    case NormTag::kL2: {
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
      x = svd.matrixV().col(0);
      break;
    }
  }
  return x;
}

MatrixFamily::MatrixFamily(std::vector<Matrix> members, NormTag norm,
                           std::vector<std::string> labels)
    : members_(std::move(members)), norm_(norm), labels_(std::move(labels)) {
  if (members_.empty()) throw InvalidArgument("matrix family must have at least one member");
  dim_ = static_cast<int>(members_.front().rows());
  if (dim_ < 1) throw InvalidArgument("matrix dimension must be positive");
  if (dim_ > kMaxDimension) {
    std::ostringstream msg;
    msg << "dimension " << dim_ << " exceeds the supported maximum " << kMaxDimension;
    throw InvalidArgument(msg.str());
  }
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Matrix& m = members_[i];
    if (m.rows() != dim_ || m.cols() != dim_) {
      std::ostringstream msg;
      msg << "member " << i << " is " << m.rows() << "x" << m.cols() << ", expected " << dim_
          << "x" << dim_;
      throw InvalidArgument(msg.str());
    }
    if (!m.allFinite()) {
      std::ostringstream msg;
      msg << "member " << i << " has non-finite entries";
      throw InvalidArgument(msg.str());
    }
  }
  if (!labels_.empty() && labels_.size() != members_.size()) {
    throw InvalidArgument("labels must be empty or match the member count");
  }
}

MatrixFamily MatrixFamily::with_norm(NormTag norm) const {
  return MatrixFamily(members_, norm, labels_);
}

double MatrixFamily::max_member_norm() const {
  double best = 0.0;
  for (const auto& m : members_) best = std::max(best, induced_norm(m, norm_));
  return best;
}

Matrix word_product(const MatrixFamily& family, std::span<const int> word) {
  Matrix product = Matrix::Identity(family.dim(), family.dim());
  for (int index : word) {
    if (index < 0 || static_cast<std::size_t>(index) >= family.size()) {
      throw InvalidArgument("word index out of range");
    }
    product = family[static_cast<std::size_t>(index)] * product;
  }
  return product;
}

Matrix orthonormal_span(const Matrix& columns, double rel_tol) {
  if (columns.cols() == 0) return Matrix(columns.rows(), 0);
  const double scale = columns.colwise().norm().maxCoeff();
  if (scale == 0.0) return Matrix(columns.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  qr.setThreshold(rel_tol);
  // The threshold is relative to the largest pivot, which equals the largest
  // column norm for column-pivoted Householder QR.
  const Eigen::Index rank = qr.rank();
  Matrix q = qr.householderQ();
  return q.leftCols(rank);
}

int numerical_rank(const Matrix& columns, double rel_tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return 0;
  if (columns.colwise().norm().maxCoeff() == 0.0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  qr.setThreshold(rel_tol);
  return static_cast<int>(qr.rank());
}

}  // namespace qcm
