#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sequence of member indices. Entry 0 is applied first, so the product of a
/// word w of length L is A[w[L-1]] * ... * A[w[0]]. The empty word is I.
using Word = std::vector<int>;

/// Dimensions above this are rejected; everything here is desk scale.
inline constexpr int kMaxDimension = 12;

enum class NormTag { kL1, kL2, kLinf };

/// dual(L1) = Linf, dual(Linf) = L1, dual(L2) = L2.
NormTag dual(NormTag norm);
std::string_view to_string(NormTag norm);
std::optional<NormTag> parse_norm(std::string_view text);

double vector_norm(const Vector& x, NormTag norm);

/// Norm of x in the dual of `norm`.
double dual_norm(const Vector& x, NormTag norm);

/// Operator norm induced by `norm`. L1 and Linf use the column/row sum
/// formulas; L2 is the largest singular value.
double induced_norm(const Matrix& m, NormTag norm);

double spectral_radius(const Matrix& m);

/// Constant c with ||P||_a <= c ||P||_b for every N x N matrix P.
double induced_norm_equivalence(NormTag a, NormTag b, int n);

/// A vector x with ||x|| = 1 attaining ||m x|| = induced_norm(m, norm).
Vector norm_attaining_vector(const Matrix& m, NormTag norm);

/// Finite family {A_1, ..., A_M} of real N x N matrices together with the
/// vector norm every measure is taken in.
class MatrixFamily {
 public:
  MatrixFamily(std::vector<Matrix> members, NormTag norm,
               std::vector<std::string> labels = {});

  int dim() const { return dim_; }
  std::size_t size() const { return members_.size(); }
  NormTag norm() const { return norm_; }
  const Matrix& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Matrix>& members() const { return members_; }
  const std::vector<std::string>& labels() const { return labels_; }

  MatrixFamily with_norm(NormTag norm) const;

  /// Largest induced norm over the members.
  double max_member_norm() const;

 private:
  std::vector<Matrix> members_;
  NormTag norm_;
  std::vector<std::string> labels_;
  int dim_ = 0;
};

/// Ordered product of the indexed members; identity for the empty word.
Matrix word_product(const MatrixFamily& family, std::span<const int> word);

/// Orthonormal basis of span(columns) using column-pivoted QR; columns whose
/// pivot falls below rel_tol times the largest column norm are dropped.
Matrix orthonormal_span(const Matrix& columns, double rel_tol = 1e-10);

int numerical_rank(const Matrix& columns, double rel_tol = 1e-10);

}  // namespace qcm
