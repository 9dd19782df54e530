#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcm/core.h"
#include "qcm/products.h"

namespace qcm {

/// t_max(x) = sup{t : S(t) in absco(A_p(x))} for a fixed family and depth.
/// The product set is enumerated once; evaluation is thread safe.
class OrbitRadius {
 public:
  OrbitRadius(const MatrixFamily& family, int p, std::size_t cap = kDefaultProductCap);

  double operator()(const Vector& x) const;
  /// t_max(x / ||x||).
  double on_sphere(const Vector& x) const;

  int dim() const { return dim_; }
  int depth() const { return products_.depth; }
  NormTag norm() const { return norm_; }
  const ProductSet& products() const { return products_; }
  /// max over L in A_p of ||L||; a Lipschitz constant of t_max.
  double lipschitz() const { return lipschitz_; }

 private:
  ProductSet products_;
  Matrix stacked_;  // all products stacked vertically
  NormTag norm_;
  int dim_;
  double lipschitz_ = 1.0;
};

double t_max(const MatrixFamily& family, int p, const Vector& x);

struct SearchConfig {
  int starts = 64;
  std::uint64_t seed = 1;
  /// Defaults to certification for N <= 3 only.
  std::optional<bool> certify;
  /// Finest cell radius of the certification grid. Cells are refined until
  /// their lower bound reaches `certify_target` times sigma_upper or their
  /// radius reaches this floor.
  double certify_mesh = 1e-6;
  double certify_target = 0.5;
  std::size_t certify_budget = 4'000'000;
  int threads = 0;
  std::size_t product_cap = kDefaultProductCap;
  /// Tried before the seeded starts.
  std::vector<Vector> extra_starts;
};

struct GridInfo {
  std::string scheme;
  double finest_radius = 0.0;  // smallest radius among the final cells
  double mesh_floor = 0.0;
  std::size_t cells = 0;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

struct MeasureReport {
  int p = 0;
  NormTag norm = NormTag::kL1;
  double sigma_upper = 0.0;
  Vector argmin;  // unit vector with t_max(argmin) = sigma_upper
  double sigma_lower = 0.0;
  bool certified = false;
  double lipschitz = 1.0;
  GridInfo grid;
  int starts = 0;
  std::uint64_t seed = 0;
  std::size_t products = 0;
  std::vector<std::string> warnings;
};

/// sigma_upper by multistart pattern search on the unit sphere; sigma_lower
/// by a Lipschitz bound over an adaptive covering of the sphere.
MeasureReport quasi_controllability_measure(const MatrixFamily& family, int p,
                                            const SearchConfig& config = {});

struct CertifiedBound {
  double value = 0.0;
  GridInfo grid;
};

/// Lower bound on min_{||x||=1} t_max(x). Cells live on the faces x_k = 1 of
/// the cube [-1,1]^N (opposite faces are covered by t_max(-x) = t_max(x)).
/// For a cell with center c and radius r in the family norm,
///   t_max(y) / ||y|| >= (t_max(c) - L r) / (||c|| + r).
CertifiedBound certify_lower_bound(const OrbitRadius& radius, double target, double mesh_floor,
                                   std::size_t budget, int threads);

struct StructuredBoundReport {
  enum class Formula { kMixture, kVertex };
  Formula formula = Formula::kMixture;
  double alpha = 0.0;
  double beta = 0.0;
  double bound = 0.0;
  bool applicable = false;
  std::string reason;
};

std::string_view to_string(StructuredBoundReport::Formula formula);

/// alpha = 1 / (2N ||(A - I)^-1||_1), beta = min_{i != j, a_ij != 0} |a_ij| / 2,
/// bound = alpha beta^(N-1); zero unless the mixture criterion holds.
StructuredBoundReport mixture_lower_bound(const Matrix& A);

/// alpha = 1 / (N ||A^-1||_1), beta = min_{i != j, a_ij != 0} |a_ij|,
/// bound = alpha beta^(N-1); zero unless the vertex criterion holds.
StructuredBoundReport vertex_lower_bound(const Matrix& A);

/// Recognizes mixture and vertex families (L1 norm) and returns the matching
/// closed-form bound on sigma_N.
std::optional<StructuredBoundReport> structured_bound_for(const MatrixFamily& family);

}  // namespace qcm
