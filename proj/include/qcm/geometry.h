#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qcm/core.h"

namespace qcm {

/// Hull dimension limit for facet enumeration.
inline constexpr int kMaxHullDimension = 6;

/// One facet pair of an origin-symmetric polytope: |<normal, y>| <= offset.
struct Facet {
  Vector normal;  // unit Euclidean length
  double offset = 0.0;
};

/// absco(W) = co(W u -W), described by its generators, its extreme points and
/// one facet per +/- pair.
struct SymmetricPolytope {
  int dim = 0;
  std::vector<Vector> generators;
  std::vector<Vector> vertices;  // closed under negation
  std::vector<Facet> facets;

  bool contains(const Vector& y, double tol = 1e-9) const;
};

/// Facet enumeration of conv(points u -points) by an incremental
/// beneath-beyond hull. Coplanar simplices are merged into one facet. Throws
/// DegenerateHull when the points span a proper subspace and InvalidArgument
/// for an empty set or dimension above kMaxHullDimension.
SymmetricPolytope absco_hull(std::span<const Vector> points);

/// max_i |<u, p_i>|, the support function of absco(points).
double support(std::span<const Vector> points, const Vector& u);

/// Largest t with the `norm` ball of radius t inside the polytope, i.e.
/// min over facets of offset / ||normal||_dual.
double inscribed_radius(const SymmetricPolytope& poly, NormTag norm);

/// Inscribed radius of absco(points), or 0 when the points do not span the
/// space. This is the hot path of the measure search; it skips the facet
/// merging and vertex bookkeeping of absco_hull.
double absco_inradius(std::span<const Vector> points, NormTag norm);

struct MembershipResult {
  double scale = 0.0;
  Vector coefficients;  // theta with scale * d = sum theta_i p_i, sum |theta_i| <= 1
};

/// Largest t with t d in absco(points), by linear programming.
MembershipResult membership_scale(std::span<const Vector> points, const Vector& direction);

struct RadiusOracle {
  double grid_value = 0.0;       // upper bound on the inscribed radius
  std::optional<double> exact;   // L1 only: min_j membership_scale(points, e_j)
  std::size_t directions = 0;
};

/// Independent check of inscribed_radius. The grid consists of the integer
/// points on the boundary of the cube [-g, g]^N, so doubling g refines the
/// grid and the value can only decrease.
RadiusOracle inscribed_radius_oracle(std::span<const Vector> points, NormTag norm,
                                     int grid_density);

}  // namespace qcm
