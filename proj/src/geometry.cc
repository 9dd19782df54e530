#include "qcm/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/QR>

#include "qcm/errors.h"
#include "qcm/lp.h"

namespace qcm {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kHullTol = 1e-11;
constexpr double kMergeTol = 1e-9;
constexpr double kDuplicateTol = 1e-9;
constexpr double kCoarseDuplicateTol = 1e-7;
constexpr double kSupportTol = 1e-9;

struct RawFacet {
  std::vector<int> verts;
  std::vector<int> neighbors;  // neighbors[k] shares every vertex but verts[k]
  Vector normal;
  double offset = 0.0;
  bool alive = true;
};

// Beneath-beyond convex hull of a point cloud that contains the origin in its
// interior. Facets are simplices; a non-simplicial face shows up as several
// coplanar simplices.
class IncrementalHull {
 public:
  IncrementalHull(const std::vector<Vector>& points, double scale)
      : pts_(points), dim_(static_cast<int>(points.front().size())), eps_(kHullTol * scale) {
    build_initial_simplex(scale);
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      if (!in_simplex_[static_cast<std::size_t>(i)]) insert(i);
    }
  }

  const std::vector<RawFacet>& facets() const { return facets_; }

 private:
  void build_initial_simplex(double scale) {
    in_simplex_.assign(pts_.size(), false);
    std::vector<int> simplex;
    int first = 0;
    double best = -1.0;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      const double r = pts_[static_cast<std::size_t>(i)].norm();
      if (r > best) {
        best = r;
        first = i;
      }
    }
    simplex.push_back(first);
    Matrix basis(dim_, 0);
    const Vector& origin = pts_[static_cast<std::size_t>(first)];
    for (int k = 0; k < dim_; ++k) {
      int pick = -1;
      double far = 0.0;
      for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
        Vector d = pts_[static_cast<std::size_t>(i)] - origin;
        if (basis.cols() > 0) d -= basis * (basis.transpose() * d);
        const double dist = d.norm();
        if (dist > far) {
          far = dist;
          pick = i;
        }
      }
      if (pick < 0 || far <= kRankTol * scale) throw DegenerateHull("points do not span the space");
      Vector d = pts_[static_cast<std::size_t>(pick)] - origin;
      if (basis.cols() > 0) d -= basis * (basis.transpose() * d);
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = d.normalized();
      simplex.push_back(pick);
    }
    interior_ = Vector::Zero(dim_);
    for (int v : simplex) {
      interior_ += pts_[static_cast<std::size_t>(v)];
      in_simplex_[static_cast<std::size_t>(v)] = true;
    }
    interior_ /= static_cast<double>(simplex.size());

    // Facet k omits simplex[k]; across the ridge that omits simplex[m] it
    // meets facet m.
    for (int k = 0; k <= dim_; ++k) {
      RawFacet f;
      for (int m = 0; m <= dim_; ++m) {
        if (m == k) continue;
        f.verts.push_back(simplex[static_cast<std::size_t>(m)]);
        f.neighbors.push_back(m);
      }
      set_plane(f);
      facets_.push_back(std::move(f));
    }
  }

  void set_plane(RawFacet& f) const {
    const Vector& v0 = pts_[static_cast<std::size_t>(f.verts[0])];
    if (dim_ == 1) {
      f.normal = Vector::Ones(1);
    } else if (dim_ == 2) {
      const Vector d = pts_[static_cast<std::size_t>(f.verts[1])] - v0;
      f.normal = Vector(2);
      f.normal << -d(1), d(0);
      f.normal.normalize();
    } else if (dim_ == 3) {
      const Eigen::Vector3d a = pts_[static_cast<std::size_t>(f.verts[1])] - v0;
      const Eigen::Vector3d b = pts_[static_cast<std::size_t>(f.verts[2])] - v0;
      f.normal = a.cross(b).normalized();
    } else {
      Matrix diffs(dim_, dim_ - 1);
      for (int j = 1; j < dim_; ++j) {
        diffs.col(j - 1) = pts_[static_cast<std::size_t>(f.verts[static_cast<std::size_t>(j)])] - v0;
      }
      Eigen::HouseholderQR<Matrix> qr(diffs);
      Matrix q = qr.householderQ();
      f.normal = q.col(dim_ - 1);
    }
    f.offset = f.normal.dot(v0);
    if (f.normal.dot(interior_) > f.offset) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
  }

  void insert(int point) {
    const Vector& q = pts_[static_cast<std::size_t>(point)];
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(facets_.size()); ++f) {
      const RawFacet& facet = facets_[static_cast<std::size_t>(f)];
      if (facet.alive && facet.normal.dot(q) - facet.offset > eps_) visible.push_back(f);
    }
    if (visible.empty()) return;
    std::vector<char> is_visible(facets_.size(), 0);
    for (int f : visible) is_visible[static_cast<std::size_t>(f)] = 1;

    struct OpenRidge {
      std::vector<int> key;
      int facet;
      int pos;
    };
    std::vector<OpenRidge> open_ridges;
    for (int f : visible) {
      for (int k = 0; k < dim_; ++k) {
        const int g = facets_[static_cast<std::size_t>(f)].neighbors[static_cast<std::size_t>(k)];
        if (is_visible[static_cast<std::size_t>(g)]) continue;
        RawFacet fresh;
        fresh.verts = facets_[static_cast<std::size_t>(f)].verts;
        fresh.verts[static_cast<std::size_t>(k)] = point;
        fresh.neighbors.assign(static_cast<std::size_t>(dim_), -1);
        fresh.neighbors[static_cast<std::size_t>(k)] = g;
        set_plane(fresh);
        const int id = static_cast<int>(facets_.size());
        for (int& nb : facets_[static_cast<std::size_t>(g)].neighbors) {
          if (nb == f) nb = id;
        }
        // Link the ridges through the new apex with the other new facets.
        for (int j = 0; j < dim_; ++j) {
          if (j == k) continue;
          std::vector<int> ridge;
          ridge.reserve(static_cast<std::size_t>(dim_ - 1));
          for (int m = 0; m < dim_; ++m) {
            if (m != j) ridge.push_back(fresh.verts[static_cast<std::size_t>(m)]);
          }
          std::sort(ridge.begin(), ridge.end());
          auto it = std::find_if(open_ridges.begin(), open_ridges.end(),
                                 [&](const OpenRidge& r) { return r.key == ridge; });
          if (it == open_ridges.end()) {
            open_ridges.push_back({std::move(ridge), id, j});
          } else {
            fresh.neighbors[static_cast<std::size_t>(j)] = it->facet;
            facets_[static_cast<std::size_t>(it->facet)].neighbors[static_cast<std::size_t>(it->pos)] = id;
            *it = std::move(open_ridges.back());
            open_ridges.pop_back();
          }
        }
        facets_.push_back(std::move(fresh));
        is_visible.push_back(0);
      }
    }
    for (int f : visible) facets_[static_cast<std::size_t>(f)].alive = false;
  }

  const std::vector<Vector>& pts_;
  int dim_;
  double eps_;
  Vector interior_;
  std::vector<bool> in_simplex_;
  std::vector<RawFacet> facets_;
};

// Points and their negatives, farthest first, with near duplicates merged.
// Nearly coincident points make beneath-beyond build slivers whose normals
// are noise, so they are dropped; the hull moves by at most tol * scale.
std::vector<Vector> symmetrize(std::span<const Vector> points, double scale, double tol) {
  std::vector<std::size_t> order(points.size());
  std::vector<double> norms(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    order[i] = i;
    norms[i] = points[i].norm();
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  std::vector<Vector> cloud;
  cloud.reserve(2 * points.size());
  const double limit = tol * scale;
  auto keep = [&](const Vector& v) {
    for (const auto& w : cloud) {
      if ((w - v).cwiseAbs().maxCoeff() <= limit) return;
    }
    cloud.push_back(v);
  };
  for (std::size_t i : order) {
    keep(points[i]);
    keep(-points[i]);
  }
  return cloud;
}

// Every live facet must support the cloud and keep the origin strictly inside.
bool hull_is_valid(const std::vector<RawFacet>& facets, const std::vector<Vector>& cloud,
                   double scale) {
  const double tol = kSupportTol * scale;
  for (const auto& f : facets) {
    if (!f.alive) continue;
    if (!(f.offset > tol)) return false;
    for (const auto& p : cloud) {
      if (f.normal.dot(p) > f.offset + tol) return false;
    }
  }
  return true;
}

double max_norm(std::span<const Vector> points) {
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.norm());
  return scale;
}

void check_input(std::span<const Vector> points) {
  if (points.empty()) throw InvalidArgument("absco_hull: empty point set");
  const auto dim = points.front().size();
  if (dim < 1 || dim > kMaxHullDimension) {
    throw InvalidArgument("absco_hull: dimension must be between 1 and 6");
  }
  for (const auto& p : points) {
    if (p.size() != dim) throw InvalidArgument("absco_hull: mixed dimensions");
    if (!p.allFinite()) throw InvalidArgument("absco_hull: non-finite point");
  }
}

bool spans_space(std::span<const Vector> points, double scale) {
  const auto dim = points.front().size();
  if (scale == 0.0) return false;
  Matrix cols(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = points[i];
  return numerical_rank(cols, kRankTol) == dim;
}

// Flip to the sign whose first significant component is positive.
Vector canonical_direction(const Vector& n) {
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (std::abs(n(i)) > kMergeTol) return n(i) < 0.0 ? Vector(-n) : n;
  }
  return n;
}

}  // namespace

bool SymmetricPolytope::contains(const Vector& y, double tol) const {
  for (const auto& f : facets) {
    if (std::abs(f.normal.dot(y)) > f.offset + tol * std::max(1.0, f.offset)) return false;
  }
  return true;
}

SymmetricPolytope absco_hull(std::span<const Vector> points) {
  check_input(points);
  const int dim = static_cast<int>(points.front().size());
  const double scale = max_norm(points);
  if (!spans_space(points, scale)) throw DegenerateHull("points do not span the space");

  SymmetricPolytope poly;
  poly.dim = dim;
  poly.generators.assign(points.begin(), points.end());

  if (dim == 1) {
    poly.facets.push_back({Vector::Ones(1), scale});
    poly.vertices.push_back(Vector::Constant(1, scale));
    poly.vertices.push_back(Vector::Constant(1, -scale));
    return poly;
  }

  std::vector<Vector> cloud = symmetrize(points, scale, kDuplicateTol);
  std::optional<IncrementalHull> hull;
  hull.emplace(cloud, scale);
  if (!hull_is_valid(hull->facets(), cloud, scale)) {
    cloud = symmetrize(points, scale, kCoarseDuplicateTol);
    hull.emplace(cloud, scale);
    if (!hull_is_valid(hull->facets(), cloud, scale)) {
      throw Error("absco_hull: facet enumeration is numerically unstable for this point set");
    }
  }
  std::vector<char> is_vertex(cloud.size(), 0);
  for (const auto& f : hull->facets()) {
    if (!f.alive) continue;
    for (int v : f.verts) is_vertex[static_cast<std::size_t>(v)] = 1;
    const Vector n = canonical_direction(f.normal);
    const bool seen = std::any_of(poly.facets.begin(), poly.facets.end(), [&](const Facet& g) {
      return (g.normal - n).cwiseAbs().maxCoeff() <= kMergeTol;
    });
    if (!seen) poly.facets.push_back({n, f.offset});
  }
  const double tol = kMergeTol * std::max(1.0, scale);
  auto add_vertex = [&](const Vector& v) {
    for (const auto& w : poly.vertices) {
      if ((w - v).cwiseAbs().maxCoeff() <= tol) return;
    }
    poly.vertices.push_back(v);
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!is_vertex[i]) continue;
    add_vertex(cloud[i]);
    add_vertex(-cloud[i]);
  }
  return poly;
}

double support(std::span<const Vector> points, const Vector& u) {
  double best = 0.0;
  for (const auto& p : points) best = std::max(best, std::abs(u.dot(p)));
  return best;
}

// Inradius through membership LPs; exact for the L1 ball (its vertices are
// the +/- e_j) and the Linf ball (its vertices are the sign vectors).
static double lp_inradius(std::span<const Vector> points, NormTag norm) {
  const int dim = static_cast<int>(points.front().size());
  double radius = std::numeric_limits<double>::infinity();
  if (norm == NormTag::kL1) {
    for (int j = 0; j < dim; ++j) {
      radius = std::min(radius, membership_scale(points, Vector::Unit(dim, j)).scale);
    }
    return radius;
  }
  if (norm == NormTag::kLinf) {
    for (unsigned mask = 0; mask < (1u << (dim - 1)); ++mask) {
      Vector s = Vector::Ones(dim);
      for (int j = 1; j < dim; ++j) {
        if (mask >> (j - 1) & 1u) s(j) = -1.0;
      }
      radius = std::min(radius, membership_scale(points, s).scale);
    }
    return radius;
  }
  throw Error("absco_inradius: facet enumeration is numerically unstable for this point set");
}

double inscribed_radius(const SymmetricPolytope& poly, NormTag norm) {
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& f : poly.facets) radius = std::min(radius, f.offset / dual_norm(f.normal, norm));
  return poly.facets.empty() ? 0.0 : radius;
}

double absco_inradius(std::span<const Vector> points, NormTag norm) {
  check_input(points);
  const double scale = max_norm(points);
  if (scale == 0.0) return 0.0;
  if (points.front().size() == 1) return scale;
  try {
    for (double tol : {kDuplicateTol, kCoarseDuplicateTol}) {
      const std::vector<Vector> cloud = symmetrize(points, scale, tol);
      IncrementalHull hull(cloud, scale);
      if (!hull_is_valid(hull.facets(), cloud, scale)) continue;
      double radius = std::numeric_limits<double>::infinity();
      for (const auto& f : hull.facets()) {
        if (f.alive) radius = std::min(radius, f.offset / dual_norm(f.normal, norm));
      }
      return std::max(radius, 0.0);
    }
  } catch (const DegenerateHull&) {
    return 0.0;
  }
  return lp_inradius(points, norm);
}

MembershipResult membership_scale(std::span<const Vector> points, const Vector& direction) {
  if (points.empty()) throw InvalidArgument("membership_scale: empty point set");
  if (direction.lpNorm<Eigen::Infinity>() == 0.0) {
    throw InvalidArgument("membership_scale: zero direction");
  }
  const Eigen::Index n = direction.size();
  const Eigen::Index q = static_cast<Eigen::Index>(points.size());
  // Variables: t, theta+ (q), theta- (q), slack.
  const Eigen::Index vars = 2 * q + 2;
  Matrix A = Matrix::Zero(n + 1, vars);
  Vector b = Vector::Zero(n + 1);
  Vector c = Vector::Zero(vars);
  A.col(0).head(n) = direction;
  for (Eigen::Index i = 0; i < q; ++i) {
    const Vector& p = points[static_cast<std::size_t>(i)];
    if (p.size() != n) throw InvalidArgument("membership_scale: dimension mismatch");
    A.col(1 + i).head(n) = -p;
    A.col(1 + q + i).head(n) = p;
    A(n, 1 + i) = 1.0;
    A(n, 1 + q + i) = 1.0;
  }
  A(n, vars - 1) = 1.0;
  b(n) = 1.0;
  c(0) = 1.0;
  const lp::Result sol = lp::maximize(A, b, c);
  MembershipResult out;
  out.coefficients = Vector::Zero(q);
  if (sol.status != lp::Status::kOptimal) return out;  // t = 0 is always feasible
  out.scale = std::max(0.0, sol.x(0));
  out.coefficients = sol.x.segment(1, q) - sol.x.segment(1 + q, q);
  return out;
}

RadiusOracle inscribed_radius_oracle(std::span<const Vector> points, NormTag norm,
                                     int grid_density) {
  check_input(points);
  if (grid_density < 1) throw InvalidArgument("grid density must be positive");
  const int dim = static_cast<int>(points.front().size());
  RadiusOracle out;
  out.grid_value = std::numeric_limits<double>::infinity();

  std::vector<int> k(static_cast<std::size_t>(dim), -grid_density);
  Vector u(dim);
  while (true) {
    int max_abs = 0;
    int first_nonzero = 0;
    for (int i = 0; i < dim; ++i) {
      const int v = k[static_cast<std::size_t>(i)];
      max_abs = std::max(max_abs, std::abs(v));
      if (first_nonzero == 0 && v != 0) first_nonzero = v;
    }
    // u and -u give the same ratio; keep one of each pair.
    if (max_abs == grid_density && first_nonzero > 0) {
      for (int i = 0; i < dim; ++i) u(i) = static_cast<double>(k[static_cast<std::size_t>(i)]);
      out.grid_value = std::min(out.grid_value, support(points, u) / dual_norm(u, norm));
      ++out.directions;
    }
    int i = 0;
    while (i < dim && k[static_cast<std::size_t>(i)] == grid_density) {
      k[static_cast<std::size_t>(i)] = -grid_density;
      ++i;
    }
    if (i == dim) break;
    ++k[static_cast<std::size_t>(i)];
  }

  if (norm == NormTag::kL1) {
    double exact = std::numeric_limits<double>::infinity();
    for (int j = 0; j < dim; ++j) {
      exact = std::min(exact, membership_scale(points, Vector::Unit(dim, j)).scale);
    }
    out.exact = exact;
  }
  return out;
}

}  // namespace qcm
