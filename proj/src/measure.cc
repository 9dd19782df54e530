#include "qcm/measure.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "qcm/desync.h"
#include "qcm/errors.h"
#include "qcm/geometry.h"
#include "qcm/invariance.h"
#include "qcm/parallel.h"

namespace qcm {
namespace {

constexpr double kStepFloor = 1e-10;
constexpr int kMaxSearchIterations = 20000;
constexpr double kNegligibleSigma = 1e-8;
constexpr double kEdgeTol = 1e-14;

struct LocalResult {
  double value = std::numeric_limits<double>::infinity();
  Vector x;
};

Vector normalized(const Vector& x, NormTag norm) { return x / vector_norm(x, norm); }

// Coordinate pattern search on the sphere: try x +/- s e_j for all j,
// renormalize, move to the best improvement, halve s when nothing improves.
LocalResult pattern_search(const OrbitRadius& radius, Vector x) {
  const NormTag norm = radius.norm();
  x = normalized(x, norm);
  double fx = radius(x);
  double step = 0.5;
  for (int iter = 0; iter < kMaxSearchIterations && step >= kStepFloor && fx > 0.0; ++iter) {
    double best = fx;
    Vector best_x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y(j) += sign * step;
        const double ny = vector_norm(y, norm);
        if (ny == 0.0) continue;
        y /= ny;
        const double fy = radius(y);
        if (fy < best) {
          best = fy;
          best_x = std::move(y);
        }
      }
    }
    if (best < fx) {
      fx = best;
      x = std::move(best_x);
    } else {
      step *= 0.5;
    }
  }
  return {fx, x};
}

std::vector<Vector> search_starts(int n, const SearchConfig& config) {
  std::vector<Vector> starts;
  for (const Vector& v : config.extra_starts) {
    if (v.size() != n) throw InvalidArgument("extra start has the wrong dimension");
    if (v.lpNorm<Eigen::Infinity>() > 0.0) starts.push_back(v);
  }
  // Basis vectors first; minimizers of structured families often sit there.
  for (int k = 0; k < config.starts; ++k) {
    if (k < n) {
      starts.push_back(Vector::Unit(n, k));
      continue;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss;
    Vector v(n);
    do {
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    } while (v.lpNorm<Eigen::Infinity>() == 0.0);
    starts.push_back(v);
  }
  return starts;
}

// Norm bound on a displacement of half-width h in each of m coordinates.
double cell_radius(double h, int m, NormTag norm) {
  switch (norm) {
    case NormTag::kL1:
      return h * m;
    case NormTag::kL2:
      return h * std::sqrt(static_cast<double>(m));
    case NormTag::kLinf:
      return m > 0 ? h : 0.0;
  }
  return h * m;
}

struct Cell {
  int face = 0;
  Vector center;  // coordinates other than `face`
  double half_width = 1.0;
  double lower = 0.0;
};

Vector embed(int face, const Vector& center) {
  const Eigen::Index n = center.size() + 1;
  Vector y(n);
  for (Eigen::Index i = 0, j = 0; i < n; ++i) y(i) = (i == face) ? 1.0 : center(j++);
  return y;
}

double min_offdiagonal(const Matrix& A) {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (i != j && std::abs(A(i, j)) > kEdgeTol) m = std::min(m, std::abs(A(i, j)));
    }
  }
  return m;
}

// alpha * beta^(N-1) with beta = 0 standing for "no off-diagonal entries"
// when N = 1.
StructuredBoundReport finish_structured(StructuredBoundReport r, int n) {
  r.bound = r.alpha * std::pow(r.beta, n - 1);
  r.applicable = true;
  return r;
}

bool rows_match_identity_except(const Matrix& m, Eigen::Index keep) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i == keep) continue;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != (i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

OrbitRadius::OrbitRadius(const MatrixFamily& family, int p, std::size_t cap)
    : products_(enumerate_products(family, p, cap)), norm_(family.norm()), dim_(family.dim()) {
  const Eigen::Index n = dim_;
  stacked_.resize(n * static_cast<Eigen::Index>(products_.items.size()), n);
  for (std::size_t i = 0; i < products_.items.size(); ++i) {
    const Matrix& m = products_.items[i].matrix;
    stacked_.middleRows(n * static_cast<Eigen::Index>(i), n) = m;
    lipschitz_ = std::max(lipschitz_, induced_norm(m, norm_));
  }
}

double OrbitRadius::operator()(const Vector& x) const {
  const Vector images = stacked_ * x;
  const Eigen::Index n = dim_;
  std::vector<Vector> points(products_.items.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i] = images.segment(n * static_cast<Eigen::Index>(i), n);
  }
  return absco_inradius(points, norm_);
}

double OrbitRadius::on_sphere(const Vector& x) const {
  return (*this)(x) / vector_norm(x, norm_);
}

double t_max(const MatrixFamily& family, int p, const Vector& x) {
  if (x.size() != family.dim()) throw InvalidArgument("t_max: dimension mismatch");
  if (x.lpNorm<Eigen::Infinity>() == 0.0) throw InvalidArgument("t_max: x must be nonzero");
  return OrbitRadius(family, p)(x);
}

CertifiedBound certify_lower_bound(const OrbitRadius& radius, double target, double mesh_floor,
                                   std::size_t budget, int threads) {
  const int n = radius.dim();
  const int m = n - 1;
  const NormTag norm = radius.norm();
  const double lip = radius.lipschitz();
  // Covers rounding and the merging of near-duplicate points in the hull. In
  // one dimension the sphere is {-1, 1} and t_max is a plain maximum.
  const double slack = m == 0 ? 0.0 : 1e-7 * lip * n * n;
  const std::size_t children = std::size_t{1} << m;

  CertifiedBound out;
  out.grid.scheme = "adaptive cells on the cube faces x_k = 1, radius in the family norm";
  out.grid.mesh_floor = mesh_floor;
  out.grid.finest_radius = std::numeric_limits<double>::infinity();

  std::vector<Cell> active;
  for (int k = 0; k < n; ++k) active.push_back({k, Vector::Zero(m), 1.0, 0.0});

  double lowest = std::numeric_limits<double>::infinity();
  auto finalize = [&](const Cell& c) {
    lowest = std::min(lowest, c.lower);
    out.grid.finest_radius = std::min(out.grid.finest_radius, cell_radius(c.half_width, m, norm));
    ++out.grid.cells;
  };

  while (!active.empty()) {
    if (out.grid.evaluations + active.size() > budget) {
      out.grid.budget_exhausted = true;
      // Unevaluated cells only know the trivial bound.
      for (Cell& c : active) {
        c.lower = 0.0;
        finalize(c);
      }
      break;
    }
    parallel_for(active.size(), threads, [&](std::size_t i) {
      Cell& c = active[i];
      const Vector y = embed(c.face, c.center);
      const double r = cell_radius(c.half_width, m, norm);
      const double num = radius(y) - lip * r - slack;
      c.lower = std::max(0.0, num / (vector_norm(y, norm) + r));
    });
    out.grid.evaluations += active.size();

    std::vector<Cell> next;
    for (const Cell& c : active) {
      const double r = cell_radius(c.half_width, m, norm);
      if (c.lower >= target || r <= mesh_floor || m == 0) {
        finalize(c);
        continue;
      }
      const double h = 0.5 * c.half_width;
      for (std::size_t mask = 0; mask < children; ++mask) {
        Cell child{c.face, c.center, h, 0.0};
        for (int j = 0; j < m; ++j) child.center(j) += (mask >> j & 1u) ? h : -h;
        next.push_back(std::move(child));
      }
    }
    active = std::move(next);
  }
  out.value = std::isfinite(lowest) ? lowest : 0.0;
  return out;
}

MeasureReport quasi_controllability_measure(const MatrixFamily& family, int p,
                                            const SearchConfig& config) {
  if (p < 0) throw InvalidArgument("depth p must be nonnegative");
  if (config.starts < 1 && config.extra_starts.empty()) {
    throw InvalidArgument("at least one search start is required");
  }
  const int n = family.dim();
  const OrbitRadius radius(family, p, config.product_cap);

  MeasureReport report;
  report.p = p;
  report.norm = family.norm();
  report.lipschitz = radius.lipschitz();
  report.starts = config.starts;
  report.seed = config.seed;
  report.products = radius.products().items.size();
  if (p < n - 1) {
    std::ostringstream msg;
    msg << "p = " << p << " is below N - 1 = " << n - 1
        << "; a zero measure does not imply reducibility";
    report.warnings.push_back(msg.str());
  }

  const std::vector<Vector> starts = search_starts(n, config);
  std::vector<LocalResult> results(starts.size());
  parallel_for(starts.size(), config.threads,
               [&](std::size_t i) { results[i] = pattern_search(radius, starts[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].value < results[best].value) best = i;
  }
  report.sigma_upper = results[best].value;
  report.argmin = results[best].x;

  const bool certify = config.certify.value_or(n <= 3);
  if (!certify) {
    report.grid.scheme = "none";
    report.warnings.push_back("sigma not certified: certification disabled for this dimension");
  } else if (report.sigma_upper <= kNegligibleSigma) {
    report.grid.scheme = "none";
    report.warnings.push_back("sigma not certified: search value is below 1e-8");
  } else {
    const CertifiedBound cert =
        certify_lower_bound(radius, config.certify_target * report.sigma_upper,
                            config.certify_mesh, config.certify_budget, config.threads);
    report.sigma_lower = std::min(cert.value, report.sigma_upper);
    report.grid = cert.grid;
    report.certified = report.sigma_lower > 0.0;
    if (cert.grid.budget_exhausted) {
      report.warnings.push_back("certification budget exhausted");
    }
    if (!report.certified) report.warnings.push_back("sigma not certified: lower bound is 0");
  }
  return report;
}

std::string_view to_string(StructuredBoundReport::Formula formula) {
  return formula == StructuredBoundReport::Formula::kMixture ? "mixture" : "vertex";
}

StructuredBoundReport mixture_lower_bound(const Matrix& A) {
  StructuredBoundReport r;
  r.formula = StructuredBoundReport::Formula::kMixture;
  const int n = static_cast<int>(A.rows());
  const QCVerdict verdict = mixture_qc_criterion(A);
  if (verdict.status != QCStatus::kQuasiControllable) {
    r.reason = verdict.reason;
    return r;
  }
  Eigen::FullPivLU<Matrix> lu(A - Matrix::Identity(n, n));
  if (!lu.isInvertible()) {
    r.reason = "A - I is singular";
    return r;
  }
  r.alpha = 1.0 / (2.0 * n * induced_norm(lu.inverse(), NormTag::kL1));
  const double entry = min_offdiagonal(A);
  r.beta = std::isfinite(entry) ? 0.5 * entry : 0.0;
  return finish_structured(r, n);
}

StructuredBoundReport vertex_lower_bound(const Matrix& A) {
  StructuredBoundReport r;
  r.formula = StructuredBoundReport::Formula::kVertex;
  const int n = static_cast<int>(A.rows());
  const QCVerdict verdict = vertex_qc_criterion(A);
  if (verdict.status != QCStatus::kQuasiControllable) {
    r.reason = verdict.reason;
    return r;
  }
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) {
    r.reason = "A is singular";
    return r;
  }
  r.alpha = 1.0 / (n * induced_norm(lu.inverse(), NormTag::kL1));
  const double entry = min_offdiagonal(A);
  r.beta = std::isfinite(entry) ? entry : 0.0;
  return finish_structured(r, n);
}

std::optional<StructuredBoundReport> structured_bound_for(const MatrixFamily& family) {
  if (family.norm() != NormTag::kL1) return std::nullopt;
  const int n = family.dim();
  if (static_cast<int>(family.size()) == n) {
    bool mixture = true;
    Matrix A(n, n);
    for (int i = 0; i < n && mixture; ++i) {
      mixture = rows_match_identity_except(family[static_cast<std::size_t>(i)], i);
      A.row(i) = family[static_cast<std::size_t>(i)].row(i);
    }
    if (mixture) return mixture_lower_bound(A);
  }
  if (static_cast<int>(family.size()) == n + 1) {
    const Matrix& A = family[0];
    bool vertex = true;
    for (int i = 0; i < n && vertex; ++i) {
      Matrix flipped = A;
      flipped.row(i) *= -1.0;
      vertex = flipped == family[static_cast<std::size_t>(i + 1)];
    }
    if (vertex) return vertex_lower_bound(A);
  }
  return std::nullopt;
}

}  // namespace qcm
