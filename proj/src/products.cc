#include "qcm/products.h"

#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_map>

#include "qcm/errors.h"

namespace qcm {
namespace {

constexpr double kDedupResolution = 1e-10;

std::size_t value_key(const Matrix& m) {
  std::size_t h = 1469598103934665603ull;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double q = std::nearbyint(m.data()[i] / kDedupResolution);
    if (q == 0.0) q = 0.0;  // fold -0
    std::uint64_t bits = 0;
    std::memcpy(&bits, &q, sizeof bits);
    h ^= static_cast<std::size_t>(bits);
    h *= 1099511628211ull;
  }
  return h;
}

// Value-keyed index over a growing list of products.
class ValueIndex {
 public:
  explicit ValueIndex(NormTag norm) : norm_(norm) {}

  // Returns true if an equal product is already present.
  bool contains(const Matrix& m, const std::vector<LabeledProduct>& items) const {
    auto it = buckets_.find(value_key(m));
    if (it == buckets_.end()) return false;
    for (std::size_t index : it->second) {
      if (same_product(items[index].matrix, m, norm_)) return true;
    }
    return false;
  }

  void add(const Matrix& m, std::size_t index) { buckets_[value_key(m)].push_back(index); }

 private:
  NormTag norm_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets_;
};

[[noreturn]] void throw_cap(std::size_t cap, int depth) {
  std::ostringstream msg;
  msg << "product enumeration exceeded the cap of " << cap << " items at depth " << depth;
  throw EnumerationCapExceeded(msg.str());
}

}  // namespace

bool same_product(const Matrix& a, const Matrix& b, NormTag norm) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff <= kDedupResolution) return true;
  const double scale = std::max({1.0, induced_norm(a, norm), induced_norm(b, norm)});
  return diff <= kDedupResolution * scale;
}

ProductSet enumerate_products(const MatrixFamily& family, int depth, std::size_t cap) {
  if (depth < 0) throw InvalidArgument("product depth must be nonnegative");
  ProductSet out;
  out.depth = depth;
  ValueIndex index(family.norm());
  const int n = family.dim();
  out.items.push_back({Matrix::Identity(n, n), {}});
  index.add(out.items.back().matrix, 0);

  std::size_t frontier_begin = 0;
  std::size_t frontier_end = 1;
  for (int level = 1; level <= depth && frontier_begin < frontier_end; ++level) {
    for (std::size_t f = frontier_begin; f < frontier_end; ++f) {
      for (std::size_t i = 0; i < family.size(); ++i) {
        Matrix next = family[i] * out.items[f].matrix;
        if (index.contains(next, out.items)) continue;
        if (out.items.size() >= cap) throw_cap(cap, level);
        Word word = out.items[f].word;
        word.push_back(static_cast<int>(i));
        index.add(next, out.items.size());
        out.items.push_back({std::move(next), std::move(word)});
      }
    }
    frontier_begin = frontier_end;
    frontier_end = out.items.size();
  }
  return out;
}

std::vector<Vector> orbit_points(const ProductSet& products, const Vector& x) {
  std::vector<Vector> points;
  points.reserve(products.items.size());
  for (const auto& item : products.items) {
    if (item.matrix.cols() != x.size()) throw InvalidArgument("orbit_points: dimension mismatch");
    points.push_back(item.matrix * x);
  }
  return points;
}

void sweep_levels(const MatrixFamily& family, int max_length, std::size_t level_cap,
                  const std::function<void(const ProductLevel&)>& visit) {
  if (max_length < 0) throw InvalidArgument("sweep depth must be nonnegative");
  const int n = family.dim();
  ProductLevel current;
  current.length = 0;
  current.items.push_back({Matrix::Identity(n, n), {}});
  visit(current);
  for (int level = 1; level <= max_length; ++level) {
    ProductLevel next;
    next.length = level;
    ValueIndex index(family.norm());
    for (const auto& item : current.items) {
      for (std::size_t i = 0; i < family.size(); ++i) {
        Matrix product = family[i] * item.matrix;
        if (index.contains(product, next.items)) continue;
        if (next.items.size() >= level_cap) throw_cap(level_cap, level);
        Word word = item.word;
        word.push_back(static_cast<int>(i));
        index.add(product, next.items.size());
        next.items.push_back({std::move(product), std::move(word)});
      }
    }
    current = std::move(next);
    visit(current);
  }
}

}  // namespace qcm
