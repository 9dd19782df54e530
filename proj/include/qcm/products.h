#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qcm/core.h"

namespace qcm {

inline constexpr std::size_t kDefaultProductCap = 200000;

struct LabeledProduct {
  Matrix matrix;
  Word word;
  int length() const { return static_cast<int>(word.size()); }
};

/// The set of distinct products of at most `depth` factors from the family
/// together with I. Items are in shortlex order of their words; each matrix
/// value appears once, under its shortest (then lexicographically smallest)
/// word.
struct ProductSet {
  int depth = 0;
  std::vector<LabeledProduct> items;
};

/// Entry-wise equality within 1e-10 * max(1, ||a||, ||b||).
bool same_product(const Matrix& a, const Matrix& b, NormTag norm);

/// Breadth-first enumeration with value-keyed deduplication. Throws
/// EnumerationCapExceeded when more than `cap` distinct items would be kept.
ProductSet enumerate_products(const MatrixFamily& family, int depth,
                              std::size_t cap = kDefaultProductCap);

/// {L x : L in products}, in product order. Equal points are kept.
std::vector<Vector> orbit_points(const ProductSet& products, const Vector& x);

/// All products of exactly `length` factors, deduplicated within the level
/// only. Unlike ProductSet, a value reached by a shorter word is kept here.
struct ProductLevel {
  int length = 0;
  std::vector<LabeledProduct> items;
};

/// Visits levels 0..max_length in order. Throws EnumerationCapExceeded when a
/// level holds more than `level_cap` distinct products.
void sweep_levels(const MatrixFamily& family, int max_length, std::size_t level_cap,
                  const std::function<void(const ProductLevel&)>& visit);

}  // namespace qcm
