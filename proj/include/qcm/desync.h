#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qcm/core.h"
#include "qcm/dynamics.h"
#include "qcm/invariance.h"
#include "qcm/measure.h"

namespace qcm {

/// Rule choosing the updated coordinate i(n) at each step.
struct UpdateLaw {
  enum class Kind { kRoundRobin, kIidUniform, kGreedyAdversarial };
  Kind kind = Kind::kRoundRobin;
  std::uint64_t seed = 0;  // kIidUniform only

  static UpdateLaw round_robin() { return {Kind::kRoundRobin, 0}; }
  static UpdateLaw iid_uniform(std::uint64_t seed) { return {Kind::kIidUniform, seed}; }
  static UpdateLaw greedy_adversarial() { return {Kind::kGreedyAdversarial, 0}; }
};

std::string to_string(const UpdateLaw& law);
/// "round_robin", "iid_uniform" (seed from the second argument) or "greedy".
UpdateLaw parse_law(std::string_view name, std::uint64_t seed);

/// A_i keeps row i of A and takes every other row from the identity.
MatrixFamily mixture_family(const Matrix& A, NormTag norm = NormTag::kL1);

/// {A, D_1 A, ..., D_N A} where D_i flips the sign of coordinate i.
MatrixFamily vertex_family(const Matrix& A, NormTag norm = NormTag::kL1);

/// Switching word of length `steps` produced by `law` on `family` from x0.
/// Round robin cycles 0..M-1; greedy picks argmax_i ||A_i x(n)|| with the
/// lowest index on ties.
Word law_word(const MatrixFamily& family, const UpdateLaw& law, const Vector& x0, int steps);

/// x(n+1) = A_{i(n)} x(n) over the mixture family of A.
Trajectory simulate_desync(const Matrix& A, const UpdateLaw& law, const Vector& x0, int steps,
                           NormTag norm = NormTag::kL1);

struct DesyncBoundReport {
  QCVerdict criterion;
  StructuredBoundReport structured;
  double bound = std::numeric_limits<double>::infinity();
  JsrBounds stability;
  std::string reason;
};

/// (alpha beta^(N-1))^-1 for the mixture system of A, with the stability
/// probe of its mixture family at depth `stability_depth` attached.
DesyncBoundReport desync_overshoot_bound(const Matrix& A, int stability_depth = 4);

}  // namespace qcm
