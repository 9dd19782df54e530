#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qcm/core.h"
#include "qcm/measure.h"

namespace qcm {

/// x(n+1) = A_{word(n)} x(n) for n = 0..T-1.
struct Trajectory {
  std::vector<Vector> states;
  Word word;
  NormTag norm = NormTag::kL1;
  double peak = 0.0;
  std::size_t peak_index = 0;
};

Trajectory simulate(const MatrixFamily& family, const Word& word, const Vector& x0);

enum class Stability { kCertifiedStable, kCertifiedBounded, kCertifiedUnstable, kInconclusive };

std::string_view to_string(Stability s);

/// Norm and spectral-radius probes of the joint spectral radius.
///
/// lower = max over products P with 1 <= |P| <= k of rho(P)^(1/|P|).
/// upper = min over 1 <= l <= k and over the norms {family norm, L1, L2,
/// Linf} of max_{|P| = l} ||P||^(1/l).
/// upper < 1 certifies exponential stability. Independently, if every
/// product of some length l has norm at most 1 in one of those norms, all
/// trajectories are bounded with chi <= c max_{j < l} max_{|P| = j} ||P||,
/// c converting that norm to the family norm (kCertifiedBounded). For a
/// single matrix the spectral radius decides: rho < 1 is stable.
struct JsrBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  int upper_length = 0;
  NormTag upper_norm = NormTag::kL1;
  std::optional<int> bounded_length;
  std::optional<NormTag> bounded_norm;
  double chi_upper = std::numeric_limits<double>::infinity();
  int depth = 0;
  Stability verdict = Stability::kInconclusive;
};

JsrBounds jsr_bounds(const MatrixFamily& family, int k, std::size_t level_cap = kDefaultProductCap);

inline constexpr std::size_t kDefaultWordCap = 50'000'000;

struct OvershootReport {
  int T = 0;
  double chi_T = 1.0;
  Word witness_word;
  Vector witness_x0;  // unit vector attaining chi_T on the witness product
  bool exhaustive = true;  // false when per-level deduplication was used
};

/// chi_T = max over products of at most T factors (identity included) of the
/// induced norm. Every word is visited while the word count stays below
/// `word_cap`; beyond that, levels are deduplicated by value. Ties go to the
/// shorter word, then the lexicographically smaller one.
OvershootReport overshoot_bruteforce(const MatrixFamily& family, int T,
                                     std::size_t word_cap = kDefaultWordCap);

/// Every product of at most T factors whose induced norm exceeds `threshold`,
/// in shortlex order, at most `limit` of them.
std::vector<Word> words_exceeding(const MatrixFamily& family, int T, double threshold,
                                  std::size_t limit);

struct BoundReport {
  int p = 0;
  MeasureReport measure;
  std::optional<StructuredBoundReport> structured;
  double sigma_used = 0.0;
  std::string source;  // "certified grid", "closed form" or "none"
  double apriori_bound = std::numeric_limits<double>::infinity();
  JsrBounds stability;
  bool conditional = true;  // stability not certified
  std::vector<std::string> warnings;
};

/// 1/sigma with sigma the larger of the certified grid bound and, for mixture
/// and vertex families, the closed-form bound.
BoundReport overshoot_bound(const MatrixFamily& family, int p, const SearchConfig& config = {},
                            int stability_depth = 4);

/// 1 - max_{|w| = 1} gamma |c^T (w I - A)^-1 b| on a grid of `grid` angles
/// refined three times by a factor of 10 around the maximizer. Throws
/// PoleOnCircle when A has an eigenvalue within 1e-9 of the unit circle.
double circle_criterion_margin(const Matrix& A, const Vector& b, const Vector& c, double gamma,
                               int grid = 720);

struct WitnessBlock {
  Word selector;       // word of L, applied first
  std::size_t end = 0;  // q_m, index of z(m) in the trajectory
  double ratio = 0.0;   // ||z(m)|| / ||z(m-1)||
};

struct InstabilityWitness {
  double mu = 1.0;
  double sigma = 0.0;
  Word base_word;
  Trajectory trajectory;
  std::vector<WitnessBlock> blocks;
  int max_block_length = 0;
  double kappa = 0.0;
  double lambda = 1.0;
  bool growth_verified = false;
};

/// Builds a trajectory with ||z(m)|| >= mu^m ||z(0)|| at block ends. R is the
/// product of `base_word`; z(m+1) = R L z(m) with L in A_p maximizing
/// ||R L z(m)||. Requires ||R x*|| > (mu / sigma) ||x*|| for x* = seed_x and a
/// certified lower bound sigma on sigma_p.
InstabilityWitness instability_witness(const MatrixFamily& family, int p, double sigma,
                                       const Vector& seed_x, const Word& base_word, double mu,
                                       const Vector& x0, int blocks);

/// Witness seeded by a trajectory that breaks ||x(n)|| <= ||x(0)|| / sigma:
/// mu is the geometric mean of 1 and sigma ||R x0|| / ||x0||.
InstabilityWitness witness_from_violation(const MatrixFamily& family, int p, double sigma,
                                          const Word& word, const Vector& x0, int blocks);

}  // namespace qcm
