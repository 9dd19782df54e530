#include "qcm/dynamics.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "qcm/errors.h"
#include "qcm/parallel.h"
#include "qcm/products.h"

namespace qcm {
namespace {

// Shortlex order on words.
bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct Best {
  double value = -1.0;
  Word word;

  void offer(double v, const Word& w) {
    if (v > value || (v == value && shortlex_less(w, word))) {
      value = v;
      word = w;
    }
  }
};

// Sum_{k <= T} M^k, saturating at limit + 1.
std::size_t word_count(std::size_t m, int T, std::size_t limit) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (int k = 0; k <= T; ++k) {
    total += level;
    if (total > limit) return limit + 1;
    if (m > 1 && level > limit / m) {
      if (k < T) return limit + 1;
    } else {
      level *= m;
    }
  }
  return total;
}

void dfs_max(const MatrixFamily& family, int remaining, const Matrix& product, Word& word,
             Best& best) {
  best.offer(induced_norm(product, family.norm()), word);
  if (remaining == 0) return;
  for (std::size_t i = 0; i < family.size(); ++i) {
    word.push_back(static_cast<int>(i));
    dfs_max(family, remaining - 1, family[i] * product, word, best);
    word.pop_back();
  }
}

void collect_level(const MatrixFamily& family, int remaining, const Matrix& product, Word& word,
                   double threshold, std::vector<Word>& out) {
  if (remaining == 0) {
    if (induced_norm(product, family.norm()) > threshold) out.push_back(word);
    return;
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    word.push_back(static_cast<int>(i));
    collect_level(family, remaining - 1, family[i] * product, word, threshold, out);
    word.pop_back();
  }
}

std::vector<NormTag> probe_norms(NormTag family_norm) {
  std::vector<NormTag> norms{family_norm};
  for (NormTag t : {NormTag::kL1, NormTag::kL2, NormTag::kLinf}) {
    if (t != family_norm) norms.push_back(t);
  }
  return norms;
}

double transfer_gain(const Matrix& A, const Vector& b, const Vector& c, double theta) {
  using C = std::complex<double>;
  const Eigen::Index n = A.rows();
  Eigen::MatrixXcd shifted = -A.cast<C>();
  shifted.diagonal().array() += std::polar(1.0, theta);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  if (std::abs(lu.determinant()) <= 1e-12) {
    throw PoleOnCircle("resolvent is singular on the unit circle");
  }
  const Eigen::VectorXcd z = lu.solve(b.cast<C>());
  C s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += c(i) * z(i);
  return std::abs(s);
}

}  // namespace

Trajectory simulate(const MatrixFamily& family, const Word& word, const Vector& x0) {
  if (x0.size() != family.dim()) throw InvalidArgument("simulate: dimension mismatch");
  Trajectory t;
  t.norm = family.norm();
  t.word = word;
  t.states.reserve(word.size() + 1);
  t.states.push_back(x0);
  t.peak = vector_norm(x0, t.norm);
  for (int i : word) {
    if (i < 0 || static_cast<std::size_t>(i) >= family.size()) {
      throw InvalidArgument("simulate: member index out of range");
    }
    t.states.push_back(family[static_cast<std::size_t>(i)] * t.states.back());
    const double v = vector_norm(t.states.back(), t.norm);
    if (v > t.peak) {
      t.peak = v;
      t.peak_index = t.states.size() - 1;
    }
  }
  return t;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::kCertifiedStable:
      return "certified_stable";
    case Stability::kCertifiedBounded:
      return "certified_bounded";
    case Stability::kCertifiedUnstable:
      return "certified_unstable";
    case Stability::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

JsrBounds jsr_bounds(const MatrixFamily& family, int k, std::size_t level_cap) {
  if (k < 1) throw InvalidArgument("jsr_bounds: depth must be at least 1");
  const std::vector<NormTag> norms = probe_norms(family.norm());
  const int n = family.dim();
  JsrBounds out;
  out.depth = k;
  // level_max[l][j]: max norm of products of length l in norms[j].
  std::vector<std::vector<double>> level_max;
  sweep_levels(family, k, level_cap, [&](const ProductLevel& level) {
    std::vector<double> maxima(norms.size(), 0.0);
    for (const auto& item : level.items) {
      for (std::size_t j = 0; j < norms.size(); ++j) {
        maxima[j] = std::max(maxima[j], induced_norm(item.matrix, norms[j]));
      }
      if (level.length > 0) {
        out.lower = std::max(out.lower, std::pow(spectral_radius(item.matrix),
                                                 1.0 / level.length));
      }
    }
    level_max.push_back(std::move(maxima));
  });

  for (int l = 1; l < static_cast<int>(level_max.size()); ++l) {
    for (std::size_t j = 0; j < norms.size(); ++j) {
      const double v = level_max[static_cast<std::size_t>(l)][j];
      const double root = std::pow(v, 1.0 / l);
      if (root < out.upper) {
        out.upper = root;
        out.upper_length = l;
        out.upper_norm = norms[j];
      }
      if (!out.bounded_length && v <= 1.0) {
        out.bounded_length = l;
        out.bounded_norm = norms[j];
        double prefix = 0.0;
        for (int q = 0; q < l; ++q) prefix = std::max(prefix, level_max[static_cast<std::size_t>(q)][j]);
        out.chi_upper = induced_norm_equivalence(family.norm(), norms[j], n) * prefix;
      }
    }
  }

  if (family.size() == 1) {
    const double rho = spectral_radius(family[0]);
    out.verdict = rho < 1.0   ? Stability::kCertifiedStable
                  : rho > 1.0 ? Stability::kCertifiedUnstable
                  : out.bounded_length ? Stability::kCertifiedBounded
                                       : Stability::kInconclusive;
  } else if (out.upper < 1.0) {
    out.verdict = Stability::kCertifiedStable;
  } else if (out.lower > 1.0 + 1e-12) {
    out.verdict = Stability::kCertifiedUnstable;
  } else if (out.bounded_length) {
    out.verdict = Stability::kCertifiedBounded;
  }
  return out;
}

OvershootReport overshoot_bruteforce(const MatrixFamily& family, int T, std::size_t word_cap) {
  if (T < 0) throw InvalidArgument("overshoot_bruteforce: depth must be nonnegative");
  const int n = family.dim();
  OvershootReport out;
  out.T = T;
  Best best;
  if (word_count(family.size(), T, word_cap) <= word_cap) {
    const Matrix identity = Matrix::Identity(n, n);
    best.offer(1.0, {});
    std::vector<Best> branch(family.size());
    if (T > 0) {
      parallel_for(family.size(), 0, [&](std::size_t i) {
        Word word{static_cast<int>(i)};
        dfs_max(family, T - 1, family[i], word, branch[i]);
      });
    }
    for (const Best& b : branch) {
      if (b.value >= 0.0) best.offer(b.value, b.word);
    }
  } else {
    out.exhaustive = false;
    sweep_levels(family, T, kDefaultProductCap, [&](const ProductLevel& level) {
      for (const auto& item : level.items) best.offer(induced_norm(item.matrix, family.norm()), item.word);
    });
  }
  out.chi_T = best.value;
  out.witness_word = best.word;
  out.witness_x0 = norm_attaining_vector(word_product(family, best.word), family.norm());
  return out;
}

std::vector<Word> words_exceeding(const MatrixFamily& family, int T, double threshold,
                                  std::size_t limit) {
  std::vector<Word> out;
  const int n = family.dim();
  for (int len = 0; len <= T && out.size() < limit; ++len) {
    Word word;
    collect_level(family, len, Matrix::Identity(n, n), word, threshold, out);
  }
  if (out.size() > limit) out.resize(limit);
  return out;
}

BoundReport overshoot_bound(const MatrixFamily& family, int p, const SearchConfig& config,
                            int stability_depth) {
  BoundReport out;
  out.p = p;
  out.measure = quasi_controllability_measure(family, p, config);
  out.structured = structured_bound_for(family);
  out.warnings = out.measure.warnings;
  out.sigma_used = out.measure.sigma_lower;
  out.source = out.sigma_used > 0.0 ? "certified grid" : "none";
  if (out.structured && out.structured->applicable && out.structured->bound > out.sigma_used) {
    out.sigma_used = out.structured->bound;
    out.source = "closed form";
  }
  if (out.sigma_used > 0.0) out.apriori_bound = 1.0 / out.sigma_used;
  out.stability = jsr_bounds(family, stability_depth);
  switch (out.stability.verdict) {
    case Stability::kCertifiedStable:
    case Stability::kCertifiedBounded:
      out.conditional = false;
      break;
    case Stability::kCertifiedUnstable:
      out.warnings.push_back("family is certified unstable; the bound does not apply");
      break;
    case Stability::kInconclusive:
      out.warnings.push_back("stability inconclusive; the bound is conditional");
      break;
  }
  return out;
}

double circle_criterion_margin(const Matrix& A, const Vector& b, const Vector& c, double gamma,
                               int grid) {
  if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() != c.size()) {
    throw InvalidArgument("circle_criterion_margin: dimension mismatch");
  }
  if (gamma < 0.0) throw InvalidArgument("circle_criterion_margin: gamma must be nonnegative");
  if (grid < 8) throw InvalidArgument("circle_criterion_margin: grid must be at least 8");
  Eigen::EigenSolver<Matrix> es(A, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(std::abs(es.eigenvalues()(i)) - 1.0) <= 1e-9) {
      std::ostringstream msg;
      msg << "eigenvalue " << es.eigenvalues()(i) << " lies on the unit circle";
      throw PoleOnCircle(msg.str());
    }
  }
  if (gamma == 0.0) return 1.0;
  const double two_pi = 2.0 * std::acos(-1.0);
  double h = two_pi / grid;
  double best_theta = 0.0;
  double best = -1.0;
  for (int i = 0; i < grid; ++i) {
    const double theta = h * i;
    const double g = transfer_gain(A, b, c, theta);
    if (g > best) {
      best = g;
      best_theta = theta;
    }
  }
  for (int level = 0; level < 3; ++level) {
    const double center = best_theta;
    for (int i = -10; i <= 10; ++i) {
      const double theta = center + i * h / 10.0;
      const double g = transfer_gain(A, b, c, theta);
      if (g > best) {
        best = g;
        best_theta = theta;
      }
    }
    h /= 10.0;
  }
  return 1.0 - gamma * best;
}

InstabilityWitness instability_witness(const MatrixFamily& family, int p, double sigma,
                                       const Vector& seed_x, const Word& base_word, double mu,
                                       const Vector& x0, int blocks) {
  const NormTag norm = family.norm();
  if (!(mu > 1.0)) throw InvalidArgument("instability_witness: mu must exceed 1");
  if (!(sigma > 0.0)) throw PreconditionFailed("instability_witness: sigma must be positive");
  if (blocks < 0) throw InvalidArgument("instability_witness: blocks must be nonnegative");
  if (seed_x.size() != family.dim() || x0.size() != family.dim()) {
    throw InvalidArgument("instability_witness: dimension mismatch");
  }
  if (x0.lpNorm<Eigen::Infinity>() == 0.0 || seed_x.lpNorm<Eigen::Infinity>() == 0.0) {
    throw InvalidArgument("instability_witness: vectors must be nonzero");
  }
  const Matrix R = word_product(family, base_word);
  const double seed_gain = vector_norm(R * seed_x, norm) / vector_norm(seed_x, norm);
  if (!(seed_gain > mu / sigma)) {
    std::ostringstream msg;
    msg << "precondition failed: ||R x*|| / ||x*|| = " << seed_gain
        << " does not exceed mu / sigma = " << mu / sigma;
    throw PreconditionFailed(msg.str());
  }

  const ProductSet selectors = enumerate_products(family, p);
  std::vector<Matrix> candidates;
  candidates.reserve(selectors.items.size());
  for (const auto& item : selectors.items) candidates.push_back(R * item.matrix);

  InstabilityWitness out;
  out.mu = mu;
  out.sigma = sigma;
  out.base_word = base_word;
  Word full;
  Vector z = x0;
  double z_norm = vector_norm(z, norm);
  for (int m = 0; m < blocks; ++m) {
    std::size_t pick = 0;
    double pick_value = -1.0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double v = vector_norm(candidates[k] * z, norm);
      if (v > pick_value) {
        pick_value = v;
        pick = k;
      }
    }
    WitnessBlock block;
    block.selector = selectors.items[pick].word;
    Word step_word = block.selector;
    step_word.insert(step_word.end(), base_word.begin(), base_word.end());
    for (int i : step_word) z = family[static_cast<std::size_t>(i)] * z;
    const double next_norm = vector_norm(z, norm);
    if (!(next_norm >= mu * z_norm)) {
      std::ostringstream msg;
      msg << "witness search failed at block " << m << ": best ratio " << next_norm / z_norm
          << " < mu = " << mu << "; the sigma certificate is inconsistent";
      throw Error(msg.str());
    }
    block.ratio = next_norm / z_norm;
    z_norm = next_norm;
    full.insert(full.end(), step_word.begin(), step_word.end());
    block.end = full.size();
    out.max_block_length = std::max(out.max_block_length, static_cast<int>(step_word.size()));
    out.blocks.push_back(std::move(block));
  }
  out.trajectory = simulate(family, full, x0);

  const double start = vector_norm(x0, norm);
  bool ok = true;
  double growth = 1.0;
  for (const WitnessBlock& b : out.blocks) {
    growth *= mu;
    ok = ok && vector_norm(out.trajectory.states[b.end], norm) >= growth * start;
  }
  if (out.max_block_length > 0) {
    const double k_norm = std::max(1.0, family.max_member_norm());
    out.lambda = std::pow(mu, 1.0 / out.max_block_length);
    out.kappa = std::pow(k_norm, -(out.max_block_length - 1));
    for (std::size_t i = 0; i < out.trajectory.states.size(); ++i) {
      const double floor =
          out.kappa * std::pow(out.lambda, static_cast<double>(i)) * start * (1.0 - 1e-12);
      ok = ok && vector_norm(out.trajectory.states[i], norm) >= floor;
    }
  }
  out.growth_verified = ok;
  return out;
}

InstabilityWitness witness_from_violation(const MatrixFamily& family, int p, double sigma,
                                          const Word& word, const Vector& x0, int blocks) {
  const double gain = vector_norm(word_product(family, word) * x0, family.norm()) /
                      vector_norm(x0, family.norm());
  if (!(sigma > 0.0) || !(sigma * gain > 1.0)) {
    std::ostringstream msg;
    msg << "precondition failed: ||R x0|| / ||x0|| = " << gain
        << " does not exceed 1 / sigma = " << (sigma > 0.0 ? 1.0 / sigma : 0.0);
    throw PreconditionFailed(msg.str());
  }
  const double mu = std::sqrt(sigma * gain);
  return instability_witness(family, p, sigma, x0, word, mu, x0, blocks);
}

}  // namespace qcm
