#include "qcm/desync.h"

#include <random>

#include "qcm/errors.h"

namespace qcm {

std::string to_string(const UpdateLaw& law) {
  switch (law.kind) {
    case UpdateLaw::Kind::kRoundRobin:
      return "round_robin";
    case UpdateLaw::Kind::kIidUniform:
      return "iid_uniform(seed=" + std::to_string(law.seed) + ")";
    case UpdateLaw::Kind::kGreedyAdversarial:
      return "greedy_adversarial";
  }
  return "?";
}

UpdateLaw parse_law(std::string_view name, std::uint64_t seed) {
  if (name == "round_robin") return UpdateLaw::round_robin();
  if (name == "iid_uniform" || name == "iid") return UpdateLaw::iid_uniform(seed);
  if (name == "greedy" || name == "greedy_adversarial") return UpdateLaw::greedy_adversarial();
  throw InvalidArgument("unknown update law: " + std::string(name));
}

MatrixFamily mixture_family(const Matrix& A, NormTag norm) {
  if (A.rows() != A.cols()) throw InvalidArgument("mixture_family: matrix must be square");
  const Eigen::Index n = A.rows();
  std::vector<Matrix> members;
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix m = Matrix::Identity(n, n);
    m.row(i) = A.row(i);
    members.push_back(std::move(m));
    labels.push_back("A_" + std::to_string(i + 1));
  }
  return MatrixFamily(std::move(members), norm, std::move(labels));
}

MatrixFamily vertex_family(const Matrix& A, NormTag norm) {
  if (A.rows() != A.cols()) throw InvalidArgument("vertex_family: matrix must be square");
  const Eigen::Index n = A.rows();
  std::vector<Matrix> members{A};
  std::vector<std::string> labels{"A"};
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix m = A;
    m.row(i) *= -1.0;
    members.push_back(std::move(m));
    labels.push_back("D_" + std::to_string(i + 1) + "A");
  }
  return MatrixFamily(std::move(members), norm, std::move(labels));
}

Word law_word(const MatrixFamily& family, const UpdateLaw& law, const Vector& x0, int steps) {
  if (steps < 0) throw InvalidArgument("steps must be nonnegative");
  const int m = static_cast<int>(family.size());
  Word word;
  word.reserve(static_cast<std::size_t>(steps));
  switch (law.kind) {
    case UpdateLaw::Kind::kRoundRobin:
      for (int n = 0; n < steps; ++n) word.push_back(n % m);
      break;
    case UpdateLaw::Kind::kIidUniform: {
      std::mt19937_64 rng(law.seed);
      std::uniform_int_distribution<int> pick(0, m - 1);
      for (int n = 0; n < steps; ++n) word.push_back(pick(rng));
      break;
    }
    case UpdateLaw::Kind::kGreedyAdversarial: {
      Vector x = x0;
      for (int n = 0; n < steps; ++n) {
        int best = 0;
        double best_norm = -1.0;
        Vector best_x;
        for (int i = 0; i < m; ++i) {
          Vector y = family[static_cast<std::size_t>(i)] * x;
          const double v = vector_norm(y, family.norm());
          if (v > best_norm) {
            best_norm = v;
            best = i;
            best_x = std::move(y);
          }
        }
        word.push_back(best);
        x = std::move(best_x);
      }
      break;
    }
  }
  return word;
}

Trajectory simulate_desync(const Matrix& A, const UpdateLaw& law, const Vector& x0, int steps,
                           NormTag norm) {
  const MatrixFamily family = mixture_family(A, norm);
  return simulate(family, law_word(family, law, x0, steps), x0);
}

DesyncBoundReport desync_overshoot_bound(const Matrix& A, int stability_depth) {
  DesyncBoundReport out;
  out.criterion = mixture_qc_criterion(A);
  out.structured = mixture_lower_bound(A);
  out.stability = jsr_bounds(mixture_family(A), stability_depth);
  if (out.structured.applicable && out.structured.bound > 0.0) {
    out.bound = 1.0 / out.structured.bound;
  } else {
    out.reason = out.structured.reason.empty() ? "closed-form bound is zero"
                                               : out.structured.reason;
  }
  return out;
}

}  // namespace qcm
