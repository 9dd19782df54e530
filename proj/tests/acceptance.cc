// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "oracles.h"
#include "qcm/cli.h"
#include "qcm/desync.h"
#include "qcm/dynamics.h"
#include "qcm/errors.h"
#include "qcm/geometry.h"
#include "qcm/invariance.h"
#include "qcm/measure.h"
#include "qcm/robustness.h"

namespace {

using namespace qcm;

struct Result {
  bool pass = true;
  std::string detail;
};

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Dense A with entries in [-1, 1] and max absolute row sum `row_sum`.
Matrix random_contraction(std::mt19937_64& rng, int n, double row_sum) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = u(rng);
  const double s = A.cwiseAbs().rowwise().sum().maxCoeff();
  return A * (row_sum / s);
}

// Random mixture family with a passing criterion and a certified bounded
// or stable verdict.
struct MixtureCase {
  Matrix A;
  MatrixFamily family;
  JsrBounds jsr;
};

std::vector<MixtureCase> mixture_corpus(std::uint64_t seed, int count, int* attempts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rs(0.5, 1.3);
  std::vector<MixtureCase> out;
  *attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    ++*attempts;
    const int n = 2 + static_cast<int>(out.size() % 2);
    const Matrix A = random_contraction(rng, n, rs(rng));
    if (mixture_qc_criterion(A).status != QCStatus::kQuasiControllable) continue;
    MatrixFamily f = mixture_family(A);
    JsrBounds j = jsr_bounds(f, 4);
    if (j.verdict != Stability::kCertifiedStable && j.verdict != Stability::kCertifiedBounded) continue;
    out.push_back({A, std::move(f), j});
  }
  return out;
}

Result overshoot_suite() {
  int attempts = 0;
  const auto corpus = mixture_corpus(1001, 50, &attempts);
  Result r;
  int stable = 0, bounded = 0;
  double worst = 0;
  for (const auto& c : corpus) {
    (c.jsr.verdict == Stability::kCertifiedStable ? stable : bounded)++;
    const int n = c.family.dim();
    SearchConfig cfg;
    cfg.certify = true;
    const MeasureReport m = quasi_controllability_measure(c.family, n, cfg);
    const double chi = overshoot_bruteforce(c.family, 12).chi_T;
    if (!(m.sigma_lower > 0)) {
      r.pass = false;
      r.detail += " uncertified sigma;";
      continue;
    }
    worst = std::max(worst, chi * m.sigma_lower);
    if (chi > (1.0 / m.sigma_lower) * (1 + 1e-6)) r.pass = false;
  }
  std::ostringstream s;
  s << corpus.size() << " mixture families (" << attempts << " drawn; jsr verdicts: " << stable
    << " stable, " << bounded << " bounded), max chi_12 * sigma_lower = " << worst << r.detail;
  r.detail = s.str();
  return r;
}

Matrix random_orthogonal(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(rng, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

Result measure_sign_suite() {
  Result r;
  std::mt19937_64 rng(2002);
  double worst_upper = 0;
  int reducible_ok = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 2;
    const int d = 1 + k % (n - 1);
    const Matrix q = random_orthogonal(rng, n);
    std::vector<Matrix> ms;
    for (int i = 0; i < 2; ++i) {
      Matrix b = oracle::random_matrix(rng, n, 0.7);
      b.bottomLeftCorner(n - d, d).setZero();
      ms.push_back(q * b * q.transpose());
    }
    const MatrixFamily f(ms, NormTag::kL1);
    // start near the invariant span of the first d columns of q
    Vector x = q.leftCols(d) * oracle::random_vector(rng, d);
    x += 1e-6 * x.norm() * oracle::random_vector(rng, n);
    SearchConfig cfg;
    cfg.starts = 8;
    cfg.certify = true;
    cfg.extra_starts = {x};
    const MeasureReport m = quasi_controllability_measure(f, n - 1, cfg);
    worst_upper = std::max(worst_upper, m.sigma_upper);
    if (m.sigma_lower == 0.0 && m.sigma_upper < 1e-8) ++reducible_ok;
  }
  int attempts = 0;
  const auto corpus = mixture_corpus(2003, 50, &attempts);
  int qc_ok = 0;
  double min_lower = std::numeric_limits<double>::infinity();
  for (const auto& c : corpus) {
    const int n = c.family.dim();
    const double bound = mixture_lower_bound(c.A).bound;
    const OrbitRadius radius(c.family, n);
    SearchConfig cfg;
    cfg.certify = true;
    cfg.certify_mesh = bound / (4 * radius.lipschitz());
    const MeasureReport m = quasi_controllability_measure(c.family, n, cfg);
    min_lower = std::min(min_lower, m.sigma_lower);
    if (m.sigma_lower > 0) ++qc_ok;
  }
  r.pass = reducible_ok == 50 && qc_ok == 50;
  std::ostringstream s;
  s << "reducible: " << reducible_ok << "/50 with sigma_lower = 0 and t_max < 1e-8 (max sigma_upper "
    << worst_upper << "); quasi-controllable: " << qc_ok << "/50 with sigma_lower > 0 (min "
    << min_lower << ")";
  r.detail = s.str();
  return r;
}

bool kalman_oracle(const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(A.rows());
  Matrix k(n, n);
  Vector col = b;
  for (int i = 0; i < n; ++i) {
    k.col(i) = col;
    col = A * col;
  }
  return oracle::rank(k) == n;
}

Result rank_one_equivalence() {
  std::mt19937_64 rng(3003);
  int agree = 0, inconclusive = 0, disagree = 0, negatives = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 5;
    Matrix A = oracle::random_matrix(rng, n);
    Vector b = oracle::random_vector(rng, n);
    Vector c = oracle::random_vector(rng, n);
    if (n > 1 && k % 4 == 1) {
      // b inside the invariant span{e_1}
      A.col(0).tail(n - 1).setZero();
      b = Vector::Unit(n, 0) * b(0);
    } else if (n > 1 && k % 4 == 3) {
      // c orthogonal to the invariant span{e_1}
      A.col(0).tail(n - 1).setZero();
      c(0) = 0;
    }
    const bool kalman = kalman_controllable(A, b) && kalman_observable(A, c);
    const bool oracle_kalman = kalman_oracle(A, b) && kalman_oracle(A.transpose(), c);
    if (!oracle_kalman) ++negatives;
    const QCVerdict v = is_quasi_controllable(rank_one_family(A, b, c));
    if (kalman != oracle_kalman) ++disagree;
    if (v.status == QCStatus::kInconclusive) {
      ++inconclusive;
      continue;
    }
    if ((v.status == QCStatus::kQuasiControllable) == kalman) {
      ++agree;
    } else {
      ++disagree;
    }
  }
  Result r;
  r.pass = disagree == 0 && inconclusive < 10;
  std::ostringstream s;
  s << agree << " agree, " << disagree << " disagree, inconclusive rate " << inconclusive
    << "% (" << negatives << " non-Kalman cases)";
  r.detail = s.str();
  return r;
}

Result closed_forms() {
  const Matrix A = m2(0, 0.5, 0.5, 0);
  const auto mb = mixture_lower_bound(A);
  const auto ms = quasi_controllability_measure(mixture_family(A), 2);
  const Matrix S = m2(0, 1, 1, 0);
  const auto vb = vertex_lower_bound(S);
  const auto vs = quasi_controllability_measure(vertex_family(S), 2);
  Result r;
  r.pass = std::abs(mb.alpha - 0.125) < 1e-15 && std::abs(mb.beta - 0.25) < 1e-15 &&
           std::abs(mb.bound - 1.0 / 32) < 1e-15 && ms.sigma_upper >= 1.0 / 32 - 1e-9 &&
           std::abs(vb.bound - 0.5) < 1e-15 && vs.sigma_upper >= 0.5 - 1e-9;
  std::ostringstream s;
  s << "mixture alpha " << mb.alpha << " beta " << mb.beta << " bound " << mb.bound
    << ", sigma_2 in [" << ms.sigma_lower << ", " << ms.sigma_upper << "]; vertex bound " << vb.bound
    << ", sigma_2 in [" << vs.sigma_lower << ", " << vs.sigma_upper << "]";
  r.detail = s.str();
  return r;
}

Result geometry_oracles() {
  std::mt19937_64 rng(5005);
  double worst_lp = 0;
  bool grid_ok = true;
  int grid_sets = 0;
  const NormTag norms[] = {NormTag::kL1, NormTag::kL2, NormTag::kLinf};
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 4;
    std::vector<Vector> pts;
    for (int i = 0; i < n + k % 5; ++i) pts.push_back(oracle::random_vector(rng, n));
    const SymmetricPolytope poly = absco_hull(pts);
    const auto lp = inscribed_radius_oracle(pts, NormTag::kL1, 1);
    worst_lp = std::max(worst_lp, std::abs(*lp.exact - inscribed_radius(poly, NormTag::kL1)));
    if (n >= 2 && n <= 3) {
      ++grid_sets;
      for (NormTag norm : norms) {
        const double facet = inscribed_radius(poly, norm);
        double prev = std::numeric_limits<double>::infinity();
        for (int g = 1; g <= (n == 2 ? 128 : 16); g *= 2) {
          const double grid = inscribed_radius_oracle(pts, norm, g).grid_value;
          if (grid < facet - 1e-12 || grid > prev + 1e-12) grid_ok = false;
          prev = grid;
        }
      }
    }
  }
  Result r;
  r.pass = worst_lp <= 1e-9 && grid_ok;
  std::ostringstream s;
  s << "200 point sets, max |LP - facet| = " << worst_lp << "; grid oracle bounds and monotone on "
    << grid_sets << " sets x 3 norms: " << (grid_ok ? "yes" : "no");
  r.detail = s.str();
  return r;
}

Result counterexamples() {
  Result r;
  const MatrixFamily E({m2(1, 1, 0, 1)}, NormTag::kL1);
  bool e_ok = true;
  for (int T = 0; T <= 50; ++T) e_ok = e_ok && overshoot_bruteforce(E, T).chi_T == 1.0 + T;
  const LimitSuite s = limit_family_suite({2, 4, 8, 16, 32, 64}, 50);
  bool f_ok = true;
  std::ostringstream chis;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& row = s.rows[i];
    const double m = row.m;
    f_ok = f_ok && row.stability_F == Stability::kCertifiedStable &&
           std::abs(row.rho_F - (1 - 1 / (m * m))) < 1e-12;
    if (i > 0) f_ok = f_ok && row.chi_F > s.rows[i - 1].chi_F;
    chis << (i ? ", " : "") << row.chi_F;
  }
  const bool limits_ok = s.qc_limit_E != QCStatus::kQuasiControllable &&
                         s.qc_limit_F != QCStatus::kQuasiControllable;
  r.pass = e_ok && f_ok && limits_ok;
  r.detail = std::string("chi_T({E}) = 1 + T for T <= 50: ") + (e_ok ? "yes" : "no") +
             "; chi(F_m) = " + chis.str() + "; limits " + std::string(to_string(s.qc_limit_E)) +
             " / " + std::string(to_string(s.qc_limit_F));
  return r;
}

Result witness_suite() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> scale(1.05, 1.4);
  int families = 0, seeds = 0, ok = 0, drawn = 0;
  std::string failure;
  while (families < 20) {
    ++drawn;
    const int n = 2 + families % 2;
    const int p = n - 1;
    // rotation-like member plus a member with growth: unstable, generically QC
    Matrix A = oracle::random_matrix(rng, n);
    A *= scale(rng) / Eigen::EigenSolver<Matrix>(A).eigenvalues().cwiseAbs().maxCoeff();
    const Matrix B = random_orthogonal(rng, n);
    const MatrixFamily f({A, B}, NormTag::kL1);
    if (is_quasi_controllable(f).status != QCStatus::kQuasiControllable) continue;
    SearchConfig cfg;
    cfg.certify = true;
    const MeasureReport m = quasi_controllability_measure(f, p, cfg);
    if (!(m.sigma_lower > 0)) continue;
    const auto words = words_exceeding(f, 8, 1.0 / m.sigma_lower, 25);
    if (words.empty()) continue;
    ++families;
    for (const Word& w : words) {
      ++seeds;
      const Vector x0 = norm_attaining_vector(word_product(f, w), NormTag::kL1);
      try {
        const InstabilityWitness wit = witness_from_violation(f, p, m.sigma_lower, w, x0, 8);
        bool good = wit.growth_verified && wit.blocks.size() == 8;
        const double z0 = vector_norm(wit.trajectory.states.front(), NormTag::kL1);
        std::size_t prev_end = 0;
        for (std::size_t k = 0; k < wit.blocks.size(); ++k) {
          const auto& b = wit.blocks[k];
          const double z = vector_norm(wit.trajectory.states[b.end], NormTag::kL1);
          good = good && z >= std::pow(wit.mu, double(k + 1)) * z0;
          good = good && b.end - prev_end <= w.size() + static_cast<std::size_t>(p);
          prev_end = b.end;
        }
        if (good) {
          ++ok;
        } else if (failure.empty()) {
          failure = " first failure: growth check";
        }
      } catch (const Error& e) {
        if (failure.empty()) failure = std::string(" first failure: ") + e.what();
      }
    }
  }
  Result r;
  r.pass = ok == seeds;
  std::ostringstream s;
  s << families << " unstable QC families (" << drawn << " drawn), " << ok << "/" << seeds
    << " violation seeds produced verified witnesses" << failure;
  r.detail = s.str();
  return r;
}

Result sweep_suite() {
  std::vector<double> taus;
  for (int k = 1; k <= 12; ++k) taus.push_back(std::ldexp(1.0, -k));
  SearchConfig cfg;
  cfg.certify = false;
  const SweepTable t =
      measure_sweep(mixture_generator(m2(0, 0.5, 0.5, 0), Matrix::Ones(2, 2)), 2, taus, cfg, 4);
  // rows ascend in tau; gaps[k-1] belongs to tau = 2^-k
  std::vector<double> gaps(12);
  for (const auto& row : t.rows) gaps[static_cast<std::size_t>(-std::lround(std::log2(row.tau)) - 1)] = row.gap;
  int k0 = 12;
  while (k0 > 1 && gaps[static_cast<std::size_t>(k0 - 2)] >= gaps[static_cast<std::size_t>(k0 - 1)]) --k0;
  Result r;
  r.pass = gaps[11] < 1e-3 && k0 <= 8;
  std::ostringstream s;
  s << "gap at k = 12: " << gaps[11] << "; non-increasing from k = " << k0 << "; gaps:";
  for (double g : gaps) s << ' ' << g;
  r.detail = s.str();
  return r;
}

Result determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qcm_acceptance";
  fs::create_directories(dir);
  const fs::path fam = dir / "family.json";
  std::ofstream(fam) << R"({"n": 3, "norm": "l1", "mixture_of": [[0.1, 0.4, -0.2], [0.3, 0, 0.5], [-0.4, 0.2, 0.1]]})";
  const fs::path gen = dir / "generator.json";
  std::ofstream(gen) << R"({"generator": "mixture", "n": 2, "A": [[0, 0.5], [0.5, 0]], "B": [[1, 1], [1, 1]], "taus": [0.5, 0.25]})";
  const std::vector<std::vector<std::string>> commands{
      {"measure", fam.string(), "--p", "3", "--starts", "16", "--seed", "7"},
      {"bound", fam.string(), "-T", "8", "--starts", "16", "--seed", "7"},
      {"simulate", fam.string(), "--law", "iid_uniform", "--seed", "3", "--steps", "40"},
      {"sweep", gen.string(), "--starts", "8", "-T", "3"},
  };
  bool same = true;
  int runs = 0;
  for (const auto& base : commands) {
    std::string reference;
    for (const char* threads : {"1", "1", "2", "4"}) {
      auto args = base;
      args.insert(args.end(), {"--format", "structured", "--threads", threads});
      if (base[0] == "simulate") args.resize(args.size() - 2);
      std::ostringstream out, err;
      qcm::cli::run(args, out, err);
      ++runs;
      if (reference.empty()) {
        reference = out.str();
      } else if (out.str() != reference) {
        same = false;
      }
      if (reference.empty()) same = false;
    }
  }
  fs::remove_all(dir);
  Result r;
  r.pass = same;
  r.detail = std::to_string(runs) + " runs over 4 commands and thread counts 1, 2, 4: " +
             (same ? "byte-identical" : "reports differ");
  return r;
}

}  // namespace

int main() {
  using Criterion = Result (*)();
  const std::vector<std::pair<const char*, Criterion>> criteria{
      {"overshoot bound on stable mixture families", overshoot_suite},
      {"zero versus positive measure", measure_sign_suite},
      {"rank-one families match Kalman tests", rank_one_equivalence},
      {"closed-form mixture and vertex bounds", closed_forms},
      {"geometry oracle equivalence", geometry_oracles},
      {"limit-family counterexamples", counterexamples},
      {"instability witnesses", witness_suite},
      {"continuity sweep", sweep_suite},
      {"determinism across thread counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << r.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
