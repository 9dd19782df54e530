#include "qcm/robustness.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qcm/desync.h"
#include "qcm/errors.h"

namespace qcm {
namespace {

double closed_form_or_zero(const MatrixFamily& family) {
  const auto structured = structured_bound_for(family);
  return structured && structured->applicable ? structured->bound : 0.0;
}

SweepRow evaluate_row(const MatrixFamily& family, double tau, int p, const SearchConfig& config,
                      int T, int stability_depth, Vector* argmin = nullptr) {
  SweepRow row;
  row.tau = tau;
  const MeasureReport m = quasi_controllability_measure(family, p, config);
  if (argmin) *argmin = m.argmin;
  row.sigma_upper = m.sigma_upper;
  row.sigma_lower = m.sigma_lower;
  row.qc = is_quasi_controllable(family).status;
  row.stability = jsr_bounds(family, stability_depth).verdict;
  row.chi_T = overshoot_bruteforce(family, T).chi_T;
  const double sigma = std::max(m.sigma_lower, closed_form_or_zero(family));
  if (sigma > 0.0) row.bound = 1.0 / sigma;
  return row;
}

std::string matrix_text(const Matrix& m) {
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << (i ? ",[" : "[");
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << ']';
  }
  out << ']';
  return out.str();
}

std::vector<std::complex<double>> eigenvalues_of(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<std::complex<double>> out(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

}  // namespace

FamilyGenerator affine_generator(const MatrixFamily& base, const std::vector<Matrix>& perturbation) {
  if (perturbation.size() != base.size()) {
    throw InvalidArgument("perturbation must have one matrix per family member");
  }
  for (const Matrix& b : perturbation) {
    if (b.rows() != base.dim() || b.cols() != base.dim()) {
      throw InvalidArgument("perturbation matrix has the wrong dimension");
    }
  }
  FamilyGenerator g;
  g.description = "A_i + tau B_i over " + std::to_string(base.size()) + " members";
  g.make = [base, perturbation](double tau) {
    std::vector<Matrix> members;
    for (std::size_t i = 0; i < base.size(); ++i) members.push_back(base[i] + tau * perturbation[i]);
    return MatrixFamily(std::move(members), base.norm(), base.labels());
  };
  return g;
}

FamilyGenerator mixture_generator(const Matrix& A, const Matrix& B, NormTag norm) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw InvalidArgument("mixture_generator: dimension mismatch");
  }
  FamilyGenerator g;
  g.description = "mixture family of A + tau B, A = " + matrix_text(A) + ", B = " + matrix_text(B);
  g.make = [A, B, norm](double tau) { return mixture_family(A + tau * B, norm); };
  return g;
}

FamilyGenerator constant_generator(const MatrixFamily& family) {
  FamilyGenerator g;
  g.description = "constant family of " + std::to_string(family.size()) + " members";
  g.make = [family](double) { return family; };
  return g;
}

SweepTable measure_sweep(const FamilyGenerator& generator, int p, std::vector<double> taus,
                         const SearchConfig& config, int T, int stability_depth) {
  std::sort(taus.begin(), taus.end());
  SweepTable table;
  table.generator = generator.description;
  table.p = p;
  table.T = T;
  const MatrixFamily base = generator.make(0.0);
  Vector argmin0;
  table.baseline = evaluate_row(base, 0.0, p, config, T, stability_depth, &argmin0);
  SearchConfig shared = config;
  shared.extra_starts.push_back(argmin0);
  for (double tau : taus) {
    SweepRow row = evaluate_row(generator.make(tau), tau, p, shared, T, stability_depth);
    row.gap = std::abs(row.sigma_upper - table.baseline.sigma_upper);
    table.rows.push_back(row);
  }
  return table;
}

ProbeTable instability_robustness_probe(const FamilyGenerator& generator, int p,
                                        std::vector<double> taus, int T,
                                        const SearchConfig& config, int witness_blocks) {
  std::sort(taus.begin(), taus.end());
  ProbeTable table;
  table.generator = generator.description;
  table.p = p;
  table.T = T;
  const MatrixFamily base = generator.make(0.0);
  if (is_quasi_controllable(base).status == QCStatus::kReducible) {
    throw PreconditionFailed("probe inapplicable: the family at tau = 0 is reducible");
  }
  const MeasureReport m0 = quasi_controllability_measure(base, p, config);
  table.sigma_lower0 = std::max(m0.sigma_lower, closed_form_or_zero(base));
  if (!(table.sigma_lower0 > 0.0)) {
    throw PreconditionFailed("probe inapplicable: sigma at tau = 0 is not certified");
  }
  const OvershootReport over = overshoot_bruteforce(base, T);
  if (!(over.chi_T * table.sigma_lower0 > 1.0)) {
    std::ostringstream msg;
    msg << "probe inapplicable: chi_T = " << over.chi_T << " does not exceed 1 / sigma = "
        << 1.0 / table.sigma_lower0;
    throw PreconditionFailed(msg.str());
  }
  table.word = over.witness_word;
  table.x0 = over.witness_x0;

  for (double tau : taus) {
    const MatrixFamily family = generator.make(tau);
    ProbeRow row;
    row.tau = tau;
    row.gain = vector_norm(word_product(family, table.word) * table.x0, family.norm()) /
               vector_norm(table.x0, family.norm());
    row.persists = row.gain * table.sigma_lower0 > 1.0;
    const MeasureReport m = quasi_controllability_measure(family, p, config);
    row.sigma_lower = std::max(m.sigma_lower, closed_form_or_zero(family));
    try {
      const InstabilityWitness w =
          witness_from_violation(family, p, row.sigma_lower, table.word, table.x0, witness_blocks);
      row.witness_ok = w.growth_verified;
      row.witness_note = w.growth_verified ? "growth verified" : "growth check failed";
    } catch (const Error& e) {
      row.witness_note = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

double power_overshoot(const Matrix& F, NormTag norm, int max_power) {
  if (F.rows() != F.cols()) throw InvalidArgument("power_overshoot: matrix must be square");
  Matrix power = Matrix::Identity(F.rows(), F.cols());
  double best = 1.0;
  for (int s = 1; s <= max_power; ++s) {
    power = F * power;
    const double v = induced_norm(power, norm);
    if (v <= 1.0) return best;
    best = std::max(best, v);
  }
  throw Error("power_overshoot: no power with norm at most 1 within the step limit");
}

LimitSuite limit_family_suite(const std::vector<int>& ms, int T) {
  LimitSuite suite;
  suite.T = T;
  for (int m : ms) {
    if (m < 1) throw InvalidArgument("limit_family_suite: m must be positive");
    const double inv = 1.0 / m;
    Matrix E(2, 2);
    E << 1.0 - inv, 1.0, 0.0, 1.0 - inv;
    Matrix F(2, 2);
    F << 1.0 - inv * inv, inv, 0.0, 1.0 - inv * inv;
    const MatrixFamily fe({E}, NormTag::kL1);
    const MatrixFamily ff({F}, NormTag::kL1);
    LimitRow row;
    row.m = m;
    row.chi_T_E = overshoot_bruteforce(fe, T).chi_T;
    row.stability_E = jsr_bounds(fe, 4).verdict;
    row.rho_E = spectral_radius(E);
    row.chi_F = power_overshoot(F, NormTag::kL1);
    row.stability_F = jsr_bounds(ff, 4).verdict;
    row.rho_F = spectral_radius(F);
    row.qc_E = is_quasi_controllable(fe).status;
    row.qc_F = is_quasi_controllable(ff).status;
    suite.rows.push_back(row);
  }
  Matrix E(2, 2);
  E << 1.0, 1.0, 0.0, 1.0;
  const MatrixFamily fe({E}, NormTag::kL1);
  suite.chi_T_limit_E = overshoot_bruteforce(fe, T).chi_T;
  suite.qc_limit_E = is_quasi_controllable(fe).status;
  const MatrixFamily fi({Matrix::Identity(2, 2)}, NormTag::kL1);
  suite.chi_limit_F = power_overshoot(Matrix::Identity(2, 2), NormTag::kL1);
  suite.qc_limit_F = is_quasi_controllable(fi).status;
  return suite;
}

PeakDemo intro_peak_demo(double a, double eps) {
  if (eps == 0.0) throw InvalidArgument("intro_peak_demo: eps must be nonzero");
  PeakDemo d;
  d.a = a;
  d.eps = eps;
  d.A.resize(2, 2);
  d.A << a, eps, eps, a;
  d.b.resize(2);
  d.b << -2.0 * a, -(a * a + eps * eps) / eps;
  d.closed_loop = d.A;
  d.closed_loop.col(0) += d.b;
  d.eigenvalues = eigenvalues_of(d.closed_loop);
  d.closed_loop_norm = induced_norm(d.closed_loop, NormTag::kL1);
  d.first_step_gain = std::max(d.closed_loop.col(0).lpNorm<1>(), d.closed_loop.col(1).lpNorm<1>());
  d.flipped_corner = d.closed_loop;
  d.flipped_corner(1, 0) = -d.flipped_corner(1, 0);
  d.flipped_eigenvalues = eigenvalues_of(d.flipped_corner);
  return d;
}

}  // namespace qcm
