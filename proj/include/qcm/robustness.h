#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qcm/core.h"
#include "qcm/dynamics.h"
#include "qcm/invariance.h"
#include "qcm/measure.h"

namespace qcm {

/// tau -> family, with a printable description for reports.
struct FamilyGenerator {
  std::function<MatrixFamily(double)> make;
  std::string description;
};

/// {A_i + tau B_i}.
FamilyGenerator affine_generator(const MatrixFamily& base, const std::vector<Matrix>& perturbation);
/// Mixture family of A + tau B.
FamilyGenerator mixture_generator(const Matrix& A, const Matrix& B, NormTag norm = NormTag::kL1);
/// The same family for every tau.
FamilyGenerator constant_generator(const MatrixFamily& family);

struct SweepRow {
  double tau = 0.0;
  double sigma_upper = 0.0;
  double sigma_lower = 0.0;
  double gap = 0.0;  // |sigma_upper(tau) - sigma_upper(0)|
  QCStatus qc = QCStatus::kInconclusive;
  Stability stability = Stability::kInconclusive;
  double chi_T = 1.0;
  double bound = std::numeric_limits<double>::infinity();
};

struct SweepTable {
  std::string generator;
  int p = 0;
  int T = 0;
  SweepRow baseline;  // tau = 0
  std::vector<SweepRow> rows;  // ascending tau
};

/// Measure of A(tau) for each tau with the same search seeds. The argmin at
/// tau = 0 is added as an extra start for every row.
SweepTable measure_sweep(const FamilyGenerator& generator, int p, std::vector<double> taus,
                         const SearchConfig& config = {}, int T = 6, int stability_depth = 4);

struct ProbeRow {
  double tau = 0.0;
  double gain = 0.0;       // ||P_tau(w) x0|| / ||x0||
  bool persists = false;   // gain > 1 / sigma_lower(0)
  double sigma_lower = 0.0;
  bool witness_ok = false;
  std::string witness_note;
};

struct ProbeTable {
  std::string generator;
  int p = 0;
  int T = 0;
  double sigma_lower0 = 0.0;
  Word word;
  Vector x0;
  std::vector<ProbeRow> rows;
};

/// Finds a word of at most T factors with ||x(n0)|| > ||x(0)|| / sigma_lower at
/// tau = 0 and re-evaluates that word along the sweep. Throws
/// PreconditionFailed when no such word exists.
ProbeTable instability_robustness_probe(const FamilyGenerator& generator, int p,
                                        std::vector<double> taus, int T,
                                        const SearchConfig& config = {}, int witness_blocks = 8);

/// max_n ||F^n|| in `norm`. Once ||F^s|| <= 1 for some s >= 1, every later
/// power factors as (F^s)^q F^r with r < s, so the maximum is already known.
/// Throws Error when no such s is found within max_power steps.
double power_overshoot(const Matrix& F, NormTag norm, int max_power = 10'000'000);

struct LimitRow {
  int m = 0;
  double chi_T_E = 0.0;
  Stability stability_E = Stability::kInconclusive;
  double rho_E = 0.0;
  double chi_F = 0.0;
  Stability stability_F = Stability::kInconclusive;
  double rho_F = 0.0;
  QCStatus qc_E = QCStatus::kInconclusive;
  QCStatus qc_F = QCStatus::kInconclusive;
};

struct LimitSuite {
  int T = 0;
  std::vector<LimitRow> rows;
  double chi_T_limit_E = 0.0;  // {[[1,1],[0,1]]}
  QCStatus qc_limit_E = QCStatus::kInconclusive;
  double chi_limit_F = 0.0;    // {I}
  QCStatus qc_limit_F = QCStatus::kInconclusive;
};

/// E_m = [[1-1/m, 1],[0, 1-1/m]] and F_m = [[1-1/m^2, 1/m],[0, 1-1/m^2]] in
/// the L1 norm, together with their limits.
LimitSuite limit_family_suite(const std::vector<int>& ms, int T);

struct PeakDemo {
  double a = 0.0;
  double eps = 0.0;
  Matrix A;
  Vector b;
  Matrix closed_loop;        // A + b e_1^T
  std::vector<std::complex<double>> eigenvalues;
  double closed_loop_norm = 0.0;   // L1 induced
  double first_step_gain = 0.0;    // max(||A* e_1||_1, ||A* e_2||_1)
  Matrix flipped_corner;           // closed loop with the sign of entry (2,1) reversed
  std::vector<std::complex<double>> flipped_eigenvalues;
};

/// A = [[a, eps],[eps, a]] with the feedback b = (-2a, -(a^2 + eps^2)/eps)
/// that places both closed-loop eigenvalues at 0.
PeakDemo intro_peak_demo(double a, double eps);

}  // namespace qcm
