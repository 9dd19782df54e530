#pragma once

#include "qcm/core.h"

namespace qcm::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Result {
  Status status = Status::kInfeasible;
  Vector x;
  double value = 0.0;
};

/// maximize c'x subject to A x = b, x >= 0.
///
/// Dense two-phase tableau simplex with Bland's anti-cycling rule. Meant for
/// the small programs in this library (tens of variables).
Result maximize(const Matrix& A, const Vector& b, const Vector& c);

}  // namespace qcm::lp
