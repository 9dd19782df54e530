#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcm/desync.h"
#include "qcm/dynamics.h"
#include "qcm/invariance.h"
#include "qcm/measure.h"
#include "qcm/robustness.h"

namespace qcm {

inline constexpr const char* kVersion = "0.1.0";

/// One machine-readable document per run.
struct ReportEnvelope {
  std::string command;
  std::string input_digest;  // hex SHA-256 of the input file, empty if none
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
  static ReportEnvelope from_json(const nlohmann::ordered_json& doc);
};

std::string sha256_hex(const std::string& bytes);

/// Finite values as numbers; infinities and NaN as the strings "inf",
/// "-inf", "nan".
nlohmann::ordered_json number(double v);

nlohmann::ordered_json to_json(const Vector& v);
nlohmann::ordered_json to_json(const Matrix& m);
nlohmann::ordered_json to_json(const Word& w);
nlohmann::ordered_json to_json(const QCVerdict& v);
nlohmann::ordered_json to_json(const MeasureReport& r);
nlohmann::ordered_json to_json(const StructuredBoundReport& r);
nlohmann::ordered_json to_json(const JsrBounds& j);
nlohmann::ordered_json to_json(const OvershootReport& r);
nlohmann::ordered_json to_json(const BoundReport& r);
nlohmann::ordered_json to_json(const Trajectory& t);
nlohmann::ordered_json to_json(const InstabilityWitness& w);
nlohmann::ordered_json to_json(const DesyncBoundReport& r);
nlohmann::ordered_json to_json(const SweepTable& t);
nlohmann::ordered_json to_json(const ProbeTable& t);
nlohmann::ordered_json to_json(const LimitSuite& s);
nlohmann::ordered_json to_json(const PeakDemo& d);

/// Columns n, i(n), x_1..x_N, ||x(n)||; i(n) is empty on the last row.
void write_trajectory_csv(const Trajectory& t, std::ostream& out);
/// Columns tau, sigma_upper, sigma_lower, gap, qc, stability, chi_T, bound.
void write_sweep_csv(const SweepTable& t, std::ostream& out);
void write_probe_csv(const ProbeTable& t, std::ostream& out);
void write_limits_csv(const LimitSuite& s, std::ostream& out);

}  // namespace qcm
