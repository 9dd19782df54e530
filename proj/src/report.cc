#include "qcm/report.h"

#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "qcm/errors.h"

namespace qcm {
namespace {

using ojson = nlohmann::ordered_json;

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson complex_list(const std::vector<std::complex<double>>& values) {
  ojson out = ojson::array();
  for (const auto& z : values) out.push_back(ojson::array({number(z.real()), number(z.imag())}));
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

ojson ReportEnvelope::to_json() const {
  ojson doc;
  doc["command"] = command;
  doc["input_digest"] = input_digest.empty() ? ojson(nullptr) : ojson(input_digest);
  doc["parameters"] = parameters;
  doc["results"] = results;
  doc["warnings"] = warnings;
  doc["version"] = kVersion;
  return doc;
}

ReportEnvelope ReportEnvelope::from_json(const ojson& doc) {
  ReportEnvelope e;
  try {
    e.command = doc.at("command").get<std::string>();
    if (!doc.at("input_digest").is_null()) e.input_digest = doc.at("input_digest").get<std::string>();
    e.parameters = doc.at("parameters");
    e.results = doc.at("results");
    e.warnings = doc.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed report: ") + ex.what());
  }
  return e;
}

ojson number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ojson to_json(const Vector& v) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

ojson to_json(const Matrix& m) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

ojson to_json(const Word& w) { return ojson(w); }

ojson to_json(const QCVerdict& v) {
  ojson out;
  out["status"] = std::string(to_string(v.status));
  out["reason"] = v.reason;
  // Basis columns as vectors.
  ojson basis = ojson::array();
  for (Eigen::Index j = 0; j < v.basis.cols(); ++j) basis.push_back(to_json(Vector(v.basis.col(j))));
  out["basis"] = basis;
  out["seeds_checked"] = v.seeds.size();
  return out;
}

ojson to_json(const MeasureReport& r) {
  ojson out;
  out["p"] = r.p;
  out["norm"] = std::string(to_string(r.norm));
  out["sigma_upper"] = number(r.sigma_upper);
  out["argmin"] = to_json(r.argmin);
  out["sigma_lower"] = number(r.sigma_lower);
  out["certified"] = r.certified;
  out["lipschitz_constant"] = number(r.lipschitz);
  out["products"] = r.products;
  ojson grid;
  grid["scheme"] = r.grid.scheme;
  grid["finest_radius"] = number(r.grid.finest_radius);
  grid["mesh_floor"] = number(r.grid.mesh_floor);
  grid["cells"] = r.grid.cells;
  grid["evaluations"] = r.grid.evaluations;
  grid["budget_exhausted"] = r.grid.budget_exhausted;
  out["grid"] = grid;
  out["starts"] = r.starts;
  out["seed"] = r.seed;
  return out;
}

ojson to_json(const StructuredBoundReport& r) {
  ojson out;
  out["formula"] = std::string(to_string(r.formula));
  out["applicable"] = r.applicable;
  out["alpha"] = number(r.alpha);
  out["beta"] = number(r.beta);
  out["bound"] = number(r.bound);
  if (!r.reason.empty()) out["reason"] = r.reason;
  return out;
}

ojson to_json(const JsrBounds& j) {
  ojson out;
  out["depth"] = j.depth;
  out["lower"] = number(j.lower);
  out["upper"] = number(j.upper);
  out["upper_length"] = j.upper_length;
  out["upper_norm"] = std::string(to_string(j.upper_norm));
  out["bounded_length"] = j.bounded_length ? ojson(*j.bounded_length) : ojson(nullptr);
  out["bounded_norm"] = j.bounded_norm ? ojson(std::string(to_string(*j.bounded_norm))) : ojson(nullptr);
  out["chi_upper"] = number(j.chi_upper);
  out["verdict"] = std::string(to_string(j.verdict));
  return out;
}

ojson to_json(const OvershootReport& r) {
  ojson out;
  out["T"] = r.T;
  out["chi_T"] = number(r.chi_T);
  out["witness_word"] = to_json(r.witness_word);
  out["witness_x0"] = to_json(r.witness_x0);
  out["exhaustive"] = r.exhaustive;
  return out;
}

ojson to_json(const BoundReport& r) {
  ojson out;
  out["p"] = r.p;
  out["measure"] = to_json(r.measure);
  out["closed_form"] = r.structured ? to_json(*r.structured) : ojson(nullptr);
  out["sigma_used"] = number(r.sigma_used);
  out["source"] = r.source;
  out["apriori_bound"] = number(r.apriori_bound);
  out["stability"] = to_json(r.stability);
  out["conditional"] = r.conditional;
  return out;
}

ojson to_json(const Trajectory& t) {
  ojson out;
  out["norm"] = std::string(to_string(t.norm));
  out["word"] = to_json(t.word);
  ojson states = ojson::array();
  for (const Vector& x : t.states) states.push_back(to_json(x));
  out["states"] = states;
  out["peak"] = number(t.peak);
  out["peak_index"] = t.peak_index;
  return out;
}

ojson to_json(const InstabilityWitness& w) {
  ojson out;
  out["mu"] = number(w.mu);
  out["sigma"] = number(w.sigma);
  out["base_word"] = to_json(w.base_word);
  ojson blocks = ojson::array();
  for (const auto& b : w.blocks) {
    ojson row;
    row["selector"] = to_json(b.selector);
    row["end"] = b.end;
    row["ratio"] = number(b.ratio);
    blocks.push_back(row);
  }
  out["blocks"] = blocks;
  out["max_block_length"] = w.max_block_length;
  out["kappa"] = number(w.kappa);
  out["lambda"] = number(w.lambda);
  out["growth_verified"] = w.growth_verified;
  out["final_norm"] = number(vector_norm(w.trajectory.states.back(), w.trajectory.norm));
  out["trajectory"] = to_json(w.trajectory);
  return out;
}

ojson to_json(const DesyncBoundReport& r) {
  ojson out;
  out["criterion"] = to_json(r.criterion);
  out["closed_form"] = to_json(r.structured);
  out["bound"] = number(r.bound);
  out["stability"] = to_json(r.stability);
  if (!r.reason.empty()) out["reason"] = r.reason;
  return out;
}

namespace {

ojson sweep_row(const SweepRow& r) {
  ojson out;
  out["tau"] = number(r.tau);
  out["sigma_upper"] = number(r.sigma_upper);
  out["sigma_lower"] = number(r.sigma_lower);
  out["gap"] = number(r.gap);
  out["qc"] = std::string(to_string(r.qc));
  out["stability"] = std::string(to_string(r.stability));
  out["chi_T"] = number(r.chi_T);
  out["bound"] = number(r.bound);
  return out;
}

}  // namespace

ojson to_json(const SweepTable& t) {
  ojson out;
  out["generator"] = t.generator;
  out["p"] = t.p;
  out["T"] = t.T;
  out["baseline"] = sweep_row(t.baseline);
  ojson rows = ojson::array();
  for (const auto& r : t.rows) rows.push_back(sweep_row(r));
  out["rows"] = rows;
  return out;
}

ojson to_json(const ProbeTable& t) {
  ojson out;
  out["generator"] = t.generator;
  out["p"] = t.p;
  out["T"] = t.T;
  out["sigma_lower0"] = number(t.sigma_lower0);
  out["word"] = to_json(t.word);
  out["x0"] = to_json(t.x0);
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    ojson row;
    row["tau"] = number(r.tau);
    row["gain"] = number(r.gain);
    row["persists"] = r.persists;
    row["sigma_lower"] = number(r.sigma_lower);
    row["witness_ok"] = r.witness_ok;
    row["witness_note"] = r.witness_note;
    rows.push_back(row);
  }
  out["rows"] = rows;
  return out;
}

ojson to_json(const LimitSuite& s) {
  ojson out;
  out["T"] = s.T;
  ojson rows = ojson::array();
  for (const auto& r : s.rows) {
    ojson row;
    row["m"] = r.m;
    row["chi_T_E"] = number(r.chi_T_E);
    row["stability_E"] = std::string(to_string(r.stability_E));
    row["rho_E"] = number(r.rho_E);
    row["qc_E"] = std::string(to_string(r.qc_E));
    row["chi_F"] = number(r.chi_F);
    row["stability_F"] = std::string(to_string(r.stability_F));
    row["rho_F"] = number(r.rho_F);
    row["qc_F"] = std::string(to_string(r.qc_F));
    rows.push_back(row);
  }
  out["rows"] = rows;
  out["limit_E"] = {{"chi_T", number(s.chi_T_limit_E)}, {"qc", std::string(to_string(s.qc_limit_E))}};
  out["limit_F"] = {{"chi", number(s.chi_limit_F)}, {"qc", std::string(to_string(s.qc_limit_F))}};
  return out;
}

ojson to_json(const PeakDemo& d) {
  ojson out;
  out["a"] = number(d.a);
  out["eps"] = number(d.eps);
  out["A"] = to_json(d.A);
  out["b"] = to_json(d.b);
  out["closed_loop"] = to_json(d.closed_loop);
  out["eigenvalues"] = complex_list(d.eigenvalues);
  out["closed_loop_norm"] = number(d.closed_loop_norm);
  out["first_step_gain"] = number(d.first_step_gain);
  out["flipped_corner"] = to_json(d.flipped_corner);
  out["flipped_eigenvalues"] = complex_list(d.flipped_eigenvalues);
  return out;
}

void write_trajectory_csv(const Trajectory& t, std::ostream& out) {
  const Eigen::Index n = t.states.empty() ? 0 : t.states.front().size();
  out << "n,i(n)";
  for (Eigen::Index j = 0; j < n; ++j) out << ",x" << j + 1;
  out << ",norm\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    out << k << ',';
    if (k < t.word.size()) out << t.word[k];
    for (Eigen::Index j = 0; j < n; ++j) out << ',' << csv_number(t.states[k](j));
    out << ',' << csv_number(vector_norm(t.states[k], t.norm)) << '\n';
  }
}

void write_sweep_csv(const SweepTable& t, std::ostream& out) {
  out << "tau,sigma_upper,sigma_lower,gap,qc,stability,chi_T,bound\n";
  auto row = [&](const SweepRow& r) {
    out << csv_number(r.tau) << ',' << csv_number(r.sigma_upper) << ',' << csv_number(r.sigma_lower)
        << ',' << csv_number(r.gap) << ',' << to_string(r.qc) << ',' << to_string(r.stability)
        << ',' << csv_number(r.chi_T) << ',' << csv_number(r.bound) << '\n';
  };
  row(t.baseline);
  for (const auto& r : t.rows) row(r);
}

void write_probe_csv(const ProbeTable& t, std::ostream& out) {
  out << "tau,gain,persists,sigma_lower,witness_ok\n";
  for (const auto& r : t.rows) {
    out << csv_number(r.tau) << ',' << csv_number(r.gain) << ',' << (r.persists ? 1 : 0) << ','
        << csv_number(r.sigma_lower) << ',' << (r.witness_ok ? 1 : 0) << '\n';
  }
}

void write_limits_csv(const LimitSuite& s, std::ostream& out) {
  out << "m,chi_T_E,stability_E,rho_E,chi_F,stability_F,rho_F\n";
  for (const auto& r : s.rows) {
    out << r.m << ',' << csv_number(r.chi_T_E) << ',' << to_string(r.stability_E) << ','
        << csv_number(r.rho_E) << ',' << csv_number(r.chi_F) << ',' << to_string(r.stability_F)
        << ',' << csv_number(r.rho_F) << '\n';
  }
}

}  // namespace qcm
