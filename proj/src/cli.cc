#include "qcm/cli.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "qcm/desync.h"
#include "qcm/errors.h"
#include "qcm/family_io.h"
#include "qcm/report.h"

namespace qcm::cli {
namespace {

using ojson = nlohmann::ordered_json;

struct Options {
  std::string file;
  int p = -1;
  std::string norm;
  int T = -1;
  int starts = 64;
  std::uint64_t seed = 1;
  double certify_grid = -1.0;  // < 0: automatic
  std::string law;
  std::string taus;
  std::string format = "text";
  std::string out;
  int threads = 0;
  // command specific
  std::string word;
  std::string x0;
  std::string seed_x;
  double mu = 0.0;
  int blocks = 8;
  int steps = 20;
  bool probe = false;
  std::string ms = "2,4,8,16,32,64";
  double a = 1.0;
  double eps = 0.1;
};

// Result of one command before formatting.
struct Outcome {
  ReportEnvelope envelope;
  std::string text;
  std::string csv;  // empty when the command has no tabular form
  int code = kOk;
};

struct Input {
  MatrixFamily family;
  std::string digest;
  nlohmann::json doc;
};

Input load_family(const Options& o) {
  const std::string text = read_file(o.file);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  MatrixFamily family = parse_family(doc);
  if (!o.norm.empty()) {
    const auto norm = parse_norm(o.norm);
    if (!norm) throw ParseError("unknown norm \"" + o.norm + "\"");
    family = family.with_norm(*norm);
  }
  return {std::move(family), sha256_hex(text), std::move(doc)};
}

int depth_or_default(const Options& o, int n) { return o.p >= 0 ? o.p : std::max(0, n - 1); }

SearchConfig search_config(const Options& o) {
  SearchConfig c;
  c.starts = o.starts;
  c.seed = o.seed;
  c.threads = o.threads;
  if (o.certify_grid == 0.0) {
    c.certify = false;
  } else if (o.certify_grid > 0.0) {
    c.certify = true;
    c.certify_mesh = o.certify_grid;
  }
  return c;
}

void record_search(ojson& params, const Options& o) {
  params["starts"] = o.starts;
  params["seed"] = o.seed;
  params["certify_grid"] = o.certify_grid < 0.0 ? ojson("auto") : number(o.certify_grid);
}

Vector vector_arg(const std::string& text, int n, const std::string& what) {
  const std::vector<double> v = parse_number_list(text);
  if (static_cast<int>(v.size()) != n) {
    throw ParseError(what + " must have " + std::to_string(n) + " entries");
  }
  return Eigen::Map<const Vector>(v.data(), n);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::string word_text(const Word& w) {
  if (w.empty()) return "(empty)";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

std::string vector_text(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + ")";
}

void append_warnings(Outcome& r, const std::vector<std::string>& w) {
  r.envelope.warnings.insert(r.envelope.warnings.end(), w.begin(), w.end());
}

Outcome cmd_qc(const Options& o) {
  const Input in = load_family(o);
  Outcome r;
  r.envelope.command = "qc";
  r.envelope.input_digest = in.digest;
  r.envelope.parameters["norm"] = std::string(to_string(in.family.norm()));
  const QCVerdict v = is_quasi_controllable(in.family);
  r.envelope.results["verdict"] = to_json(v);
  std::ostringstream t;
  t << "status: " << to_string(v.status) << "\nreason: " << v.reason << '\n';
  if (const auto A = mixture_source(in.doc)) {
    const QCVerdict c = mixture_qc_criterion(*A);
    r.envelope.results["mixture_criterion"] = to_json(c);
    t << "mixture criterion: " << to_string(c.status) << " (" << c.reason << ")\n";
  }
  if (v.basis.cols() > 0) {
    t << (v.status == QCStatus::kReducible ? "invariant subspace basis:\n" : "blocking eigenspace:\n");
    for (Eigen::Index j = 0; j < v.basis.cols(); ++j) t << "  " << vector_text(v.basis.col(j)) << '\n';
  }
  r.text = t.str();
  r.code = v.status == QCStatus::kQuasiControllable ? kOk
           : v.status == QCStatus::kReducible      ? kReducible
                                                   : kInconclusive;
  if (v.status == QCStatus::kInconclusive) r.envelope.warnings.push_back("quasi-controllability inconclusive");
  return r;
}

Outcome cmd_measure(const Options& o) {
  const Input in = load_family(o);
  const int p = depth_or_default(o, in.family.dim());
  Outcome r;
  r.envelope.command = "measure";
  r.envelope.input_digest = in.digest;
  r.envelope.parameters["p"] = p;
  r.envelope.parameters["norm"] = std::string(to_string(in.family.norm()));
  record_search(r.envelope.parameters, o);
  const MeasureReport m = quasi_controllability_measure(in.family, p, search_config(o));
  r.envelope.results["measure"] = to_json(m);
  append_warnings(r, m.warnings);
  std::ostringstream t;
  t << "p: " << p << "  norm: " << to_string(m.norm) << "  products: " << m.products << '\n'
    << "sigma_upper: " << fmt(m.sigma_upper) << " at x = " << vector_text(m.argmin) << '\n'
    << "sigma_lower: " << fmt(m.sigma_lower) << (m.certified ? " (certified)" : " (not certified)")
    << '\n'
    << "lipschitz constant: " << fmt(m.lipschitz) << "  grid cells: " << m.grid.cells << '\n';
  if (const auto s = structured_bound_for(in.family); s && s->applicable) {
    r.envelope.results["closed_form"] = to_json(*s);
    t << "closed-form " << to_string(s->formula) << " bound: " << fmt(s->bound) << '\n';
  }
  for (const auto& w : m.warnings) t << "warning: " << w << '\n';
  r.text = t.str();
  return r;
}

Outcome cmd_bound(const Options& o, bool overshoot) {
  const Input in = load_family(o);
  const int p = depth_or_default(o, in.family.dim());
  const int T = o.T >= 0 ? o.T : 12;
  Outcome r;
  r.envelope.command = overshoot ? "overshoot" : "bound";
  r.envelope.input_digest = in.digest;
  r.envelope.parameters["p"] = p;
  r.envelope.parameters["T"] = T;
  r.envelope.parameters["norm"] = std::string(to_string(in.family.norm()));
  record_search(r.envelope.parameters, o);
  const BoundReport b = overshoot_bound(in.family, p, search_config(o));
  const OvershootReport ov = overshoot_bruteforce(in.family, T);
  const bool finite = std::isfinite(b.apriori_bound);
  const bool holds = !finite || ov.chi_T <= b.apriori_bound * (1.0 + 1e-9);
  r.envelope.results["bound"] = to_json(b);
  r.envelope.results["overshoot"] = to_json(ov);
  r.envelope.results["comparison"] = !finite ? "no finite bound" : holds ? "PASS" : "FAIL";
  append_warnings(r, b.warnings);
  std::ostringstream t;
  t << "chi_T (T = " << T << "): " << fmt(ov.chi_T) << "  witness word: " << word_text(ov.witness_word)
    << '\n'
    << "a priori bound: " << fmt(b.apriori_bound) << " (sigma = " << fmt(b.sigma_used) << ", "
    << b.source << ")\n"
    << "stability: " << to_string(b.stability.verdict) << (b.conditional ? " (bound conditional)" : "")
    << '\n';
  if (finite) {
    t << "chi_T <= bound: " << (holds ? "PASS" : "FAIL") << '\n';
  } else {
    t << "chi_T <= bound: no finite bound\n";
  }
  for (const auto& w : b.warnings) t << "warning: " << w << '\n';
  r.text = t.str();
  r.code = !finite ? kInconclusive : holds ? kOk : kReducible;
  if (overshoot && r.code == kInconclusive) r.code = kOk;
  return r;
}

Outcome cmd_simulate(const Options& o) {
  const Input in = load_family(o);
  const int n = in.family.dim();
  const Vector x0 = o.x0.empty() ? Vector(Vector::Unit(n, 0)) : vector_arg(o.x0, n, "--x0");
  Word word;
  Outcome r;
  r.envelope.command = "simulate";
  r.envelope.input_digest = in.digest;
  r.envelope.parameters["x0"] = to_json(x0);
  if (!o.law.empty()) {
    const UpdateLaw law = parse_law(o.law, o.seed);
    word = law_word(in.family, law, x0, o.steps);
    r.envelope.parameters["law"] = to_string(law);
    r.envelope.parameters["steps"] = o.steps;
    r.envelope.parameters["seed"] = o.seed;
  } else {
    word = parse_word(o.word);
    r.envelope.parameters["word"] = to_json(word);
  }
  const Trajectory traj = simulate(in.family, word, x0);
  r.envelope.results["trajectory"] = to_json(traj);
  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  r.csv = csv.str();
  std::ostringstream t;
  t << "steps: " << traj.word.size() << "  peak: " << fmt(traj.peak) << " at n = " << traj.peak_index
    << "\nfinal state: " << vector_text(traj.states.back()) << '\n';
  r.text = t.str();
  return r;
}

Outcome cmd_witness(const Options& o) {
  const Input in = load_family(o);
  const int n = in.family.dim();
  const int p = depth_or_default(o, n);
  const int T = o.T >= 0 ? o.T : 8;
  Outcome r;
  r.envelope.command = "witness";
  r.envelope.input_digest = in.digest;
  r.envelope.parameters["p"] = p;
  r.envelope.parameters["T"] = T;
  r.envelope.parameters["blocks"] = o.blocks;
  record_search(r.envelope.parameters, o);

  const MeasureReport m = quasi_controllability_measure(in.family, p, search_config(o));
  append_warnings(r, m.warnings);
  double sigma = m.sigma_lower;
  if (const auto s = structured_bound_for(in.family); s && s->applicable) sigma = std::max(sigma, s->bound);
  if (!(sigma > 0.0)) throw PreconditionFailed("precondition failed: sigma is not certified positive");

  Word word = parse_word(o.word);
  Vector x0;
  if (word.empty() && o.word.empty()) {
    const OvershootReport ov = overshoot_bruteforce(in.family, T);
    if (!(ov.chi_T * sigma > 1.0)) {
      throw PreconditionFailed("precondition failed: chi_T = " + fmt(ov.chi_T) +
                               " does not exceed 1 / sigma = " + fmt(1.0 / sigma));
    }
    word = ov.witness_word;
    x0 = ov.witness_x0;
  }
  if (!o.x0.empty()) x0 = vector_arg(o.x0, n, "--x0");
  if (x0.size() == 0) x0 = norm_attaining_vector(word_product(in.family, word), in.family.norm());

  InstabilityWitness w;
  if (o.mu > 0.0) {
    const Vector seed = o.seed_x.empty() ? x0 : vector_arg(o.seed_x, n, "--seed-x");
    w = instability_witness(in.family, p, sigma, seed, word, o.mu, x0, o.blocks);
  } else {
    w = witness_from_violation(in.family, p, sigma, word, x0, o.blocks);
  }
  r.envelope.parameters["base_word"] = to_json(word);
  r.envelope.parameters["x0"] = to_json(x0);
  r.envelope.results["witness"] = to_json(w);
  std::ostringstream csv;
  write_trajectory_csv(w.trajectory, csv);
  r.csv = csv.str();
  std::ostringstream t;
  t << "sigma: " << fmt(sigma) << "  mu: " << fmt(w.mu) << "  base word: " << word_text(word) << '\n'
    << "blocks: " << w.blocks.size() << "  max block length: " << w.max_block_length << '\n'
    << "kappa: " << fmt(w.kappa) << "  lambda: " << fmt(w.lambda) << '\n'
    << "growth verified: " << (w.growth_verified ? "yes" : "no") << '\n';
  r.text = t.str();
  return r;
}

Outcome cmd_sweep(const Options& o) {
  const std::string text = read_file(o.file);
  GeneratorSpec spec = parse_generator_text(text);
  if (!o.taus.empty()) spec.taus = parse_number_list(o.taus);
  if (spec.taus.empty()) throw ParseError("no tau values given");
  const int n = spec.generator.make(0.0).dim();
  const int p = depth_or_default(o, n);
  Outcome r;
  r.envelope.input_digest = sha256_hex(text);
  r.envelope.parameters["p"] = p;
  ojson taus = ojson::array();
  for (double tau : spec.taus) taus.push_back(number(tau));
  r.envelope.parameters["taus"] = taus;
  record_search(r.envelope.parameters, o);
  std::ostringstream t, csv;
  if (o.probe) {
    const int T = o.T >= 0 ? o.T : 8;
    r.envelope.command = "sweep-probe";
    r.envelope.parameters["T"] = T;
    const ProbeTable table =
        instability_robustness_probe(spec.generator, p, spec.taus, T, search_config(o), o.blocks);
    r.envelope.results["probe"] = to_json(table);
    write_probe_csv(table, csv);
    t << "word at tau = 0: " << word_text(table.word) << "  sigma(0): " << fmt(table.sigma_lower0) << '\n';
    for (const auto& row : table.rows) {
      t << "tau " << fmt(row.tau) << ": gain " << fmt(row.gain) << (row.persists ? " persists" : " lost")
        << ", witness " << (row.witness_ok ? "ok" : row.witness_note) << '\n';
    }
  } else {
    const int T = o.T >= 0 ? o.T : 6;
    r.envelope.command = "sweep";
    r.envelope.parameters["T"] = T;
    const SweepTable table = measure_sweep(spec.generator, p, spec.taus, search_config(o), T);
    r.envelope.results["sweep"] = to_json(table);
    write_sweep_csv(table, csv);
    t << table.generator << "\n" << csv.str();
  }
  r.csv = csv.str();
  r.text = t.str();
  return r;
}

Outcome cmd_limits(const Options& o) {
  std::vector<int> ms;
  for (double v : parse_number_list(o.ms)) {
    if (v != static_cast<int>(v) || v < 1) throw ParseError("--ms entries must be positive integers");
    ms.push_back(static_cast<int>(v));
  }
  const int T = o.T >= 0 ? o.T : 50;
  Outcome r;
  r.envelope.command = "limits";
  r.envelope.parameters["ms"] = ms;
  r.envelope.parameters["T"] = T;
  const LimitSuite s = limit_family_suite(ms, T);
  r.envelope.results["limits"] = to_json(s);
  std::ostringstream csv;
  write_limits_csv(s, csv);
  r.csv = csv.str();
  std::ostringstream t;
  t << csv.str() << "limit {E}: chi_T = " << fmt(s.chi_T_limit_E) << ", " << to_string(s.qc_limit_E)
    << "\nlimit {I}: chi = " << fmt(s.chi_limit_F) << ", " << to_string(s.qc_limit_F) << '\n';
  r.text = t.str();
  return r;
}

Outcome cmd_peak_demo(const Options& o) {
  const PeakDemo d = intro_peak_demo(o.a, o.eps);
  Outcome r;
  r.envelope.command = "peak-demo";
  r.envelope.parameters["a"] = number(o.a);
  r.envelope.parameters["eps"] = number(o.eps);
  r.envelope.results["demo"] = to_json(d);
  r.envelope.warnings.push_back(
      "the corner entry of A + b e_1^T is -a^2/eps; with +a^2/eps the matrix is not nilpotent");
  std::ostringstream t;
  t << "closed loop A*: [[" << fmt(d.closed_loop(0, 0)) << ", " << fmt(d.closed_loop(0, 1)) << "], ["
    << fmt(d.closed_loop(1, 0)) << ", " << fmt(d.closed_loop(1, 1)) << "]]\n"
    << "eigenvalues: " << d.eigenvalues[0] << ", " << d.eigenvalues[1] << '\n'
    << "||A*||_1: " << fmt(d.closed_loop_norm) << "  first-step gain: " << fmt(d.first_step_gain) << '\n'
    << "with the corner sign flipped the eigenvalues are " << d.flipped_eigenvalues[0] << ", "
    << d.flipped_eigenvalues[1] << '\n';
  r.text = t.str();
  return r;
}

void add_search_flags(CLI::App* c, Options& o) {
  c->add_option("--p", o.p, "product depth (default N-1)");
  c->add_option("--starts", o.starts, "multistart count")->check(CLI::NonNegativeNumber);
  c->add_option("--seed", o.seed, "search seed");
  c->add_option("--certify-grid", o.certify_grid, "finest certification cell radius; 0 disables");
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--norm", o.norm, "override the family norm (l1, l2, linf)");
  c->add_option("--format", o.format, "text, structured or csv")
      ->check(CLI::IsMember({"text", "structured", "csv"}));
  c->add_option("--out", o.out, "write the report to this file");
  c->add_option("--threads", o.threads, "worker threads (0 = all)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-controllability measure and overshoot bounds for matrix families", "qcm"};
  app.require_subcommand(1);
  Options o;

  auto* qc = app.add_subcommand("qc", "decide quasi-controllability");
  qc->add_option("family", o.file, "family file")->required();
  add_common(qc, o);

  auto* measure = app.add_subcommand("measure", "estimate and certify sigma_p");
  measure->add_option("family", o.file, "family file")->required();
  add_search_flags(measure, o);
  add_common(measure, o);

  auto* bound = app.add_subcommand("bound", "a priori overshoot bound against brute force");
  auto* overshoot = app.add_subcommand("overshoot", "brute-force chi_T with the a priori bound");
  for (auto* c : {bound, overshoot}) {
    c->add_option("family", o.file, "family file")->required();
    c->add_option("-T,--depth", o.T, "brute-force depth (default 12)");
    add_search_flags(c, o);
    add_common(c, o);
  }

  auto* sim = app.add_subcommand("simulate", "simulate a switching sequence");
  sim->add_option("family", o.file, "family file")->required();
  sim->add_option("--word", o.word, "comma separated member indices");
  sim->add_option("--law", o.law, "round_robin, iid_uniform or greedy");
  sim->add_option("--steps", o.steps, "steps for --law")->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", o.seed, "seed for iid_uniform");
  sim->add_option("--x0", o.x0, "initial state, comma separated (default e_1)");
  add_common(sim, o);

  auto* wit = app.add_subcommand("witness", "construct an exponential instability witness");
  wit->add_option("family", o.file, "family file")->required();
  wit->add_option("--word", o.word, "word of the seed product R (default: brute-force violation)");
  wit->add_option("--mu", o.mu, "growth factor per block (default from the seed)");
  wit->add_option("--x0", o.x0, "initial state");
  wit->add_option("--seed-x", o.seed_x, "vector x* with ||R x*|| > mu/sigma ||x*||");
  wit->add_option("--blocks", o.blocks, "number of blocks")->check(CLI::NonNegativeNumber);
  wit->add_option("-T,--depth", o.T, "search depth for a violation (default 8)");
  add_search_flags(wit, o);
  add_common(wit, o);

  auto* sweep = app.add_subcommand("sweep", "measure sweep over a parameterized family");
  sweep->add_option("generator", o.file, "generator file")->required();
  sweep->add_option("--taus", o.taus, "comma separated tau values");
  sweep->add_option("-T,--depth", o.T, "brute-force depth");
  sweep->add_flag("--probe", o.probe, "run the instability robustness probe instead");
  sweep->add_option("--blocks", o.blocks, "witness blocks for --probe");
  add_search_flags(sweep, o);
  add_common(sweep, o);

  auto* limits = app.add_subcommand("limits", "limit-family counterexample suite");
  limits->add_option("--ms", o.ms, "comma separated m values");
  limits->add_option("-T,--depth", o.T, "brute-force depth (default 50)");
  add_common(limits, o);

  auto* demo = app.add_subcommand("peak-demo", "deadbeat feedback peak demonstration");
  demo->add_option("--a", o.a, "diagonal entry");
  demo->add_option("--eps", o.eps, "coupling, nonzero");
  add_common(demo, o);

  std::vector<const char*> argv{"qcm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Outcome r;
  try {
    if (qc->parsed()) r = cmd_qc(o);
    else if (measure->parsed()) r = cmd_measure(o);
    else if (bound->parsed()) r = cmd_bound(o, false);
    else if (overshoot->parsed()) r = cmd_bound(o, true);
    else if (sim->parsed()) r = cmd_simulate(o);
    else if (wit->parsed()) r = cmd_witness(o);
    else if (sweep->parsed()) r = cmd_sweep(o);
    else if (limits->parsed()) r = cmd_limits(o);
    else r = cmd_peak_demo(o);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const EnumerationCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kResourceCap;
  } catch (const PreconditionFailed& e) {
    err << e.what() << '\n';
    return kPrecondition;
  } catch (const PoleOnCircle& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::string body;
  if (o.format == "structured") {
    body = r.envelope.to_json().dump(2) + "\n";
  } else if (o.format == "csv") {
    if (r.csv.empty()) {
      err << "error: command " << r.envelope.command << " has no csv form\n";
      return kUsage;
    }
    body = r.csv;
  } else {
    body = r.text;
    for (const auto& w : r.envelope.warnings) {
      if (body.find(w) == std::string::npos) body += "warning: " + w + "\n";
    }
  }
  if (o.out.empty()) {
    out << body;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << o.out << '\n';
      return kUsage;
    }
    f << body;
  }
  return r.code;
}

}  // namespace qcm::cli
