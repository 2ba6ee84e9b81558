#include "thermo/run.hpp"

#include "thermo/cocycle.hpp"
#include "thermo/duality.hpp"
#include "thermo/equilibrium.hpp"
#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/mp_transitions.hpp"
#include "thermo/pressure.hpp"
#include "thermo/random.hpp"
#include "thermo/zerotemp.hpp"

#include <json.hpp>

#include <chrono>
#include <charconv>
#include <cmath>
#include <sstream>

namespace thermo {

namespace {

// ---------------------------------------------------------------------------
// Building library objects from the configuration

SystemPtr symbolic_system(const SystemConfig& s) {
  switch (s.kind) {
    case SystemKind::Sft:
      if (s.transition.empty()) {
        return build_sft(s.alphabet, std::vector<std::vector<int>>(
                                         s.alphabet, std::vector<int>(s.alphabet, 1)),
                         s.label.empty() ? "full-" + std::to_string(s.alphabet) : s.label);
      }
      return build_sft(s.alphabet, s.transition, s.label);
    case SystemKind::Beta:
      return build_beta_shift(s.beta, s.depth).system;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "system kind " + std::string(system_kind_name(s.kind)) +
                      " has no symbolic presentation for this command");
  }
}

IntervalMapSystem interval_system(const SystemConfig& s) {
  switch (s.kind) {
    case SystemKind::Mp: return build_manneville_pomeau(s.alpha);
    case SystemKind::Doubling: return build_doubling();
    case SystemKind::Interval: {
      std::vector<Branch> branches;
      for (const auto& b : s.branches) branches.push_back(affine_branch(b[0], b[1], b[2], b[3]));
      return build_affine_map(std::move(branches), s.label.empty() ? "affine" : s.label);
    }
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "system kind " + std::string(system_kind_name(s.kind)) + " is not an interval map");
  }
}

bool is_interval_kind(SystemKind k) {
  return k == SystemKind::Mp || k == SystemKind::Doubling || k == SystemKind::Interval;
}

LocallyConstantPotential potential(const SystemPtr& sys, const PotentialConfig& p) {
  if (p.values.empty()) return LocallyConstantPotential::constant(sys, p.depth, 0.0);
  return LocallyConstantPotential(make_word_index(sys, p.depth), p.values);
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n > 0 ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m) {
      throw Error(ErrorCode::InvalidArgument, "ragged matrix rows");
    }
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

MarkovMeasure single_measure(const SystemPtr& sys, const RunConfig& c) {
  const auto& m = c.measure;
  if (m.kind == "parry") return MarkovMeasure::parry(sys);
  if (m.kind == "bernoulli") return MarkovMeasure::bernoulli(sys, m.weights);
  if (m.kind == "markov") return MarkovMeasure::from_stochastic(sys, to_matrix(m.stochastic));
  if (m.kind == "point") return MarkovMeasure::fixed_point(sys, m.symbol);
  if (m.kind == "gibbs") {
    const auto phi = potential(sys, c.potential);
    if (phi.depth() != 1) {
      throw Error(ErrorCode::InvalidArgument, "a Gibbs measure here needs a depth-1 potential");
    }
    return gibbs_state(phi).measure();
  }
  throw Error(ErrorCode::InvalidArgument, "measure kind " + m.kind + " is not a single measure");
}

std::vector<MarkovMeasure> measure_grid(const SystemPtr& sys, const RunConfig& c) {
  if (c.measure.kind == "bernoulli-grid") return bernoulli_grid(sys, c.measure.grid);
  if (c.measure.kind == "markov-grid") return random_markov_grid(sys, c.measure.grid, c.seed);
  return {single_measure(sys, c)};
}

CocycleSpec cocycle_spec(const SystemPtr& sys, const CocycleConfig& cc) {
  std::vector<Eigen::MatrixXd> generators;
  for (const auto& g : cc.generators) generators.push_back(to_matrix(g));
  return CocycleSpec(sys, std::move(generators));
}

DualOptions dual_options(const RunConfig& c) {
  DualOptions o;
  o.tolerance = c.tol;
  o.max_iterations = c.max_iter;
  return o;
}

// ---------------------------------------------------------------------------
// Output

class Artifacts {
 public:
  Artifacts(const std::filesystem::path& dir, RunOutcome& outcome) : dir_(dir), outcome_(outcome) {}

  template <class Writer>
  void csv(const std::string& name, Writer&& writer) {
    std::ostringstream out;
    writer(out);
    write_text_file(dir_ / name, out.str());
    outcome_.files.push_back(name);
  }

 private:
  std::filesystem::path dir_;
  RunOutcome& outcome_;
};

void fail_check(RunOutcome& outcome, const std::string& what) {
  outcome.exit_code = kExitCheckFailed;
  outcome.status = "check-failed";
  if (!outcome.message.empty()) outcome.message += "; ";
  outcome.message += what;
}

// ---------------------------------------------------------------------------
// Commands

void run_pressure(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  if (is_interval_kind(c.system.kind)) {
    TransferOptions t;
    t.parallel = opts.parallel;
    const auto est = transfer_operator_pressure(interval_system(c.system), c.pressure.t,
                                                c.pressure.depth, t);
    out.scalars["value"] = est.value;
    out.scalars["lower"] = est.lower;
    out.scalars["upper"] = est.upper;
    files.csv("pressure.csv", [&](std::ostream& s) { est.write_csv(s); });
    return;
  }
  const auto sys = symbolic_system(c.system);
  const auto phi = potential(sys, c.potential);
  const auto exact = matrix_pressure(phi);
  const auto est = separated_set_pressure(phi, c.pressure.n_max, opts.parallel);
  out.scalars["value"] = exact.log_lambda;
  out.scalars["separated_set_value"] = est.value;
  out.scalars["separated_set_lower"] = est.lower;
  out.scalars["separated_set_upper"] = est.upper;
  files.csv("pressure.csv", [&](std::ostream& s) { est.write_csv(s); });
}

EnvelopeRow gibbs_envelope_row(const SystemPtr& sys, const RunConfig& c) {
  const auto phi = potential(sys, c.potential);
  const auto state = gibbs_state(phi);
  const int depth = c.measure.depth > 0 ? c.measure.depth : phi.depth() + 1;
  const auto result = dual_entropy_from_marginal(state.marginal(depth), dual_options(c));
  const double ks = state.entropy();
  return {"gibbs", result.value, ks, std::abs(result.value - ks), result.iterations,
          result.gradient_norm};
}

void run_dual_entropy(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  const auto sys = symbolic_system(c.system);
  EnvelopeReport report;
  if (c.measure.kind == "gibbs" && c.potential.depth > 1) {
    report.rows.push_back(gibbs_envelope_row(sys, c));
    report.max_gap = report.rows.front().gap;
    report.pass = report.max_gap <= 1e-4;
  } else {
    report = envelope_equality_check(measure_grid(sys, c), c.measure.depth, dual_options(c),
                                     opts.parallel);
  }
  out.scalars["measures"] = static_cast<double>(report.rows.size());
  out.scalars["max_gap"] = report.max_gap;
  if (report.rows.size() == 1) {
    out.scalars["value"] = report.rows.front().value;
    out.scalars["ks_entropy"] = report.rows.front().ks_entropy;
  }
  files.csv("dual_entropy.csv", [&](std::ostream& s) { report.write_csv(s); });
  if (!report.pass) fail_check(out, "dual entropy differs from the entropy by more than 1e-4");
}

void run_equilibrium(const RunConfig& c, const RunOptions&, Artifacts& files, RunOutcome& out) {
  const auto sys = symbolic_system(c.system);
  const auto phi = potential(sys, c.potential);
  const auto state = gibbs_state(phi);
  const int depth = c.measure.depth > 0 ? c.measure.depth : phi.depth();
  const auto marginal = state.marginal(depth);
  files.csv("marginal.csv", [&](std::ostream& s) { marginal.write_csv(s); });

  const double tolerance = std::max(c.tol, 1e-6);
  const auto report = variational_identity_check(phi, tolerance, 20, c.seed);
  out.scalars["pressure"] = report.pressure;
  out.scalars["entropy"] = state.entropy();
  out.scalars["dual_entropy"] = report.dual_entropy;
  out.scalars["integral"] = report.integral;
  out.scalars["defect"] = report.defect;
  out.scalars["competitor_excess"] = report.competitor_excess;
  if (!report.pass) fail_check(out, "variational identity check failed");
}

void run_tangency(const RunConfig& c, const RunOptions&, Artifacts& files, RunOutcome& out) {
  const auto sys = symbolic_system(c.system);
  const auto phi = potential(sys, c.potential);
  const auto directions = sample_directions(phi.index(), c.tangency.directions, c.seed);
  const auto report = tangency_check(phi, directions);
  out.scalars["max_violation"] = report.max_violation;
  out.scalars["directions_tested"] = report.directions_tested;
  files.csv("tangency.csv", [&](std::ostream& s) { report.write_csv(s); });
  if (!report.pass(c.tol)) fail_check(out, "tangency inequality violated beyond run.tol");
}

void run_zero_temp(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  const auto sys = symbolic_system(c.system);
  const auto phi = potential(sys, c.potential);
  const auto grid = geometric_grid(c.sweep.t_max, c.sweep.ratio);
  const auto sweep = temperature_sweep(phi, grid, phi.depth(), opts.parallel);
  const auto oracle = periodic_orbit_oracle(phi, c.sweep.max_period, opts.parallel);
  const auto diag = accumulation_diagnostics(sweep, oracle, phi);
  files.csv("sweep.csv", [&](std::ostream& s) { sweep.write_csv(s); });

  const auto& last = sweep.rows.back();
  out.scalars["t_max"] = last.t;
  out.scalars["pressure_over_t"] = last.pressure_over_t;
  out.scalars["phi_integral"] = last.phi_integral;
  out.scalars["entropy"] = last.entropy;
  out.scalars["oracle_max_average"] = oracle.max_average;
  out.scalars["oracle_period"] = oracle.period;
  out.scalars["integral_gap"] = diag.integral_gap;
  out.labels["oracle_witness"] = format_word(oracle.witness_orbit, sys->alphabet_size());

  if (sweep.pressure_over_t_increase() > 1e-10 || sweep.integral_decrease() > 1e-10) {
    fail_check(out, "monotonicity along the sweep violated");
  }
  if (!diag.pass()) fail_check(out, "accumulation diagnostics failed");
}

void run_cocycle(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  const auto sys = symbolic_system(c.system);
  const auto spec = cocycle_spec(sys, c.cocycle);
  const SingularWeight alpha(c.cocycle.alpha);
  const auto est = subadditive_pressure(spec, alpha, c.cocycle.n_max, opts.parallel);
  files.csv("cocycle_pressure.csv", [&](std::ostream& s) { est.write_csv(s); });
  out.scalars["value"] = est.value;
  out.scalars["fekete_upper"] = est.fekete_upper;

  const std::vector<MarkovMeasure> grid =
      c.measure.kind == "bernoulli-grid" || c.measure.kind == "markov-grid"
          ? measure_grid(sys, c)
          : random_markov_grid(sys, c.measure.grid, c.seed);
  CfhOptions cfh;
  cfh.n_max = c.cocycle.n_max;
  cfh.psi_depth = c.cocycle.N;
  cfh.seed = c.seed;
  cfh.parallel = opts.parallel;
  const auto report = cfh_variational_check(spec, alpha, grid, cfh);
  files.csv("cfh.csv", [&](std::ostream& s) {
    s << "mu_id,entropy,functional_upper,worst_violation,psi_integral,psi_stderr\n";
    for (const auto& r : report.rows) {
      s << r.mu_id << ',' << format_real(r.entropy) << ',' << format_real(r.functional_upper) << ','
        << format_real(r.worst_violation) << ',' << format_real(r.psi_integral) << ','
        << format_real(r.psi_stderr) << '\n';
    }
  });
  out.scalars["cfh_best_value"] = report.best_value;
  out.scalars["cfh_gap"] = report.gap;
  out.scalars["cfh_worst_violation"] = report.worst_violation;
  if (!report.pass) fail_check(out, "variational inequality violated beyond 1e-6");
}

void run_lyapunov(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  const auto sys = symbolic_system(c.system);
  const auto spec = cocycle_spec(sys, c.cocycle);
  const auto mu = single_measure(sys, c);
  SamplingOptions s;
  s.n_steps = c.cocycle.n_steps;
  s.samples = c.cocycle.samples;
  s.seed = c.seed;
  s.parallel = opts.parallel;
  const auto spectrum = lyapunov_qr(spec, mu, s);
  files.csv("spectrum.csv", [&](std::ostream& o) { spectrum.write_csv(o); });
  const auto ext = lyapunov_exterior(spec, mu, c.cocycle.k, s);
  double partial = 0.0;
  for (int i = 0; i < c.cocycle.k; ++i) partial += spectrum.exponents[static_cast<std::size_t>(i)];
  for (std::size_t i = 0; i < spectrum.exponents.size(); ++i) {
    out.scalars["lambda_" + std::to_string(i + 1)] = spectrum.exponents[i];
  }
  out.scalars["exterior_sum"] = ext.value;
  out.scalars["exterior_stderr"] = ext.stderr_value;
  out.scalars["qr_partial_sum"] = partial;
}

void run_mp_scan(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  if (c.system.kind != SystemKind::Mp) {
    throw Error(ErrorCode::InvalidArgument, "mp-scan needs system.kind = mp");
  }
  TransferOptions t;
  t.parallel = opts.parallel;
  const MannevillePomeauScanner scanner(c.system.alpha, t);
  const auto grid = c.mp.t_grid.empty() ? default_scan_grid() : c.mp.t_grid;
  const auto scan = phase_scan(scanner, grid, c.mp.depth);
  files.csv("mp_scan.csv", [&](std::ostream& s) { scan.write_csv(s); });
  int kinks = 0;
  double widest = 0.0;
  for (const auto& r : scan.rows) {
    kinks += r.verdict.verdict == Verdict::Kink;
    widest = std::max(widest, r.bracket.width());
  }
  out.scalars["alpha"] = c.system.alpha;
  out.scalars["kinks"] = kinks;
  out.scalars["max_width"] = widest;
  if (const auto* at_one = scan.row_at(1.0)) {
    out.labels["verdict_at_1"] = verdict_name(at_one->verdict.verdict);
  }
}

void run_beta_shift(const RunConfig& c, const RunOptions&, Artifacts& files, RunOutcome& out) {
  const double target = std::log(c.system.beta);
  std::ostringstream rows;
  rows << "depth,entropy,error\n";
  double last_error = 0.0;
  for (int d = 1; d <= c.system.depth; ++d) {
    const auto beta = build_beta_shift(c.system.beta, d);
    const auto zero = LocallyConstantPotential::constant(beta.system, 1, 0.0);
    const double h = matrix_pressure(zero).log_lambda;
    last_error = h - target;
    rows << d << ',' << format_real(h) << ',' << format_real(last_error) << '\n';
  }
  files.csv("beta_shift.csv", [&](std::ostream& s) { s << rows.str(); });
  out.scalars["log_beta"] = target;
  out.scalars["entropy"] = target + last_error;
  out.scalars["error"] = last_error;
}

PressureEngine parse_engine(const std::string& name) {
  if (name == "matrix") return PressureEngine::Matrix;
  if (name == "separated-set") return PressureEngine::SeparatedSet;
  return PressureEngine::TransferOperator;
}

void run_axioms(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  AxiomSuiteOptions a;
  a.samples = c.axioms.samples;
  a.seed = c.seed;
  a.depth = c.potential.depth;
  a.n_max = c.pressure.n_max;
  a.parallel = opts.parallel;
  const auto engine = parse_engine(c.axioms.engine);
  AxiomReport report;
  bool coboundary_pass = true;
  if (engine == PressureEngine::TransferOperator) {
    report = axiom_suite(interval_system(c.system), a);
  } else {
    const auto sys = symbolic_system(c.system);
    report = axiom_suite(sys, engine, a);
    // Coboundary invariance on a few random pairs.
    Rng rng(c.seed);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const auto index = make_word_index(sys, c.potential.depth);
      std::vector<double> phi_values(index->size()), psi_values(index->size());
      for (auto& v : phi_values) v = uniform(rng, -1.0, 1.0);
      for (auto& v : psi_values) v = uniform(rng, -1.0, 1.0);
      const auto cob = coboundary_invariance_check(LocallyConstantPotential(index, phi_values),
                                                   LocallyConstantPotential(index, psi_values));
      worst = std::max(worst, std::abs(cob.difference));
      coboundary_pass = coboundary_pass && cob.pass;
    }
    out.scalars["coboundary_worst"] = worst;
  }
  files.csv("axioms.csv", [&](std::ostream& s) { report.write_csv(s); });
  for (const auto& check : report.checks) {
    out.scalars["worst_" + check.axiom] = check.worst_violation;
  }
  if (!report.pass()) fail_check(out, "pressure-function axiom violated");
  if (!coboundary_pass) fail_check(out, "coboundary invariance violated");
}

void dispatch(const RunConfig& c, const RunOptions& opts, Artifacts& files, RunOutcome& out) {
  switch (c.command) {
    case Command::Pressure: return run_pressure(c, opts, files, out);
    case Command::DualEntropy: return run_dual_entropy(c, opts, files, out);
    case Command::Equilibrium: return run_equilibrium(c, opts, files, out);
    case Command::Tangency: return run_tangency(c, opts, files, out);
    case Command::ZeroTemp: return run_zero_temp(c, opts, files, out);
    case Command::Cocycle: return run_cocycle(c, opts, files, out);
    case Command::Lyapunov: return run_lyapunov(c, opts, files, out);
    case Command::MpScan: return run_mp_scan(c, opts, files, out);
    case Command::BetaShift: return run_beta_shift(c, opts, files, out);
    case Command::Axioms: return run_axioms(c, opts, files, out);
  }
}

// Rounded to the same 12 significant digits as the CSVs; non-finite becomes null.
nlohmann::ordered_json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  const std::string text = format_real(x);
  double rounded = x;
  std::from_chars(text.data(), text.data() + text.size(), rounded);
  return rounded;
}

void write_summary(const RunConfig* config, const RunOutcome& outcome, const RunOptions& options) {
  std::filesystem::create_directories(options.out_dir);
  write_text_file(options.out_dir / "summary.json", summary_json(config, outcome));
}

}  // namespace

std::string summary_json(const RunConfig* config, const RunOutcome& outcome) {
  nlohmann::ordered_json j;
  j["command"] = config ? std::string(command_name(config->command)) : std::string();
  j["status"] = outcome.status;
  j["exit_code"] = outcome.exit_code;
  j["wall_time_seconds"] = number(outcome.wall_time_seconds);
  j["seed"] = config ? config->seed : 0;
  j["version"] = std::string(kLibraryVersion);
  nlohmann::ordered_json scalars = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outcome.scalars) scalars[k] = number(v);
  j["scalars"] = scalars;
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outcome.labels) labels[k] = v;
  j["labels"] = labels;
  j["files"] = outcome.files;
  j["error"] = outcome.error_name.empty() ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(outcome.error_name);
  j["message"] = outcome.message;
  return j.dump(2) + "\n";
}

RunOutcome run(const RunConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  try {
    std::filesystem::create_directories(options.out_dir);
    Artifacts files(options.out_dir, outcome);
    dispatch(config, options, files, outcome);
  } catch (const Error& e) {
    outcome.exit_code = kExitError;
    outcome.status = "error";
    outcome.error_name = std::string(e.name());
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitError;
    outcome.status = "error";
    outcome.error_name = "InternalError";
    outcome.message = e.what();
  }
  outcome.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_summary(&config, outcome, options);
  } catch (const std::exception& e) {
    outcome.exit_code = kExitError;
    outcome.status = "error";
    outcome.error_name = "InternalError";
    outcome.message = std::string("cannot write summary: ") + e.what();
  }
  return outcome;
}

RunOutcome report_config_issues(const std::vector<ConfigIssue>& issues, const RunOptions& options) {
  RunOutcome outcome;
  outcome.exit_code = kExitError;
  outcome.status = "error";
  outcome.error_name = issues.empty() ? "ParseError" : issues.front().kind;
  for (const auto& issue : issues) {
    if (!outcome.message.empty()) outcome.message += "; ";
    outcome.message += issue.describe();
  }
  try {
    write_summary(nullptr, outcome, options);
  } catch (const std::exception&) {
    // The issues still reach stderr through the caller.
  }
  return outcome;
}

}  // namespace thermo
