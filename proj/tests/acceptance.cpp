// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracle_values.hpp"

#include "thermo/cocycle.hpp"
#include "thermo/duality.hpp"
#include "thermo/equilibrium.hpp"
#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/linalg.hpp"
#include "thermo/mp_transitions.hpp"
#include "thermo/pressure.hpp"
#include "thermo/random.hpp"
#include "thermo/zerotemp.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace thermo;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::cout << "criterion " << id << ": " << (out.pass ? "PASS" : "FAIL") << " | " << title << " |"
            << out.detail.str() << " (" << std::fixed;
  std::cout.precision(1);
  std::cout << seconds << " s)" << std::endl;
  std::cout.unsetf(std::ios::fixed);
  std::cout.precision(6);
}

LocallyConstantPotential random_potential(const SystemPtr& sys, int depth, Rng& rng, double scale = 2.0) {
  const auto index = make_word_index(sys, depth);
  std::vector<double> v(index->size());
  for (auto& x : v) x = uniform(rng, -scale, scale);
  return {index, v};
}

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------

void exact_pressure(Outcome& out) {
  struct Case {
    std::string name;
    LocallyConstantPotential phi;
    double expected;
  };
  const std::vector<Case> cases{
      {"full 2-shift", LocallyConstantPotential::constant(full_shift(2), 1, 0.0), oracle::kLog2},
      {"golden mean", LocallyConstantPotential::constant(golden_mean_shift(), 1, 0.0), oracle::kLogGolden},
      {"(0, log 3)", LocallyConstantPotential::from_symbol_values(full_shift(2), {0.0, std::log(3.0)}), oracle::kLog4},
  };
  double worst_exact = 0.0;
  double worst_ratio = 0.0;  // |P - value_n| / ((log 2) / n)
  for (const auto& c : cases) {
    const double p = matrix_pressure(c.phi).log_lambda;
    worst_exact = std::max(worst_exact, std::abs(p - c.expected));
    const auto est = separated_set_pressure(c.phi, 14);
    for (const auto& row : est.depth_sequence) {
      worst_ratio = std::max(worst_ratio, std::abs(p - row.value) / (oracle::kLog2 / row.n));
    }
  }
  out.detail << " max |P - oracle| = " << worst_exact << ", max separated-set gap / ((log 2)/n) = " << worst_ratio;
  out.require(worst_exact <= 1e-10, "matrix pressure within 1e-10");
  out.require(worst_ratio <= 1.0, "separated-set within (log 2)/n for n <= 14");
}

void variational_principle(Outcome& out) {
  Rng rng(2024);
  double worst = 0.0;
  int count = 0;
  for (const auto& sys : {full_shift(2), golden_mean_shift()}) {
    for (int i = 0; i < 100; ++i) {
      const auto phi = random_potential(sys, 1, rng);
      const auto state = gibbs_state(phi);
      const auto dual = dual_entropy(state.measure(), 1);
      const double defect = state.log_lambda() - (dual.value + state.integrate(phi));
      worst = std::max(worst, std::abs(defect));
      ++count;
    }
  }
  out.detail << " " << count << " potentials, max |P - (h + integral)| = " << worst;
  out.require(worst <= 1e-6, "defect within 1e-6");
}

void envelope_equality(Outcome& out) {
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& [sys, seed] : {std::pair{full_shift(2), 301u}, std::pair{golden_mean_shift(), 302u}}) {
    const auto report = envelope_equality_check(random_markov_grid(sys, 50, seed));
    worst = std::max(worst, report.max_gap);
    count += report.rows.size();
  }
  out.detail << " " << count << " Markov measures, max |dual - KS| = " << worst;
  out.require(worst <= 1e-4, "max gap within 1e-4");
}

void tangency(Outcome& out) {
  Rng rng(4004);
  double worst_violation = -INFINITY;
  for (int i = 0; i < 100; ++i) {
    const auto sys = i % 2 ? full_shift(2) : golden_mean_shift();
    const auto phi = random_potential(sys, 1 + i % 2, rng);
    const auto dirs = sample_directions(phi.index(), 50, 1000 + static_cast<std::uint64_t>(i));
    worst_violation = std::max(worst_violation, tangency_check(phi, dirs).max_violation);
  }
  double worst_derivative = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto sys = i % 2 ? full_shift(2) : golden_mean_shift();
    const auto phi = random_potential(sys, 1 + i % 2, rng);
    const auto psi = random_potential(sys, 1 + i % 2, rng);
    const double expected = gibbs_state(phi).integrate(psi);
    worst_derivative = std::max(worst_derivative, std::abs(gateaux_derivative(phi, psi).value - expected));
  }
  out.detail << " max tangency violation = " << worst_violation << ", max |Gateaux - integral| = " << worst_derivative;
  out.require(worst_violation <= 1e-9, "tangency violation within 1e-9");
  out.require(worst_derivative <= 1e-7, "Gateaux derivative within 1e-7");
}

void axioms(Outcome& out) {
  AxiomSuiteOptions opts;
  opts.samples = 200;
  opts.seed = 5005;
  std::vector<std::pair<std::string, AxiomReport>> reports;
  reports.emplace_back("matrix/full2", axiom_suite(full_shift(2), PressureEngine::Matrix, opts));
  reports.emplace_back("matrix/golden", axiom_suite(golden_mean_shift(), PressureEngine::Matrix, opts));
  reports.emplace_back("separated-set/golden", axiom_suite(golden_mean_shift(), PressureEngine::SeparatedSet, opts));
  reports.emplace_back("transfer/doubling", axiom_suite(build_doubling(), opts));
  reports.emplace_back(
      "transfer/affine(3,3/2)",
      axiom_suite(build_affine_map({affine_branch(0.0, 1.0 / 3, 3.0, 0.0), affine_branch(1.0 / 3, 1.0, 1.5, -0.5)}),
                  opts));
  for (const auto& [name, report] : reports) {
    double worst = -INFINITY;
    for (const auto& c : report.checks) worst = std::max(worst, c.worst_violation - c.tolerance);
    out.detail << " " << name << " " << (report.pass() ? "ok" : "violated");
    out.require(report.pass(), name);
  }
  Rng rng(5006);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto sys = i % 2 ? full_shift(2) : golden_mean_shift();
    const auto phi = random_potential(sys, 1 + i % 2, rng);
    const auto psi = random_potential(sys, 1 + (i / 2) % 2, rng);
    const auto report = coboundary_invariance_check(phi, psi);
    worst = std::max(worst, std::abs(report.difference));
    out.require(report.pass, "coboundary sample " + std::to_string(i));
    if (!report.pass) break;
  }
  out.detail << ", coboundary max |difference| = " << worst;
}

void zero_temperature(Outcome& out) {
  const auto phi = LocallyConstantPotential::from_symbol_values(golden_mean_shift(), {0.0, 1.0});
  const auto sweep = temperature_sweep(phi, geometric_grid(50.0, 1.3));
  const auto orbit = periodic_orbit_oracle(phi, 12);
  const auto& last = sweep.rows.back();
  const auto diag = accumulation_diagnostics(sweep, orbit, phi);
  out.detail << " P(50 phi)/50 = " << last.pressure_over_t << ", oracle = " << orbit.max_average << " witness ("
             << format_word(orbit.witness_orbit, 2) << "), entropy(50) = " << last.entropy;
  out.require(last.t == 50.0, "grid ends at t = 50");
  out.require(std::abs(last.pressure_over_t - 0.5) <= 2e-2, "|P/t - 1/2| <= 2e-2");
  out.require(std::abs(orbit.max_average - 0.5) <= 1e-12, "oracle value 1/2");
  out.require(orbit.witness_orbit == Word{0, 1}, "witness (01)");
  out.require(last.entropy <= 1e-6, "entropy at t = 50 within 1e-6");
  out.require(sweep.pressure_over_t_increase() <= 1e-10, "P/t nonincreasing");
  out.require(sweep.integral_decrease() <= 1e-10, "integral nondecreasing");
  out.require(sweep.min_second_difference() >= -1e-9, "convexity in t");
  out.require(diag.pass(), "accumulation diagnostics");
}

void manneville_pomeau(Outcome& out) {
  const auto grid = default_scan_grid();
  double widest = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const MannevillePomeauScanner scanner(alpha);
    const auto scan = phase_scan(scanner, grid, 18);
    for (double t : {1.0, 1.2, 1.5}) {
      const auto* row = scan.row_at(t);
      out.require(row != nullptr, "grid contains t");
      if (!row) continue;
      widest = std::max(widest, row->bracket.width());
      out.require(row->bracket.lower <= 0.0 && row->bracket.upper >= 0.0,
                  "alpha " + format_real(alpha) + " t " + format_real(t) + " bracket contains 0");
      out.require(row->bracket.width() <= 0.05, "width <= 0.05");
    }
    const auto zero = scanner.bracket(0.0, 18);
    out.require(zero.lower == zero.upper && std::abs(zero.lower - oracle::kLog2) <= 1e-15, "P(0) = log 2");
    const auto verdict = scan.row_at(1.0)->verdict.verdict;
    out.detail << " alpha " << alpha << ": verdict at 1 = " << verdict_name(verdict) << ";";
    if (alpha == 0.5) out.require(verdict != Verdict::Smooth, "alpha 0.5 not smooth at t = 1");
    if (alpha == 2.0) out.require(verdict != Verdict::Kink, "alpha 2 not kink at t = 1");
  }
  out.detail << " widest bracket at t in {1, 1.2, 1.5} = " << widest;
}

void cocycles(Outcome& out) {
  const auto full = full_shift(2);
  const auto d = mat2(2, 0, 0, 0.5);
  const CocycleSpec diagonal(full, {d, d});
  double worst_top = 0.0, worst_det = 0.0;
  for (const auto& row : subadditive_pressure(diagonal, SingularWeight({1, 0}), 12).per_depth) {
    worst_top = std::max(worst_top, std::abs(row.value_n - 2 * oracle::kLog2));
  }
  for (const auto& row : subadditive_pressure(diagonal, SingularWeight({1, 1}), 12).per_depth) {
    worst_det = std::max(worst_det, std::abs(row.value_n - oracle::kLog2));
  }
  out.require(worst_top <= 1e-9, "diag alpha (1,0) = 2 log 2");
  out.require(worst_det <= 1e-9, "diag alpha (1,1) = log 2");

  Rng rng(8008);
  double worst_wedge = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd m(3, 3);
    for (Eigen::Index k = 0; k < 9; ++k) m.data()[k] = standard_normal(rng);
    const auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    const double wedge = Eigen::JacobiSVD<Eigen::MatrixXd>(compound_matrix(m, 2)).singularValues()(0);
    worst_wedge = std::max(worst_wedge, std::abs(wedge - s(0) * s(1)));
  }
  out.require(worst_wedge <= 1e-10, "exterior-power identity");

  const CocycleSpec positive(full, {mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)});
  const auto mu = MarkovMeasure::bernoulli(full, {0.5, 0.5});
  SamplingOptions sampling;
  sampling.seed = 8009;
  const auto qr = lyapunov_qr(positive, mu, sampling);
  const auto ext = lyapunov_exterior(positive, mu, 1, sampling);
  const double combined = std::hypot(qr.stderr_values[0], ext.stderr_value);
  const double lyap_gap = std::abs(qr.exponents[0] - ext.value);
  out.require(lyap_gap <= 3 * combined, "QR vs exterior within 3 combined stderr");

  CfhOptions cfh;
  cfh.seed = 8010;
  const auto report = cfh_variational_check(positive, SingularWeight({1, 0}), bernoulli_grid(full, 100), cfh);
  out.require(report.pass, "no CFH violation beyond 1e-6");
  out.detail << " |value - 2 log 2| = " << worst_top << ", |value - log 2| = " << worst_det
             << ", wedge identity err = " << worst_wedge << ", |QR - exterior| = " << lyap_gap << " vs 3 sigma "
             << 3 * combined << ", CFH worst violation = " << report.worst_violation << " gap = " << report.gap;
}

// Writes a config, runs the CLI twice with different thread counts, and
// compares every CSV byte for byte.
void determinism(Outcome& out) {
  const std::filesystem::path root = std::filesystem::temp_directory_path() / "thermo_acceptance";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> configs{
      {"pressure", "run.command = pressure\nsystem.transition = [[1,1],[1,0]]\npotential.values = [0.2, -0.4]\n"},
      {"dual-entropy", "run.command = dual-entropy\nmeasure.kind = markov-grid\nmeasure.grid = 10\nsystem.alphabet = 3\n"},
      {"equilibrium", "run.command = equilibrium\npotential.depth = 2\npotential.values = [0.1, 0.5, -1, 0.3]\n"},
      {"tangency", "run.command = tangency\nsystem.transition = [[1,1],[1,0]]\npotential.values = [0.4, 1]\n"},
      {"zero-temp", "run.command = zero-temp\nsystem.transition = [[1,1],[1,0]]\npotential.values = [0, 1]\n"},
      {"cocycle",
       "run.command = cocycle\ncocycle.generators = [[[2,1],[1,1]], [[1,1],[1,2]]]\ncocycle.alpha = [1, 0]\n"
       "cocycle.n_max = 8\nmeasure.grid = 5\n"},
      {"lyapunov",
       "run.command = lyapunov\ncocycle.generators = [[[2,1],[1,1]], [[1,1],[1,2]]]\nmeasure.kind = bernoulli\n"
       "measure.weights = [0.5, 0.5]\ncocycle.samples = 16\ncocycle.k = 2\n"},
      {"mp-scan", "run.command = mp-scan\nsystem.kind = mp\nsystem.alpha = 0.5\nmp.t_grid = [0.9, 1, 1.1]\nmp.depth = 10\n"},
      {"beta-shift", "run.command = beta-shift\nsystem.kind = beta\nsystem.beta = 1.5\nsystem.depth = 16\n"},
      {"axioms", "run.command = axioms\naxioms.samples = 50\naxioms.engine = separated-set\n"},
  };
  int identical = 0;
  for (const auto& [name, text] : configs) {
    const auto config_path = root / (name + ".conf");
    std::ofstream(config_path) << text << "run.seed = 77\n";
    std::vector<std::filesystem::path> dirs;
    for (int threads : {1, 3}) {
      const auto dir = root / (name + "_" + std::to_string(threads));
      const std::string cmd = std::string(THERMO_CLI_PATH) + " --config " + config_path.string() + " --out " +
                              dir.string() + " --threads " + std::to_string(threads) + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      out.require(status != -1 && WEXITSTATUS(status) != 1, name + " ran without error");
      dirs.push_back(dir);
    }
    bool same = true;
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const auto other = dirs[1] / entry.path().filename();
      same = same && std::filesystem::exists(other) && slurp(entry.path()) == slurp(other);
    }
    out.require(files > 0, name + " wrote CSVs");
    out.require(same, name + " CSVs byte-identical");
    identical += (same && files > 0);
  }
  out.detail << " " << identical << "/" << configs.size() << " commands byte-identical across runs (1 vs 3 threads)";
}

}  // namespace

int main() {
  std::cout.precision(6);
  criterion(1, "exact pressure oracles", exact_pressure);
  criterion(2, "variational principle", variational_principle);
  criterion(3, "dual entropy equals KS entropy", envelope_equality);
  criterion(4, "tangency and Gateaux derivative", tangency);
  criterion(5, "pressure-function axioms", axioms);
  criterion(6, "zero temperature", zero_temperature);
  criterion(7, "Manneville-Pomeau transitions", manneville_pomeau);
  criterion(8, "cocycles", cocycles);
  criterion(9, "determinism", determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
