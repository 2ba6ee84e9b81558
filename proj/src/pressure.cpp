#include "thermo/pressure.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/kernels.hpp"
#include "thermo/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace thermo {

Eigen::MatrixXd weighted_transition(const LocallyConstantPotential& phi) {
  const auto& index = *phi.index();
  const auto n = static_cast<Eigen::Index>(index.size());
  const double top = phi.max_value();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t u = 0; u < index.size(); ++u) {
    const double w = std::exp(phi.value(u) - top);
    for (std::size_t v : index.extensions(u)) {
      l(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = w;
    }
  }
  return l;
}

PerronData matrix_pressure(const LocallyConstantPotential& phi, const PerronOptions& options) {
  return perron(weighted_transition(phi), phi.max_value(), options);
}

PerronData matrix_pressure(const SystemPtr& sys, const LocallyConstantPotential& phi,
                           const PerronOptions& options) {
  require_same_system(sys, phi.system(), "matrix pressure");
  return matrix_pressure(phi, options);
}

// ---------------------------------------------------------------------------

void PressureEstimate::write_csv(std::ostream& out) const {
  out << "n,value_n,lower,upper\n";
  for (const auto& row : depth_sequence) {
    out << row.n << ',' << format_real(row.value) << ',' << format_real(row.lower) << ','
        << format_real(row.upper) << '\n';
  }
}

PressureEstimate separated_set_pressure(const LocallyConstantPotential& phi, int n_max,
                                        bool parallel) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be positive");
  const auto log_sums = parallel ? kernels::log_sup_word_sums_parallel(phi, n_max)
                                 : kernels::log_sup_word_sums_serial(phi, n_max);
  const double log_m = std::log(static_cast<double>(phi.system()->alphabet_size()));
  PressureEstimate est;
  double running_upper = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double value_n = log_sums[static_cast<std::size_t>(n - 1)] / n;
    running_upper = std::min(running_upper, value_n);
    est.depth_sequence.push_back({n, value_n, running_upper - log_m / n, running_upper});
  }
  est.upper = running_upper;
  est.lower = running_upper - log_m / n_max;
  est.value = std::min(est.depth_sequence.back().value, est.upper);
  return est;
}

// ---------------------------------------------------------------------------
// Axiom suite

std::string engine_name(PressureEngine engine) {
  switch (engine) {
    case PressureEngine::Matrix: return "matrix";
    case PressureEngine::SeparatedSet: return "separated-set";
    case PressureEngine::TransferOperator: return "transfer-operator";
  }
  return "unknown";
}

bool AxiomReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.pass; });
}

void AxiomReport::write_csv(std::ostream& out) const {
  out << "axiom,worst_violation,tolerance,pass\n";
  for (const auto& c : checks) {
    out << c.axiom << ',' << format_real(c.worst_violation) << ',' << format_real(c.tolerance) << ','
        << (c.pass ? "true" : "false") << '\n';
  }
}

namespace {

constexpr double kExactAxiomTolerance = 1e-8;

struct Evaluation {
  double value = 0.0;
  double width = 0.0;
};

// One sampled violation of one axiom, positive when the axiom fails.
struct Violation {
  double amount = -std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
};

enum Axiom { kMonotonicity, kTranslation, kConvexity, kLipschitz, kAxiomCount };

constexpr const char* kAxiomNames[kAxiomCount] = {"monotonicity", "translation", "convexity",
                                                  "lipschitz"};

AxiomReport assemble(PressureEngine engine, const AxiomSuiteOptions& options,
                     const std::vector<std::array<Violation, kAxiomCount>>& per_sample) {
  AxiomReport report{engine, options.samples, options.seed, {}};
  for (int a = 0; a < kAxiomCount; ++a) {
    AxiomCheck check{kAxiomNames[a], -std::numeric_limits<double>::infinity(), 0.0, true};
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (const auto& sample : per_sample) {
      const auto& v = sample[static_cast<std::size_t>(a)];
      const double excess = v.amount - v.tolerance;
      if (excess > worst_excess) {
        worst_excess = excess;
        check.worst_violation = v.amount;
        check.tolerance = v.tolerance;
      }
      if (excess > 0.0) check.pass = false;
    }
    if (per_sample.empty()) check.worst_violation = 0.0;
    report.checks.push_back(check);
  }
  return report;
}

void run_samples(std::size_t count, bool parallel, const std::function<void(std::size_t)>& body) {
  if (parallel) {
    kernels::for_each_index_parallel(count, body);
  } else {
    kernels::for_each_index_serial(count, body);
  }
}

constexpr double kTranslations[] = {-2.0, 0.5, 3.0};

}  // namespace

AxiomReport axiom_suite(const SystemPtr& sys, PressureEngine engine,
                        const AxiomSuiteOptions& options) {
  if (engine == PressureEngine::TransferOperator) {
    throw Error(ErrorCode::InvalidArgument, "the transfer-operator engine runs on interval maps");
  }
  const auto index = make_word_index(sys, options.depth);
  const std::size_t dim = index->size();

  struct Sample {
    std::vector<double> phi, psi, bump;
    double shift = 0.0;
    double mix = 0.5;
  };
  // Draw everything up front so the evaluation order cannot affect the data.
  Rng rng(options.seed);
  std::vector<Sample> samples(static_cast<std::size_t>(options.samples));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    auto& smp = samples[s];
    for (std::size_t i = 0; i < dim; ++i) {
      smp.phi.push_back(uniform(rng, -2.0, 2.0));
      smp.psi.push_back(uniform(rng, -2.0, 2.0));
      smp.bump.push_back(uniform(rng, 0.0, 1.0));
    }
    smp.shift = s < 3 ? kTranslations[s] : uniform(rng, -5.0, 5.0);
    smp.mix = uniform(rng, 0.05, 0.95);
  }

  const auto evaluate = [&](const std::vector<double>& values) -> Evaluation {
    const LocallyConstantPotential p(index, values);
    if (engine == PressureEngine::Matrix) return {matrix_pressure(p).log_lambda, 0.0};
    const auto est = separated_set_pressure(p, options.n_max, false);
    return {est.value, est.width()};
  };
  const auto tolerance = [&](std::initializer_list<Evaluation> evals) {
    double t = kExactAxiomTolerance;
    for (const auto& e : evals) t += e.width;
    return t;
  };

  std::vector<std::array<Violation, kAxiomCount>> results(samples.size());
  run_samples(samples.size(), options.parallel, [&](std::size_t s) {
    const auto& smp = samples[s];
    std::vector<double> shifted(dim), raised(dim), mixed(dim);
    double distance = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      shifted[i] = smp.phi[i] + smp.shift;
      raised[i] = smp.phi[i] + smp.bump[i];
      mixed[i] = smp.mix * smp.phi[i] + (1.0 - smp.mix) * smp.psi[i];
      distance = std::max(distance, std::abs(smp.phi[i] - smp.psi[i]));
    }
    const auto p_phi = evaluate(smp.phi);
    const auto p_psi = evaluate(smp.psi);
    const auto p_shifted = evaluate(shifted);
    const auto p_raised = evaluate(raised);
    const auto p_mixed = evaluate(mixed);
    auto& out = results[s];
    out[kMonotonicity] = {p_phi.value - p_raised.value, tolerance({p_phi, p_raised})};
    out[kTranslation] = {std::abs(p_shifted.value - p_phi.value - smp.shift),
                         tolerance({p_phi, p_shifted})};
    out[kConvexity] = {p_mixed.value - smp.mix * p_phi.value - (1.0 - smp.mix) * p_psi.value,
                       tolerance({p_phi, p_psi, p_mixed})};
    out[kLipschitz] = {std::abs(p_phi.value - p_psi.value) - distance, tolerance({p_phi, p_psi})};
  });
  return assemble(engine, options, results);
}

AxiomReport axiom_suite(const IntervalMapSystem& map, const AxiomSuiteOptions& options) {
  const std::size_t branches = map.branch_count();
  // Range of log|f'| over each branch; monotone derivatives put it at the ends.
  std::vector<std::pair<double, double>> log_derivative_range;
  for (const auto& br : map.branches()) {
    const double a = std::log(std::abs(br.derivative(br.lo)));
    const double b = std::log(std::abs(br.derivative(br.hi)));
    log_derivative_range.emplace_back(std::min(a, b), std::max(a, b));
  }
  TransferOptions transfer;
  transfer.parallel = false;
  const TransferOperatorEngine engine(map, transfer);

  struct Potential {
    double t = 0.0;
    std::vector<double> shift;
  };
  struct Sample {
    Potential phi, psi;
    std::vector<double> bump;
    double translation = 0.0;
    double mix = 0.5;
  };
  Rng rng(options.seed);
  std::vector<Sample> samples(static_cast<std::size_t>(options.samples));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    auto& smp = samples[s];
    smp.phi.t = uniform(rng, 0.0, 2.0);
    smp.psi.t = uniform(rng, 0.0, 2.0);
    for (std::size_t b = 0; b < branches; ++b) {
      smp.phi.shift.push_back(uniform(rng, -1.0, 1.0));
      smp.psi.shift.push_back(uniform(rng, -1.0, 1.0));
      smp.bump.push_back(uniform(rng, 0.0, 1.0));
    }
    smp.translation = s < 3 ? kTranslations[s] : uniform(rng, -5.0, 5.0);
    smp.mix = uniform(rng, 0.05, 0.95);
  }

  const auto evaluate = [&](const Potential& p) -> Evaluation {
    const auto est = engine.pressure(p.t, options.transfer_depth, p.shift);
    return {est.value, est.width()};
  };
  const auto tolerance = [&](std::initializer_list<Evaluation> evals) {
    double t = kExactAxiomTolerance;
    for (const auto& e : evals) t += e.width;
    return t;
  };
  const auto sup_distance = [&](const Potential& a, const Potential& b) {
    double d = 0.0;
    const double dt = a.t - b.t;
    for (std::size_t i = 0; i < branches; ++i) {
      const double dc = a.shift[i] - b.shift[i];
      const auto [lo, hi] = log_derivative_range[i];
      d = std::max({d, std::abs(dc - dt * lo), std::abs(dc - dt * hi)});
    }
    return d;
  };

  std::vector<std::array<Violation, kAxiomCount>> results(samples.size());
  run_samples(samples.size(), options.parallel, [&](std::size_t s) {
    const auto& smp = samples[s];
    Potential shifted = smp.phi, raised = smp.phi, mixed;
    mixed.t = smp.mix * smp.phi.t + (1.0 - smp.mix) * smp.psi.t;
    for (std::size_t b = 0; b < branches; ++b) {
      shifted.shift[b] += smp.translation;
      raised.shift[b] += smp.bump[b];
      mixed.shift.push_back(smp.mix * smp.phi.shift[b] + (1.0 - smp.mix) * smp.psi.shift[b]);
    }
    const auto p_phi = evaluate(smp.phi);
    const auto p_psi = evaluate(smp.psi);
    const auto p_shifted = evaluate(shifted);
    const auto p_raised = evaluate(raised);
    const auto p_mixed = evaluate(mixed);
    auto& out = results[s];
    out[kMonotonicity] = {p_phi.value - p_raised.value, tolerance({p_phi, p_raised})};
    out[kTranslation] = {std::abs(p_shifted.value - p_phi.value - smp.translation),
                         tolerance({p_phi, p_shifted})};
    out[kConvexity] = {p_mixed.value - smp.mix * p_phi.value - (1.0 - smp.mix) * p_psi.value,
                       tolerance({p_phi, p_psi, p_mixed})};
    out[kLipschitz] = {std::abs(p_phi.value - p_psi.value) - sup_distance(smp.phi, smp.psi),
                       tolerance({p_phi, p_psi})};
  });
  return assemble(PressureEngine::TransferOperator, options, results);
}

CoboundaryReport coboundary_invariance_check(const LocallyConstantPotential& phi,
                                             const LocallyConstantPotential& psi) {
  require_same_system(phi.system(), psi.system(), "coboundary check");
  CoboundaryReport r;
  r.pressure = matrix_pressure(phi).log_lambda;
  r.pressure_with_coboundary = matrix_pressure(phi + coboundary(psi)).log_lambda;
  r.difference = r.pressure_with_coboundary - r.pressure;
  r.pass = std::abs(r.difference) <= 1e-9;
  return r;
}

}  // namespace thermo
