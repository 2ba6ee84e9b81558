#include "thermo/duality.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/kernels.hpp"
#include "thermo/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

namespace {

struct ObjectiveState {
  double value = 0.0;          // P(phi) - <m, phi>
  Eigen::VectorXd gradient;    // Gibbs marginal - m
  Eigen::MatrixXd stochastic;  // Gibbs chain on the blocks
  Eigen::VectorXd stationary;
};

class DualObjective {
 public:
  DualObjective(WordIndexPtr index, Eigen::VectorXd target)
      : index_(std::move(index)), target_(std::move(target)) {}

  [[nodiscard]] ObjectiveState evaluate(const Eigen::VectorXd& phi) const {
    const LocallyConstantPotential p(index_, {phi.data(), phi.data() + phi.size()});
    const auto state = gibbs_state(p);
    ObjectiveState s;
    s.value = state.log_lambda() - target_.dot(phi);
    s.stationary = state.measure().stationary();
    s.stochastic = state.measure().stochastic();
    s.gradient = s.stationary - target_;
    return s;
  }

  // Second derivative of the pressure: the asymptotic covariance of the
  // block indicators under the Gibbs chain.
  [[nodiscard]] static Eigen::MatrixXd hessian(const ObjectiveState& s) {
    const auto n = s.stationary.size();
    const Eigen::MatrixXd one_pi = Eigen::VectorXd::Ones(n) * s.stationary.transpose();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd fundamental = (id - s.stochastic + one_pi).partialPivLu().inverse();
    const Eigen::MatrixXd tail = fundamental - id;
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        const double pa = s.stationary(a);
        const double pb = s.stationary(b);
        h(a, b) = (a == b ? pa : 0.0) - pa * pb + pa * tail(a, b) + pb * tail(b, a);
      }
    }
    return 0.5 * (h + h.transpose());
  }

  [[nodiscard]] const WordIndexPtr& index() const { return index_; }
  [[nodiscard]] const Eigen::VectorXd& target() const { return target_; }

 private:
  WordIndexPtr index_;
  Eigen::VectorXd target_;
};

// Gauge fix (max = 0) and clamp from below; returns true if the clamp bit.
bool normalize(Eigen::VectorXd& phi) {
  phi.array() -= phi.maxCoeff();
  bool clamped = false;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    if (phi(i) < -kPotentialClamp) {
      phi(i) = -kPotentialClamp;
      clamped = true;
    }
  }
  return clamped;
}

double max_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

// Longest accepted move of any coordinate per iteration. Far from the optimum
// the objective is nearly linear, and a full Newton step lands on potentials
// whose Gibbs chain is almost deterministic.
constexpr double kMaxStep = 2.0;

Eigen::VectorXd target_vector(const CylinderMarginal& target) {
  const auto w = target.weights();
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace

DualEntropyResult dual_entropy_from_marginal(const CylinderMarginal& target,
                                             const DualOptions& options) {
  const DualObjective objective(target.index(), target_vector(target));
  const auto n = objective.target().size();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  bool clamped = false;
  auto state = objective.evaluate(phi);
  double damping = 1e-10;
  int iter = 0;
  for (; iter < options.max_iterations && max_norm(state.gradient) > options.tolerance; ++iter) {
    // Constants and coboundaries are flat directions of the objective. The
    // step is restricted to the complement of the numerical null space, so
    // the iterate cannot drift toward extreme but equally good potentials.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(DualObjective::hessian(state));
    const Eigen::VectorXd& curvature = eig.eigenvalues();
    const double scale = std::max(curvature.maxCoeff(), 1e-300);
    const Eigen::VectorXd projected = eig.eigenvectors().transpose() * state.gradient;
    bool moved = false;
    for (int attempt = 0; attempt < 40 && !moved; ++attempt) {
      Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (curvature(i) > 1e-11 * scale) coeffs(i) = -projected(i) / (curvature(i) + damping * scale);
      }
      const Eigen::VectorXd step = eig.eigenvectors() * coeffs;
      const double slope = state.gradient.dot(step);
      if (!step.allFinite() || !(slope < 0.0)) {
        damping *= 10.0;
        continue;
      }
      const double slack = 1e-13 * std::max(1.0, std::abs(state.value));
      const double first = std::min(1.0, kMaxStep / std::max(max_norm(step), 1e-300));
      for (double s = first; s >= 1e-12; s *= 0.5) {
        Eigen::VectorXd trial = phi + s * step;
        const bool trial_clamped = normalize(trial);
        const auto next = objective.evaluate(trial);
        if (next.value <= state.value + 1e-4 * s * slope + slack) {
          phi = std::move(trial);
          state = next;
          clamped = clamped || trial_clamped;
          moved = true;
          break;
        }
      }
      if (moved) {
        damping = std::max(damping * 0.1, 1e-12);
      } else {
        damping *= 10.0;
      }
    }
    if (!moved) break;
  }
  const double gnorm = max_norm(state.gradient);
  if (gnorm > options.tolerance) {
    throw Error(ErrorCode::ConvergenceFailure,
                "dual entropy gradient " + format_real(gnorm) + " after " + std::to_string(iter) +
                    " iterations");
  }
  const bool mismatch = clamped || (objective.target().array() <= 0.0).any();
  if (mismatch && options.strict_support) {
    throw Error(ErrorCode::SupportMismatch,
                "the measure gives zero weight to words the optimizer must suppress");
  }
  return DualEntropyResult{state.value,
                           LocallyConstantPotential(objective.index(),
                                                    {phi.data(), phi.data() + phi.size()}),
                           gnorm,
                           iter,
                           target.depth(),
                           mismatch};
}

DualEntropyResult dual_entropy(const MarkovMeasure& mu, int depth, const DualOptions& options) {
  return dual_entropy_from_marginal(marginal(mu, depth), options);
}

int natural_depth(const MarkovMeasure& mu) {
  // Fit log P(i, j) = a(i) + b(j) on the support by least squares.
  const auto& p = mu.stochastic();
  const auto m = p.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> support;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (p(i, j) > 0.0) support.emplace_back(i, j);
    }
  }
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(support.size()), 2 * m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(support.size()));
  for (std::size_t r = 0; r < support.size(); ++r) {
    const auto [i, j] = support[r];
    const auto row = static_cast<Eigen::Index>(r);
    design(row, i) = 1.0;
    design(row, m + j) = 1.0;
    rhs(row) = std::log(p(i, j));
  }
  const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(rhs);
  const double residual = (design * coef - rhs).cwiseAbs().maxCoeff();
  return residual <= 1e-10 ? 1 : 2;
}

ConeMembership cone_membership(const LocallyConstantPotential& phi) {
  const double margin = -matrix_pressure(phi.scaled(-1.0)).log_lambda;
  return {margin >= -1e-12, margin};
}

ConeEntropyResult cone_entropy_from_marginal(const CylinderMarginal& target,
                                             const DualOptions& options) {
  const DualObjective objective(target.index(), target_vector(target));
  const auto& m = objective.target();
  const auto n = m.size();
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
  auto state = objective.evaluate(psi);
  int iter = 0;
  constexpr int kScalingIterations = 5000;
  for (; iter < kScalingIterations && max_norm(state.gradient) > options.tolerance; ++iter) {
    Eigen::VectorXd step(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      step(i) = m(i) > 0.0 ? std::log(m(i) / state.stationary(i)) : -2.0 * kPotentialClamp;
    }
    bool moved = false;
    for (double s = 1.0; s >= 1.0 / 1024.0; s *= 0.5) {
      Eigen::VectorXd trial = psi + s * step;
      normalize(trial);
      const auto next = objective.evaluate(trial);
      if (next.value <= state.value + 1e-13 * std::max(1.0, std::abs(state.value))) {
        psi = std::move(trial);
        state = next;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  ConeEntropyResult out;
  out.iterations = iter;
  if (max_norm(state.gradient) > options.tolerance) {
    const auto newton = dual_entropy_from_marginal(target, options);
    const auto values = newton.argmin_potential.values();
    psi = Eigen::Map<const Eigen::VectorXd>(values.data(), n);
    out.by_scaling = false;
    out.iterations += newton.iterations;
  }
  // phi = P(psi) - psi lies on the boundary of the cone; integrate it.
  const LocallyConstantPotential psi_pot(objective.index(), {psi.data(), psi.data() + n});
  const double gamma = matrix_pressure(psi_pot).log_lambda;
  const auto phi = psi_pot.scaled(-1.0).shifted(gamma);
  out.value = integrate(target, phi);
  out.margin = cone_membership(phi).margin;
  return out;
}

ConeEntropyResult cone_entropy(const MarkovMeasure& mu, int depth, const DualOptions& options) {
  return cone_entropy_from_marginal(marginal(mu, depth), options);
}

VariationalReport variational_identity_check(const LocallyConstantPotential& phi, double tolerance,
                                             int competitors, std::uint64_t seed) {
  const auto state = gibbs_state(phi);
  VariationalReport r;
  r.pressure = state.log_lambda();
  r.dual_entropy = dual_entropy_from_marginal(state.marginal(phi.index())).value;
  r.integral = state.integrate(phi);
  r.defect = r.dual_entropy + r.integral - r.pressure;
  r.competitors = competitors;
  r.competitor_excess = -std::numeric_limits<double>::infinity();
  for (const auto& nu : random_markov_grid(phi.system(), competitors, seed)) {
    r.competitor_excess =
        std::max(r.competitor_excess, ks_entropy(nu) + integrate(nu, phi) - r.pressure);
  }
  if (competitors == 0) r.competitor_excess = 0.0;
  r.pass = std::abs(r.defect) <= tolerance && r.competitor_excess <= 1e-9;
  return r;
}

void EnvelopeReport::write_csv(std::ostream& out) const {
  out << "mu_id,value,ks_entropy,gap,iterations,gradient_norm\n";
  for (const auto& row : rows) {
    out << row.mu_id << ',' << format_real(row.value) << ',' << format_real(row.ks_entropy) << ','
        << format_real(row.gap) << ',' << row.iterations << ',' << format_real(row.gradient_norm)
        << '\n';
  }
}

EnvelopeReport envelope_equality_check(const std::vector<MarkovMeasure>& grid, int depth,
                                       const DualOptions& options, bool parallel) {
  EnvelopeReport report;
  report.rows.resize(grid.size());
  const auto body = [&](std::size_t i) {
    const auto& mu = grid[i];
    const int k = depth > 0 ? depth : natural_depth(mu);
    const auto res = dual_entropy(mu, k, options);
    auto& row = report.rows[i];
    row.mu_id = std::to_string(i);
    row.value = res.value;
    row.ks_entropy = ks_entropy(mu);
    row.gap = res.value - row.ks_entropy;
    row.iterations = res.iterations;
    row.gradient_norm = res.gradient_norm;
  };
  if (parallel) {
    kernels::for_each_index_parallel(grid.size(), body);
  } else {
    kernels::for_each_index_serial(grid.size(), body);
  }
  for (const auto& row : report.rows) report.max_gap = std::max(report.max_gap, std::abs(row.gap));
  report.pass = report.max_gap <= 1e-4;
  return report;
}

std::vector<MarkovMeasure> bernoulli_grid(const SystemPtr& sys, int count) {
  if (sys->alphabet_size() != 2 || sys->transition_count() != 4) {
    throw Error(ErrorCode::InvalidArgument, "Bernoulli grid needs the full 2-shift");
  }
  std::vector<MarkovMeasure> out;
  for (int i = 0; i < count; ++i) {
    const double p = (i + 1.0) / (count + 1.0);
    out.push_back(MarkovMeasure::bernoulli(sys, {p, 1.0 - p}));
  }
  return out;
}

std::vector<MarkovMeasure> random_markov_grid(const SystemPtr& sys, int count, std::uint64_t seed) {
  Rng rng(seed);
  const int m = sys->alphabet_size();
  std::vector<MarkovMeasure> out;
  for (int c = 0; c < count; ++c) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (Symbol j : sys->successors(i)) p(i, j) = uniform(rng, 0.05, 1.0);
      p.row(i) /= p.row(i).sum();
    }
    out.push_back(MarkovMeasure::from_stochastic(sys, std::move(p)));
  }
  return out;
}

}  // namespace thermo
