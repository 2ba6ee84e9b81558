#include "thermo/cocycle.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/kernels.hpp"
#include "thermo/linalg.hpp"
#include "thermo/pressure.hpp"
#include "thermo/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace thermo {

CocycleSpec::CocycleSpec(SystemPtr sys, std::vector<Eigen::MatrixXd> generators)
    : system_(std::move(sys)), generators_(std::move(generators)) {
  if (static_cast<int>(generators_.size()) != system_->alphabet_size()) {
    throw Error(ErrorCode::InvalidArgument, "one generator per symbol is required");
  }
  const auto l = generators_.front().rows();
  if (l < 1) throw Error(ErrorCode::InvalidArgument, "generators must be nonempty");
  for (const auto& g : generators_) {
    if (g.rows() != l || g.cols() != l) {
      throw Error(ErrorCode::InvalidArgument, "generators must be square of one common size");
    }
    if (!g.allFinite()) throw Error(ErrorCode::InvalidArgument, "generator entries must be finite");
    if (std::abs(g.determinant()) <= 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "generators must be invertible (|det| > 1e-12)");
    }
  }
}

std::vector<double> CocycleSpec::condition_numbers() const {
  std::vector<double> out;
  for (const auto& g : generators_) {
    const auto s = singular_values(g);
    out.push_back(s(0) / s(s.size() - 1));
  }
  return out;
}

SingularWeight::SingularWeight(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw Error(ErrorCode::InvalidArgument, "alpha must be nonempty");
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (!std::isfinite(alpha_[i])) throw Error(ErrorCode::InvalidArgument, "alpha must be finite");
    if (i > 0 && alpha_[i] > alpha_[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "alpha must be nonincreasing");
    }
  }
}

SingularWeight SingularWeight::scaled(double t) const {
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "negative scaling reverses the order of alpha");
  auto a = alpha_;
  for (auto& x : a) x *= t;
  return SingularWeight(std::move(a));
}

namespace {

void require_dimension(const CocycleSpec& spec, const SingularWeight& alpha) {
  if (static_cast<int>(alpha.size()) != spec.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "alpha length must equal the cocycle dimension");
  }
}

kernels::CocycleWeights weights_of(const CocycleSpec& spec, const SingularWeight& alpha) {
  return {spec.generators(), alpha.alpha()};
}

// phi_alpha along a growing word, one symbol at a time.
class PotentialTracker {
 public:
  PotentialTracker(const CocycleSpec& spec, const SingularWeight& alpha)
      : alpha_last_(alpha.alpha().back()) {
    const int l = spec.dimension();
    for (int k = 1; k < l; ++k) {
      const double w = alpha.alpha()[static_cast<std::size_t>(k - 1)] -
                       alpha.alpha()[static_cast<std::size_t>(k)];
      if (w == 0.0) continue;
      weight_.push_back(w);
      std::vector<Eigen::MatrixXd> per_symbol;
      for (const auto& g : spec.generators()) per_symbol.push_back(compound_matrix(g, k));
      compounds_.push_back(std::move(per_symbol));
    }
    for (const auto& g : spec.generators()) log_det_.push_back(std::log(std::abs(g.determinant())));
    reset();
  }

  void reset() {
    products_.clear();
    for (const auto& c : compounds_) products_.push_back(StabilizedProduct::identity(c.front().rows()));
    det_sum_ = 0.0;
  }

  void push(Symbol s) {
    const auto i = static_cast<std::size_t>(s);
    for (std::size_t o = 0; o < products_.size(); ++o) products_[o].left_multiply(compounds_[o][i]);
    det_sum_ += log_det_[i];
  }

  [[nodiscard]] double value() const {
    double v = alpha_last_ * det_sum_;
    for (std::size_t o = 0; o < products_.size(); ++o) v += weight_[o] * products_[o].log_norm();
    return v;
  }

 private:
  double alpha_last_;
  std::vector<double> weight_;
  std::vector<std::vector<Eigen::MatrixXd>> compounds_;
  std::vector<double> log_det_;
  std::vector<StabilizedProduct> products_;
  double det_sum_ = 0.0;
};

Symbol draw_initial(Rng& rng, const MarkovMeasure& mu) {
  const auto& pi = mu.stationary();
  return draw_index(rng, [&](int i) { return pi(i); }, static_cast<int>(pi.size()));
}

Symbol draw_next(Rng& rng, const MarkovMeasure& mu, Symbol from) {
  const auto& p = mu.stochastic();
  return draw_index(rng, [&](int j) { return p(from, j); }, static_cast<int>(p.cols()));
}

void require_sampling(const CocycleSpec& spec, const MarkovMeasure& mu, const SamplingOptions& o) {
  require_same_system(spec.system(), mu.system(), "Lyapunov sampling");
  if (!mu.irreducible()) {
    throw Error(ErrorCode::NonIrreducibleMeasure, "the sampling chain must be irreducible");
  }
  if (o.n_steps < 1000) throw Error(ErrorCode::InvalidArgument, "n_steps must be at least 1000");
  if (o.samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
}

void run_indexed(std::size_t count, bool parallel, const std::function<void(std::size_t)>& body) {
  if (parallel) {
    kernels::for_each_index_parallel(count, body);
  } else {
    kernels::for_each_index_serial(count, body);
  }
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

double singular_value_potential(const CocycleSpec& spec, const SingularWeight& alpha,
                                std::span<const Symbol> w) {
  require_dimension(spec, alpha);
  if (w.empty()) throw Error(ErrorCode::WordTooShort, "the word must be nonempty");
  return kernels::singular_value_log(weights_of(spec, alpha), w);
}

double singular_value_potential_direct(const CocycleSpec& spec, const SingularWeight& alpha,
                                       std::span<const Symbol> w) {
  require_dimension(spec, alpha);
  if (w.empty()) throw Error(ErrorCode::WordTooShort, "the word must be nonempty");
  auto prod = StabilizedProduct::identity(spec.dimension());
  for (Symbol s : w) prod.left_multiply(spec.generator(s));
  const auto s = singular_values(prod.scaled);
  const double smallest = s(s.size() - 1);
  if (!(smallest > 0.0) || s(0) / smallest > 1e14) {
    throw Error(ErrorCode::SingularProduct,
                "product condition number exceeds 1e14 on a word of length " + std::to_string(w.size()));
  }
  double v = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    v += alpha.alpha()[static_cast<std::size_t>(i)] * (std::log(s(i)) + prod.log_scale);
  }
  return v;
}

// ---------------------------------------------------------------------------

void SubadditivePressureEstimate::write_csv(std::ostream& out) const {
  out << "n,value_n,fekete_upper\n";
  for (const auto& r : per_depth) {
    out << r.n << ',' << format_real(r.value_n) << ',' << format_real(r.fekete_upper) << '\n';
  }
}

SubadditivePressureEstimate subadditive_pressure(const CocycleSpec& spec, const SingularWeight& alpha,
                                                 int n_max, bool parallel) {
  require_dimension(spec, alpha);
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be positive");
  const auto w = weights_of(spec, alpha);
  const auto levels = parallel ? kernels::cocycle_word_sums_parallel(*spec.system(), w, n_max, nullptr)
                               : kernels::cocycle_word_sums_serial(*spec.system(), w, n_max, nullptr);
  SubadditivePressureEstimate est;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double v = levels[static_cast<std::size_t>(n - 1)].log_partition / n;
    best = std::min(best, v);
    est.per_depth.push_back({n, v, best});
  }
  est.fekete_upper = best;
  est.value = std::min(est.per_depth.back().value_n, best);

  const int depth = std::min(n_max, 8);
  PotentialTracker tracker(spec, alpha);
  for (const auto& word : enumerate_words(*spec.system(), depth)) {
    tracker.reset();
    double m = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= depth; ++n) {
      tracker.push(word[static_cast<std::size_t>(n - 1)]);
      m = std::min(m, tracker.value() / n);
    }
    est.psi_min_depth.push_back(m);
  }
  return est;
}

double psi_phi_approx(const CocycleSpec& spec, const SingularWeight& alpha, const Word& w, int n_cap) {
  require_dimension(spec, alpha);
  if (w.empty()) throw Error(ErrorCode::WordTooShort, "the word must be nonempty");
  if (n_cap < 1 || n_cap > 64) throw Error(ErrorCode::InvalidArgument, "N must lie in [1, 64]");
  if (!spec.system()->cyclically_admissible(w)) {
    throw Error(ErrorCode::InvalidArgument, "the periodic extension of the word is not admissible");
  }
  PotentialTracker tracker(spec, alpha);
  double m = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_cap; ++n) {
    tracker.push(w[static_cast<std::size_t>(n - 1) % w.size()]);
    m = std::min(m, tracker.value() / n);
  }
  return m;
}

// ---------------------------------------------------------------------------

void LyapunovSpectrum::write_csv(std::ostream& out) const {
  out << "i,lambda_i,stderr\n";
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    out << i + 1 << ',' << format_real(exponents[i]) << ',' << format_real(stderr_values[i]) << '\n';
  }
}

LyapunovSpectrum lyapunov_qr(const CocycleSpec& spec, const MarkovMeasure& mu,
                             const SamplingOptions& options) {
  require_sampling(spec, mu, options);
  const int l = spec.dimension();
  const auto count = static_cast<std::size_t>(options.samples);
  std::vector<std::vector<double>> per_sample(count);
  run_indexed(count, options.parallel, [&](std::size_t s) {
    Rng rng(options.seed + s);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(l, l);
    std::vector<double> sums(static_cast<std::size_t>(l), 0.0);
    Symbol x = draw_initial(rng, mu);
    for (int step = 0; step < options.n_steps; ++step) {
      const Eigen::MatrixXd m = spec.generator(x) * q;
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
      const Eigen::MatrixXd& packed = qr.matrixQR();
      q = qr.householderQ() * Eigen::MatrixXd::Identity(l, l);
      for (int i = 0; i < l; ++i) sums[static_cast<std::size_t>(i)] += std::log(std::abs(packed(i, i)));
      x = draw_next(rng, mu, x);
    }
    for (auto& v : sums) v /= options.n_steps;
    per_sample[s] = std::move(sums);
  });
  LyapunovSpectrum out;
  out.samples = options.samples;
  out.n_steps = options.n_steps;
  for (int i = 0; i < l; ++i) {
    std::vector<double> xs;
    for (const auto& v : per_sample) xs.push_back(v[static_cast<std::size_t>(i)]);
    const auto [mean, se] = mean_and_stderr(xs);
    out.exponents.push_back(mean);
    out.stderr_values.push_back(se);
  }
  return out;
}

ExteriorEstimate lyapunov_exterior(const CocycleSpec& spec, const MarkovMeasure& mu, int k,
                                   const SamplingOptions& options) {
  require_sampling(spec, mu, options);
  if (k < 1 || k > spec.dimension()) throw Error(ErrorCode::InvalidArgument, "k must lie in [1, l]");
  std::vector<Eigen::MatrixXd> compounds;
  for (const auto& g : spec.generators()) compounds.push_back(compound_matrix(g, k));
  const auto count = static_cast<std::size_t>(options.samples);
  std::vector<double> values(count);
  run_indexed(count, options.parallel, [&](std::size_t s) {
    Rng rng(options.seed + s);
    auto prod = StabilizedProduct::identity(compounds.front().rows());
    Symbol x = draw_initial(rng, mu);
    for (int step = 0; step < options.n_steps; ++step) {
      prod.left_multiply(compounds[static_cast<std::size_t>(x)]);
      x = draw_next(rng, mu, x);
    }
    values[s] = prod.log_norm() / options.n_steps;
  });
  const auto [mean, se] = mean_and_stderr(values);
  return {mean, se};
}

// ---------------------------------------------------------------------------

CfhReport cfh_variational_check(const CocycleSpec& spec, const SingularWeight& alpha,
                                const std::vector<MarkovMeasure>& grid, const CfhOptions& options) {
  require_dimension(spec, alpha);
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty measure grid");
  const auto w = weights_of(spec, alpha);
  const auto& sys = *spec.system();
  const auto levels = options.parallel ? kernels::cocycle_word_sums_parallel(sys, w, options.n_max, nullptr)
                                       : kernels::cocycle_word_sums_serial(sys, w, options.n_max, nullptr);
  CfhReport report;
  report.pressure_upper = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= options.n_max; ++n) {
    report.pressure_upper =
        std::min(report.pressure_upper, levels[static_cast<std::size_t>(n - 1)].log_partition / n);
  }
  report.rows.resize(grid.size());
  run_indexed(grid.size(), options.parallel, [&](std::size_t i) {
    const auto& mu = grid[i];
    require_same_system(spec.system(), mu.system(), "CFH check");
    const auto with_mu = kernels::cocycle_word_sums_serial(sys, w, options.n_max, &mu);
    CfhRow row;
    row.mu_id = static_cast<int>(i);
    row.entropy = ks_entropy(mu);
    row.functional_upper = std::numeric_limits<double>::infinity();
    row.worst_violation = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= options.n_max; ++n) {
      const auto& lev = with_mu[static_cast<std::size_t>(n - 1)];
      const double f_n = lev.measure_integral / n;
      row.functional_upper = std::min(row.functional_upper, f_n);
      row.worst_violation = std::max(row.worst_violation, row.entropy + f_n - lev.log_partition / n);
    }
    // Monte Carlo integral of psi^(N) = min_{n <= N} (1/n) phi_n.
    PotentialTracker tracker(spec, alpha);
    std::vector<double> psi(static_cast<std::size_t>(options.psi_samples));
    for (std::size_t s = 0; s < psi.size(); ++s) {
      Rng rng(options.seed + i * psi.size() + s);
      tracker.reset();
      Symbol x = draw_initial(rng, mu);
      double m = std::numeric_limits<double>::infinity();
      for (int n = 1; n <= options.psi_depth; ++n) {
        tracker.push(x);
        m = std::min(m, tracker.value() / n);
        x = draw_next(rng, mu, x);
      }
      psi[s] = m;
    }
    if (!psi.empty()) std::tie(row.psi_integral, row.psi_stderr) = mean_and_stderr(psi);
    report.rows[i] = row;
  });
  report.best_value = -std::numeric_limits<double>::infinity();
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows) {
    report.best_value = std::max(report.best_value, row.entropy + row.functional_upper);
    report.worst_violation = std::max(report.worst_violation, row.worst_violation);
  }
  report.gap = report.pressure_upper - report.best_value;
  report.pass = report.worst_violation <= 1e-6;
  return report;
}

LyapunovOracle lyapunov_cycle_oracle(const CocycleSpec& spec, const SingularWeight& alpha,
                                     int max_period) {
  require_dimension(spec, alpha);
  LyapunovOracle best{-std::numeric_limits<double>::infinity(), {}};
  for (int p = 1; p <= max_period; ++p) {
    for (const auto& w : enumerate_words(*spec.system(), p)) {
      if (!spec.system()->cyclically_admissible(w)) continue;
      // Rotations and proper powers give the same average; keep the
      // rotation-minimal primitive representative.
      bool canonical = true;
      for (int r = 1; r < p && canonical; ++r) {
        Word rot(w.begin() + r, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + r);
        if (rot <= w) canonical = false;
      }
      if (!canonical) continue;
      Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(spec.dimension(), spec.dimension());
      for (Symbol s : w) prod = spec.generator(s) * prod;
      Eigen::EigenSolver<Eigen::MatrixXd> es(prod, false);
      std::vector<double> moduli;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()(i)));
      std::sort(moduli.rbegin(), moduli.rend());
      double v = 0.0;
      for (std::size_t i = 0; i < moduli.size(); ++i) v += alpha.alpha()[i] * std::log(moduli[i]);
      v /= p;
      if (v > best.best_average + 1e-12) best = {v, w};
    }
  }
  return best;
}

std::vector<LyapunovSweepRow> lyapunov_temperature_sweep(const CocycleSpec& spec,
                                                         const SingularWeight& alpha,
                                                         const std::vector<double>& t_grid,
                                                         int n_max) {
  std::vector<LyapunovSweepRow> rows;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "temperatures must be positive");
    const auto est = subadditive_pressure(spec, alpha.scaled(t), n_max);
    rows.push_back({t, est.fekete_upper / t});
  }
  return rows;
}

}  // namespace thermo
