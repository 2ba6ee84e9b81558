#pragma once

#include "thermo/measures.hpp"
#include "thermo/symbolic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <ostream>
#include <vector>

namespace thermo {

// One invertible matrix per symbol; A^n along a word w is A[w_{n-1}] ... A[w_0].
class CocycleSpec {
 public:
  CocycleSpec(SystemPtr sys, std::vector<Eigen::MatrixXd> generators);

  [[nodiscard]] const SystemPtr& system() const noexcept { return system_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(generators_.front().rows()); }
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& generators() const noexcept { return generators_; }
  [[nodiscard]] const Eigen::MatrixXd& generator(Symbol s) const { return generators_[static_cast<std::size_t>(s)]; }
  [[nodiscard]] std::vector<double> condition_numbers() const;

 private:
  SystemPtr system_;
  std::vector<Eigen::MatrixXd> generators_;
};

// Nonincreasing weights alpha_1 >= ... >= alpha_l.
class SingularWeight {
 public:
  explicit SingularWeight(std::vector<double> alpha);
  [[nodiscard]] const std::vector<double>& alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::size_t size() const noexcept { return alpha_.size(); }
  [[nodiscard]] SingularWeight scaled(double t) const;

 private:
  std::vector<double> alpha_;
};

// log prod s_i(A^n)^{alpha_i} along w, evaluated through exterior powers.
double singular_value_potential(const CocycleSpec& spec, const SingularWeight& alpha,
                                std::span<const Symbol> w);
// Same quantity from the singular values of the renormalized product itself.
// Throws SingularProduct when the product's condition number exceeds 1e14.
double singular_value_potential_direct(const CocycleSpec& spec, const SingularWeight& alpha,
                                       std::span<const Symbol> w);

struct SubadditivePressureEstimate {
  struct Row {
    int n = 0;
    double value_n = 0.0;       // (1/n) log Z_n
    double fekete_upper = 0.0;  // min over m <= n
  };
  std::vector<Row> per_depth;
  double fekete_upper = 0.0;
  double value = 0.0;
  // min over n <= N of (1/n) phi_n on the prefixes of each admissible N-word,
  // N = min(n_max, 8), lexicographic.
  std::vector<double> psi_min_depth;

  void write_csv(std::ostream& out) const;  // n,value_n,fekete_upper
};

SubadditivePressureEstimate subadditive_pressure(const CocycleSpec& spec, const SingularWeight& alpha,
                                                 int n_max, bool parallel = true);

// min over n <= N of (1/n) phi_n on the periodic extension of w; N <= 64.
double psi_phi_approx(const CocycleSpec& spec, const SingularWeight& alpha, const Word& w, int n_cap);

struct LyapunovSpectrum {
  std::vector<double> exponents;
  std::vector<double> stderr_values;
  int samples = 0;
  int n_steps = 0;

  void write_csv(std::ostream& out) const;  // i,lambda_i,stderr
};

struct SamplingOptions {
  int n_steps = 2000;
  int samples = 64;
  std::uint64_t seed = 1;
  bool parallel = true;
};

// Orbit sample s uses an engine seeded with seed + s.
LyapunovSpectrum lyapunov_qr(const CocycleSpec& spec, const MarkovMeasure& mu,
                             const SamplingOptions& options = {});

struct ExteriorEstimate {
  double value = 0.0;  // estimate of lambda_1 + ... + lambda_k
  double stderr_value = 0.0;
};

ExteriorEstimate lyapunov_exterior(const CocycleSpec& spec, const MarkovMeasure& mu, int k,
                                   const SamplingOptions& options = {});

struct CfhRow {
  int mu_id = 0;
  double entropy = 0.0;
  double functional_upper = 0.0;  // min_n (1/n) integral of phi_n
  double worst_violation = 0.0;   // max_n of h + (1/n) int phi_n - (1/n) log Z_n
  double psi_integral = 0.0;      // Monte Carlo integral of psi^(N)
  double psi_stderr = 0.0;
};

struct CfhReport {
  double pressure_upper = 0.0;  // Fekete bound
  double best_value = 0.0;      // max over the grid of h + functional_upper
  double gap = 0.0;             // pressure_upper - best_value
  double worst_violation = 0.0;
  bool pass = false;            // worst_violation <= 1e-6
  std::vector<CfhRow> rows;
};

struct CfhOptions {
  int n_max = 12;
  int psi_depth = 32;    // N
  int psi_samples = 200;
  std::uint64_t seed = 1;
  bool parallel = true;
};

CfhReport cfh_variational_check(const CocycleSpec& spec, const SingularWeight& alpha,
                                const std::vector<MarkovMeasure>& grid, const CfhOptions& options = {});

// Zero-temperature comparison for singular-value potentials.
struct LyapunovSweepRow {
  double t = 0.0;
  double pressure_over_t = 0.0;  // Fekete bound of the pressure of t alpha, divided by t
};

struct LyapunovOracle {
  double best_average = 0.0;  // max over cycles of (1/p) sum_i alpha_i log |eig_i(A_w)|
  Word witness;
};

LyapunovOracle lyapunov_cycle_oracle(const CocycleSpec& spec, const SingularWeight& alpha,
                                     int max_period = 12);
std::vector<LyapunovSweepRow> lyapunov_temperature_sweep(const CocycleSpec& spec,
                                                         const SingularWeight& alpha,
                                                         const std::vector<double>& t_grid,
                                                         int n_max);

}  // namespace thermo
