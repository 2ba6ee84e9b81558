#pragma once

#include "thermo/measures.hpp"
#include "thermo/perron.hpp"
#include "thermo/symbolic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace thermo {

// ---------------------------------------------------------------------------
// Exact pressure of a locally constant potential on an SFT

// Weighted transition matrix over the depth-k words of phi:
// L(u, v) = exp(phi(u) - max phi) when v may follow u in the block presentation.
Eigen::MatrixXd weighted_transition(const LocallyConstantPotential& phi);

PerronData matrix_pressure(const LocallyConstantPotential& phi, const PerronOptions& options = {});
PerronData matrix_pressure(const SystemPtr& sys, const LocallyConstantPotential& phi,
                           const PerronOptions& options = {});

// ---------------------------------------------------------------------------
// Finite-depth estimates

struct DepthValue {
  int n = 0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct PressureEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<DepthValue> depth_sequence;

  [[nodiscard]] double width() const { return upper - lower; }
  void write_csv(std::ostream& out) const;  // n,value_n,lower,upper
};

// Sums over one point per cylinder of the cylinder metric with epsilon = 1.
// value_n = (1/n) log sum over n-words u of max over extensions of exp(S_n phi).
// Those sums are submultiplicative, so min_n value_n is an upper bound; the
// reported lower bound subtracts log(m)/n from it.
PressureEstimate separated_set_pressure(const LocallyConstantPotential& phi, int n_max,
                                        bool parallel = true);

// ---------------------------------------------------------------------------
// Transfer operator pressure for full-branch interval maps, potential
// phi = shift_b - t log|f'| on branch b.

struct TransferOptions {
  bool parallel = true;
  // Refinement by a Collatz-Wielandt bound on a piecewise-linear grid; only
  // used when some branch has nonconstant derivative.
  bool grid_refinement = true;
  int power_iterations = 2000;
  double relative_spacing = 1e-3;
  double max_spacing = 2e-5;
  double smallest_node = 1e-15;
};

class TransferOperatorEngine {
 public:
  explicit TransferOperatorEngine(IntervalMapSystem map, TransferOptions options = {});
  ~TransferOperatorEngine();
  TransferOperatorEngine(TransferOperatorEngine&&) noexcept;
  TransferOperatorEngine& operator=(TransferOperatorEngine&&) noexcept;

  [[nodiscard]] const IntervalMapSystem& map() const noexcept { return map_; }

  // Rigorous bracket from cylinder sums up to `depth` (running intersection,
  // so nested in depth), fixed-point lower bounds and the grid bound.
  [[nodiscard]] PressureEstimate pressure(double t, int depth,
                                          std::span<const double> branch_shift = {}) const;

 private:
  struct Grid;

  IntervalMapSystem map_;
  TransferOptions options_;
  std::unique_ptr<Grid> grid_;
};

inline constexpr int kMaxTransferDepth = 24;

PressureEstimate transfer_operator_pressure(const IntervalMapSystem& map, double t, int depth,
                                            const TransferOptions& options = {});

// ---------------------------------------------------------------------------
// Pressure-function axioms

enum class PressureEngine { Matrix, SeparatedSet, TransferOperator };

std::string engine_name(PressureEngine engine);

struct AxiomCheck {
  std::string axiom;
  double worst_violation = 0.0;
  double tolerance = 0.0;  // tolerance in force at the worst sample
  bool pass = true;
};

struct AxiomReport {
  PressureEngine engine = PressureEngine::Matrix;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<AxiomCheck> checks;

  [[nodiscard]] bool pass() const;
  void write_csv(std::ostream& out) const;  // axiom,worst_violation,tolerance,pass
};

struct AxiomSuiteOptions {
  int samples = 200;
  std::uint64_t seed = 1;
  int depth = 1;          // depth of the random potentials (SFT engines)
  int n_max = 12;         // separated-set depth
  int transfer_depth = 12;
  bool parallel = true;
};

// Monotonicity, translation invariance, convexity and the sup-norm Lipschitz
// bound on random potentials. Exact engine tolerance 1e-8; estimators are
// allowed the sum of the bracket widths involved.
AxiomReport axiom_suite(const SystemPtr& sys, PressureEngine engine,
                        const AxiomSuiteOptions& options = {});
AxiomReport axiom_suite(const IntervalMapSystem& map, const AxiomSuiteOptions& options = {});

struct CoboundaryReport {
  double pressure = 0.0;
  double pressure_with_coboundary = 0.0;
  double difference = 0.0;
  bool pass = true;  // |difference| <= 1e-9
};

CoboundaryReport coboundary_invariance_check(const LocallyConstantPotential& phi,
                                             const LocallyConstantPotential& psi);

}  // namespace thermo
