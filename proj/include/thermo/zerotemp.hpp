#pragma once

#include "thermo/equilibrium.hpp"
#include "thermo/measures.hpp"

#include <ostream>
#include <vector>

namespace thermo {

// Best cyclic Birkhoff average over periodic orbits of period <= max_period.
// A lower bound on the maximum over all invariant measures.
struct MaximizingOracle {
  double max_average = 0.0;
  Word witness_orbit;             // first witness in (period, lexicographic) order
  int period = 0;
  std::vector<Word> witnesses;    // every primitive rotation-minimal tie within 1e-12
  int max_period = 0;
};

MaximizingOracle periodic_orbit_oracle(const LocallyConstantPotential& phi, int max_period,
                                       bool parallel = true);

struct SweepRow {
  double t = 0.0;
  double pressure = 0.0;
  double pressure_over_t = 0.0;
  double phi_integral = 0.0;
  double entropy = 0.0;
  std::vector<double> marginal;  // depth-k marginal of the equilibrium state
};

struct TemperatureSweep {
  WordIndexPtr marginal_index;
  std::vector<SweepRow> rows;

  // Largest increase of P(t phi)/t and largest decrease of the integral
  // between consecutive grid points (both <= 1e-10 when monotone).
  [[nodiscard]] double pressure_over_t_increase() const;
  [[nodiscard]] double integral_decrease() const;
  // Most negative second difference of t -> P(t phi), divided differences.
  [[nodiscard]] double min_second_difference() const;

  void write_csv(std::ostream& out) const;  // t,pressure,pressure_over_t,phi_integral,entropy
};

inline constexpr double kMaxExponent = 700.0;
inline constexpr double kMaxTemperature = 500.0;

// Geometric grid ending exactly at t_max: t_max / ratio^j down to t_min.
std::vector<double> geometric_grid(double t_max = 50.0, double ratio = 1.3, double t_min = 0.1);

// Throws OverflowGuard when t * sup|phi| > 700 or t > 500.
TemperatureSweep temperature_sweep(const LocallyConstantPotential& phi,
                                   const std::vector<double>& t_grid, int marginal_depth = 1,
                                   bool parallel = true);

// Total weight of the cylinders of the p rotations of a periodic word.
double orbit_weight(const GibbsState& state, const Word& orbit);

struct AccumulationReport {
  // (a) integral against the last state vs the oracle maximum
  double integral_gap = 0.0;
  double integral_tolerance = 0.0;  // log(m) / t_last
  bool integral_pass = false;
  bool horizon_insufficient = false;  // the sweep beat the oracle: max_period too small
  // (b) late entropy between 0 and the topological entropy
  double late_entropy = 0.0;
  double topological_entropy = 0.0;
  bool entropy_pass = false;
  // (c) entropy increments over the grid tail
  std::vector<double> tail_increments;
  bool tail_pass = false;

  [[nodiscard]] bool pass() const { return integral_pass && entropy_pass && tail_pass; }
};

AccumulationReport accumulation_diagnostics(const TemperatureSweep& sweep,
                                            const MaximizingOracle& oracle,
                                            const LocallyConstantPotential& phi, int tail = 5);

}  // namespace thermo
