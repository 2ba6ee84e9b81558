#include "thermo/zerotemp.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/kernels.hpp"
#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

MaximizingOracle periodic_orbit_oracle(const LocallyConstantPotential& phi, int max_period,
                                       bool parallel) {
  if (max_period < 1) throw Error(ErrorCode::InvalidArgument, "max_period must be positive");
  check_word_cap(*phi.system(), max_period, kDefaultWordCap);
  constexpr double kTie = 1e-12;
  auto best = parallel ? kernels::best_cycle_average_parallel(phi, max_period, kTie)
                       : kernels::best_cycle_average_serial(phi, max_period, kTie);
  if (best.witnesses.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no periodic orbit up to the given period");
  }
  MaximizingOracle out;
  out.max_average = best.best_average;
  out.witnesses = std::move(best.witnesses);
  out.witness_orbit = out.witnesses.front();
  out.period = static_cast<int>(out.witness_orbit.size());
  out.max_period = max_period;
  return out;
}

// ---------------------------------------------------------------------------

double TemperatureSweep::pressure_over_t_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    worst = std::max(worst, rows[i].pressure_over_t - rows[i - 1].pressure_over_t);
  }
  return rows.size() < 2 ? 0.0 : worst;
}

double TemperatureSweep::integral_decrease() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    worst = std::max(worst, rows[i - 1].phi_integral - rows[i].phi_integral);
  }
  return rows.size() < 2 ? 0.0 : worst;
}

double TemperatureSweep::min_second_difference() const {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double left = (rows[i].pressure - rows[i - 1].pressure) / (rows[i].t - rows[i - 1].t);
    const double right = (rows[i + 1].pressure - rows[i].pressure) / (rows[i + 1].t - rows[i].t);
    worst = std::min(worst, right - left);
  }
  return rows.size() < 3 ? 0.0 : worst;
}

void TemperatureSweep::write_csv(std::ostream& out) const {
  out << "t,pressure,pressure_over_t,phi_integral,entropy\n";
  for (const auto& r : rows) {
    out << format_real(r.t) << ',' << format_real(r.pressure) << ',' << format_real(r.pressure_over_t)
        << ',' << format_real(r.phi_integral) << ',' << format_real(r.entropy) << '\n';
  }
}

std::vector<double> geometric_grid(double t_max, double ratio, double t_min) {
  if (!(ratio > 1.0) || !(t_max > 0.0) || !(t_min > 0.0) || t_min > t_max) {
    throw Error(ErrorCode::InvalidArgument, "geometric grid needs ratio > 1 and 0 < t_min <= t_max");
  }
  std::vector<double> grid;
  for (double t = t_max; t >= t_min; t /= ratio) grid.push_back(t);
  std::reverse(grid.begin(), grid.end());
  return grid;
}

TemperatureSweep temperature_sweep(const LocallyConstantPotential& phi,
                                   const std::vector<double>& t_grid, int marginal_depth,
                                   bool parallel) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty temperature grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (!(t > 0.0) || (i > 0 && !(t > t_grid[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "temperature grid must be positive and increasing");
    }
    if (t > kMaxTemperature || t * phi.sup_norm() > kMaxExponent) {
      throw Error(ErrorCode::OverflowGuard,
                  "t = " + format_real(t) + " exceeds the exponent range (t sup|phi| = " +
                      format_real(t * phi.sup_norm()) + ")");
    }
  }
  TemperatureSweep sweep;
  sweep.marginal_index = make_word_index(phi.system(), std::max(marginal_depth, phi.depth()));
  sweep.rows.resize(t_grid.size());
  const auto body = [&](std::size_t i) {
    const double t = t_grid[i];
    const auto state = gibbs_state(phi.scaled(t));
    auto& row = sweep.rows[i];
    row.t = t;
    row.pressure = state.log_lambda();
    row.pressure_over_t = row.pressure / t;
    row.phi_integral = state.integrate(phi);
    row.entropy = state.entropy();
    const auto m = state.marginal(sweep.marginal_index);
    row.marginal.assign(m.weights().begin(), m.weights().end());
  };
  if (parallel) {
    kernels::for_each_index_parallel(t_grid.size(), body);
  } else {
    kernels::for_each_index_serial(t_grid.size(), body);
  }
  return sweep;
}

double orbit_weight(const GibbsState& state, const Word& orbit) {
  const auto p = orbit.size();
  const auto index = make_word_index(state.system(), static_cast<int>(std::max<std::size_t>(
                                                         p, static_cast<std::size_t>(state.depth()))));
  const auto m = state.marginal(index);
  Word rotated(index->depth());
  double total = 0.0;
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t i = 0; i < rotated.size(); ++i) rotated[i] = orbit[(r + i) % p];
    total += m(rotated);
  }
  return total;
}

AccumulationReport accumulation_diagnostics(const TemperatureSweep& sweep,
                                            const MaximizingOracle& oracle,
                                            const LocallyConstantPotential& phi, int tail) {
  if (sweep.rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty sweep");
  AccumulationReport r;
  const auto& last = sweep.rows.back();
  const double log_m = std::log(static_cast<double>(phi.system()->alphabet_size()));
  r.integral_gap = std::abs(last.phi_integral - oracle.max_average);
  r.integral_tolerance = log_m / last.t + 1e-9;
  r.horizon_insufficient = last.phi_integral > oracle.max_average + 1e-9;
  r.integral_pass = r.integral_gap <= r.integral_tolerance || r.horizon_insufficient;

  r.late_entropy = last.entropy;
  r.topological_entropy = matrix_pressure(phi.scaled(0.0)).log_lambda;
  r.entropy_pass = r.late_entropy >= -1e-12 && r.late_entropy <= r.topological_entropy + 1e-9;

  const std::size_t n = sweep.rows.size();
  const std::size_t start = n > static_cast<std::size_t>(tail) ? n - static_cast<std::size_t>(tail) : 0;
  for (std::size_t i = start; i + 1 < n; ++i) {
    r.tail_increments.push_back(std::abs(sweep.rows[i + 1].entropy - sweep.rows[i].entropy));
  }
  r.tail_pass = true;
  for (std::size_t i = 1; i < r.tail_increments.size(); ++i) {
    if (r.tail_increments[i] > r.tail_increments[i - 1] + 1e-12) r.tail_pass = false;
  }
  return r;
}

}  // namespace thermo
