#pragma once

#include "thermo/measures.hpp"
#include "thermo/pressure.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace thermo {

// Equilibrium state of a locally constant potential of depth k. The Markov
// chain lives on the k-block presentation (the system itself when k = 1);
// marginals and integrals are reported on the base system.
class GibbsState {
 public:
  GibbsState(MarkovMeasure chain, LocallyConstantPotential source, double log_lambda);

  [[nodiscard]] const MarkovMeasure& measure() const noexcept { return chain_; }
  [[nodiscard]] const LocallyConstantPotential& source_potential() const noexcept { return source_; }
  [[nodiscard]] double log_lambda() const noexcept { return log_lambda_; }
  [[nodiscard]] const SystemPtr& system() const noexcept { return source_.system(); }
  [[nodiscard]] int depth() const noexcept { return source_.depth(); }

  [[nodiscard]] CylinderMarginal marginal(int depth) const;
  [[nodiscard]] CylinderMarginal marginal(const WordIndexPtr& index) const;
  [[nodiscard]] double integrate(const LocallyConstantPotential& psi) const;
  [[nodiscard]] double entropy() const;

 private:
  MarkovMeasure chain_;
  LocallyConstantPotential source_;
  double log_lambda_;
};

GibbsState gibbs_state(const LocallyConstantPotential& phi, const PerronOptions& options = {});
GibbsState gibbs_state(const SystemPtr& sys, const LocallyConstantPotential& phi);

// Coordinate directions followed by `random_count` directions uniform on the
// Euclidean unit sphere of the depth-k value space.
std::vector<LocallyConstantPotential> sample_directions(const WordIndexPtr& index, int random_count,
                                                        std::uint64_t seed);

struct TangencyRow {
  std::string psi_id;  // direction index with the sign used, e.g. "3+" or "3-"
  double lhs = 0.0;    // P(phi + psi) - P(phi)
  double rhs = 0.0;    // integral of psi against the state
  double slack = 0.0;  // lhs - rhs
};

struct TangencyReport {
  double max_violation = 0.0;  // -min slack
  int directions_tested = 0;
  std::vector<TangencyRow> per_direction;

  [[nodiscard]] bool pass(double tolerance = 1e-9) const { return max_violation <= tolerance; }
  void write_csv(std::ostream& out) const;  // psi_id,lhs,rhs,slack
};

// Checks both psi and -psi for every direction.
TangencyReport tangency_check(const LocallyConstantPotential& phi,
                              const std::vector<LocallyConstantPotential>& directions,
                              const GibbsState& state);
TangencyReport tangency_check(const LocallyConstantPotential& phi,
                              const std::vector<LocallyConstantPotential>& directions);

struct DerivativeRow {
  double t = 0.0;
  double central_difference = 0.0;
  double extrapolated = 0.0;  // Richardson value using this and the previous step
};

struct GateauxResult {
  double value = 0.0;
  std::vector<DerivativeRow> table;
};

// Central differences of t -> P(phi + t psi) at 0 with order-2 Richardson
// extrapolation; t_grid positive, decreasing, entries >= 1e-7.
GateauxResult gateaux_derivative(const LocallyConstantPotential& phi,
                                 const LocallyConstantPotential& psi,
                                 const std::vector<double>& t_grid = {0.02, 0.01, 0.005});

struct FrechetRow {
  double radius = 0.0;
  double remainder_ratio = 0.0;    // max over directions of |remainder| / r
  double marginal_distance = 0.0;  // max over directions of the state displacement
};

struct FrechetReport {
  std::vector<FrechetRow> rows;
  std::vector<double> halving_factors;  // ratio(r_i) / ratio(r_{i+1})
  double continuity_constant = 0.0;     // max marginal_distance / r
  // Each factor within 25% of r_i / r_{i+1}: the remainder is O(r^2).
  bool linear_decay = true;
};

// Directions are rescaled to unit sup norm.
FrechetReport frechet_probe(const LocallyConstantPotential& phi,
                            const std::vector<double>& radius_grid,
                            const std::vector<LocallyConstantPotential>& directions);

}  // namespace thermo
