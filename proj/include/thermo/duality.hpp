#pragma once

#include "thermo/equilibrium.hpp"
#include "thermo/measures.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace thermo {

struct DualOptions {
  double tolerance = 1e-9;  // on the max-norm of the gradient
  int max_iterations = 500;
  // Throw SupportMismatch instead of reporting it when a coordinate hits the clamp.
  bool strict_support = false;
};

inline constexpr double kPotentialClamp = 50.0;

struct DualEntropyResult {
  double value = 0.0;
  LocallyConstantPotential argmin_potential;
  double gradient_norm = 0.0;
  int iterations = 0;
  int depth = 1;
  // The measure gives no weight to some admissible word, or a coordinate
  // reached -kPotentialClamp. The value is still an upper bound.
  bool support_mismatch = false;
};

// inf over depth-k potentials of P(phi) - integral of phi. Only the depth-k
// marginal of the measure enters.
DualEntropyResult dual_entropy_from_marginal(const CylinderMarginal& target,
                                             const DualOptions& options = {});
DualEntropyResult dual_entropy(const MarkovMeasure& mu, int depth, const DualOptions& options = {});

// Smallest depth at which a first-order chain is the Gibbs state of some
// potential: 1 when log P(i, j) splits as a(i) + b(j) on the support, else 2.
int natural_depth(const MarkovMeasure& mu);

struct ConeMembership {
  bool member = false;
  double margin = 0.0;  // -P(-phi)
};

ConeMembership cone_membership(const LocallyConstantPotential& phi);

struct ConeEntropyResult {
  double value = 0.0;
  double margin = 0.0;  // cone margin of the minimizing potential, ~0
  int iterations = 0;
  bool by_scaling = true;  // false when the scaling iteration stalled and Newton was used
};

// Minimizes the integral over the cone {P(-phi) <= 0}, parametrized as
// phi = P(psi) - psi, with psi found by iterative marginal scaling.
ConeEntropyResult cone_entropy(const MarkovMeasure& mu, int depth, const DualOptions& options = {});
ConeEntropyResult cone_entropy_from_marginal(const CylinderMarginal& target,
                                             const DualOptions& options = {});

struct VariationalReport {
  double pressure = 0.0;
  double dual_entropy = 0.0;
  double integral = 0.0;
  double defect = 0.0;  // dual_entropy + integral - pressure
  double competitor_excess = 0.0;  // max over sampled chains of h + integral - pressure
  int competitors = 0;
  bool pass = false;
};

VariationalReport variational_identity_check(const LocallyConstantPotential& phi, double tolerance,
                                             int competitors = 20, std::uint64_t seed = 1);

struct EnvelopeRow {
  std::string mu_id;
  double value = 0.0;
  double ks_entropy = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct EnvelopeReport {
  std::vector<EnvelopeRow> rows;
  double max_gap = 0.0;
  bool pass = false;  // max_gap <= 1e-4

  void write_csv(std::ostream& out) const;  // mu_id,value,ks_entropy,gap,iterations,gradient_norm
};

// depth <= 0 selects natural_depth per measure.
EnvelopeReport envelope_equality_check(const std::vector<MarkovMeasure>& grid, int depth = 0,
                                       const DualOptions& options = {}, bool parallel = true);

// ---------------------------------------------------------------------------
// Measure grids

std::vector<MarkovMeasure> bernoulli_grid(const SystemPtr& full_shift_2, int count);
std::vector<MarkovMeasure> random_markov_grid(const SystemPtr& sys, int count, std::uint64_t seed);

}  // namespace thermo
