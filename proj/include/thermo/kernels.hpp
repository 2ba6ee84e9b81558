#pragma once

// Data-parallel kernels. Each kernel comes as a serial reference and an
// OpenMP version. The parallel versions partition work by a fixed prefix
// (first symbol, or a fixed-depth subtree) and merge partial results in
// prefix order, so their output does not depend on the thread count.

#include "thermo/measures.hpp"
#include "thermo/symbolic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace thermo::kernels {

// ---------------------------------------------------------------------------
// Separated-set sums: for n = 1..n_max, log of
//   sum over admissible n-words u of max over (depth-1)-extensions v of exp(S_n phi(uv)).
std::vector<double> log_sup_word_sums_serial(const LocallyConstantPotential& phi, int n_max);
std::vector<double> log_sup_word_sums_parallel(const LocallyConstantPotential& phi, int n_max);

// ---------------------------------------------------------------------------
// Singular-value word sums over a one-step cocycle.

struct CocycleWeights {
  std::vector<Eigen::MatrixXd> generators;  // one per symbol
  std::vector<double> alpha;                // nonincreasing
};

struct CocycleLevel {
  double log_partition = 0.0;   // log sum_w exp(phi_alpha(w)) over admissible n-words
  double measure_integral = 0.0;  // sum_w mu[w] phi_alpha(w), when a measure is supplied
};

// Exterior-power evaluation of phi_alpha on the product along w:
// sum_k (alpha_k - alpha_{k+1}) log ||wedge^k A_w|| + alpha_l log |det A_w|.
double singular_value_log(const CocycleWeights& c, std::span<const Symbol> w);

std::vector<CocycleLevel> cocycle_word_sums_serial(const SftSystem& sys, const CocycleWeights& c,
                                                   int n_max, const MarkovMeasure* mu);
std::vector<CocycleLevel> cocycle_word_sums_parallel(const SftSystem& sys, const CocycleWeights& c,
                                                     int n_max, const MarkovMeasure* mu);

// ---------------------------------------------------------------------------
// Best cyclic Birkhoff average over cyclically admissible words of length
// 1..max_period. Witnesses are the primitive, rotation-minimal words whose
// average is within tie_tolerance of the best, ordered by (period, word).

struct CycleMaximum {
  double best_average = 0.0;
  std::vector<Word> witnesses;
};

CycleMaximum best_cycle_average_serial(const LocallyConstantPotential& phi, int max_period,
                                       double tie_tolerance);
CycleMaximum best_cycle_average_parallel(const LocallyConstantPotential& phi, int max_period,
                                         double tie_tolerance);

// ---------------------------------------------------------------------------
// Cylinder tree of a full-branch interval map. For every depth d <= depth,
// the sums over inverse-branch words of length d of the smallest and largest
// possible value of prod exp(shift_b - t log|f'|) on the cylinder.

struct CylinderSums {
  std::vector<double> lower;  // index d-1 holds depth d
  std::vector<double> upper;
};

CylinderSums cylinder_sums_serial(const IntervalMapSystem& map, double t,
                                  std::span<const double> branch_shift, int depth);
CylinderSums cylinder_sums_parallel(const IntervalMapSystem& map, double t,
                                    std::span<const double> branch_shift, int depth);

// ---------------------------------------------------------------------------
// Transfer operator on piecewise-linear functions over a fixed grid.

struct GridBranch {
  std::vector<double> preimage;   // inverse branch applied to each node
  std::vector<std::uint32_t> cell;  // grid cell containing the preimage
  std::vector<double> fraction;   // position of the preimage within its cell
  std::vector<double> log_derivative;  // log|f'| at the preimage
};

struct GridOperator {
  std::vector<double> nodes;
  std::vector<GridBranch> branches;
};

// out[j] = sum_b weight[b][j] * h(preimage_b(node_j)) with h interpolated linearly.
void grid_apply_serial(const GridOperator& op, const std::vector<std::vector<double>>& weight,
                       std::span<const double> h, std::span<double> out);
void grid_apply_parallel(const GridOperator& op, const std::vector<std::vector<double>>& weight,
                         std::span<const double> h, std::span<double> out);

// ---------------------------------------------------------------------------
// Independent samples: body(i) for i in [0, count). Bodies must write only to
// per-index slots.

void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body);
void for_each_index_parallel(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace thermo::kernels
