#pragma once

#include "thermo/symbolic.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace thermo {

// A potential that depends only on the first `depth` symbols, stored as one
// value per admissible depth-word (lexicographic order of the word index).
class LocallyConstantPotential {
 public:
  LocallyConstantPotential(WordIndexPtr index, std::vector<double> values);

  static LocallyConstantPotential constant(const SystemPtr& sys, int depth, double c);
  static LocallyConstantPotential from_symbol_values(const SystemPtr& sys,
                                                     std::vector<double> values);
  static LocallyConstantPotential from_function(
      const SystemPtr& sys, int depth, const std::function<double(std::span<const Symbol>)>& f);

  [[nodiscard]] const SystemPtr& system() const noexcept { return index_->system(); }
  [[nodiscard]] const WordIndexPtr& index() const noexcept { return index_; }
  [[nodiscard]] int depth() const noexcept { return index_->depth(); }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double value(std::size_t i) const { return values_[i]; }
  // Value on the cylinder of an admissible word of length >= depth.
  [[nodiscard]] double operator()(std::span<const Symbol> w) const;

  [[nodiscard]] double max_value() const;
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double sup_norm() const;

  [[nodiscard]] LocallyConstantPotential with_values(std::vector<double> values) const;
  [[nodiscard]] LocallyConstantPotential scaled(double t) const;
  [[nodiscard]] LocallyConstantPotential shifted(double c) const;
  // The same function presented at a larger depth.
  [[nodiscard]] LocallyConstantPotential lifted(int depth) const;
  [[nodiscard]] LocallyConstantPotential lifted(const WordIndexPtr& deeper) const;

 private:
  WordIndexPtr index_;
  std::vector<double> values_;
};

// Pointwise sum, presented at the larger of the two depths.
LocallyConstantPotential operator+(const LocallyConstantPotential& a,
                                   const LocallyConstantPotential& b);
LocallyConstantPotential operator-(const LocallyConstantPotential& a,
                                   const LocallyConstantPotential& b);

// psi o shift - psi, a potential of depth psi.depth() + 1.
LocallyConstantPotential coboundary(const LocallyConstantPotential& psi);

class MarkovMeasure {
 public:
  MarkovMeasure(SystemPtr sys, Eigen::MatrixXd stochastic, Eigen::VectorXd stationary);

  // Computes the stationary vector; throws NonIrreducibleMeasure if it is not unique.
  static MarkovMeasure from_stochastic(SystemPtr sys, Eigen::MatrixXd stochastic);
  static MarkovMeasure bernoulli(SystemPtr sys, std::vector<double> probabilities);
  static MarkovMeasure parry(SystemPtr sys);
  static MarkovMeasure fixed_point(SystemPtr sys, Symbol s);

  [[nodiscard]] const SystemPtr& system() const noexcept { return system_; }
  [[nodiscard]] const Eigen::MatrixXd& stochastic() const noexcept { return stochastic_; }
  [[nodiscard]] const Eigen::VectorXd& stationary() const noexcept { return stationary_; }
  [[nodiscard]] double cylinder_weight(std::span<const Symbol> w) const;
  // The transition graph of positive entries is strongly connected.
  [[nodiscard]] bool irreducible() const;

 private:
  SystemPtr system_;
  Eigen::MatrixXd stochastic_;
  Eigen::VectorXd stationary_;
};

// Weights of the admissible words of one depth.
class CylinderMarginal {
 public:
  CylinderMarginal(WordIndexPtr index, std::vector<double> weights);

  [[nodiscard]] const WordIndexPtr& index() const noexcept { return index_; }
  [[nodiscard]] const SystemPtr& system() const noexcept { return index_->system(); }
  [[nodiscard]] int depth() const noexcept { return index_->depth(); }
  [[nodiscard]] std::span<const double> weights() const& noexcept { return weights_; }
  std::span<const double> weights() const&& = delete;
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] double operator()(std::span<const Symbol> w) const;
  // Marginal one level shallower (sum over the last symbol).
  [[nodiscard]] CylinderMarginal truncated(const WordIndexPtr& shallower) const;

  void write_csv(std::ostream& out) const;

 private:
  WordIndexPtr index_;
  std::vector<double> weights_;
};

double birkhoff_sum(const LocallyConstantPotential& phi, std::span<const Symbol> w,
                    std::optional<int> n = std::nullopt);
double integrate(const MarkovMeasure& mu, const LocallyConstantPotential& phi);
double integrate(const CylinderMarginal& marginal, const LocallyConstantPotential& phi);
double ks_entropy(const MarkovMeasure& mu);

CylinderMarginal marginal(const MarkovMeasure& mu, int depth, std::size_t cap = kDefaultWordCap);
CylinderMarginal marginal(const MarkovMeasure& mu, const WordIndexPtr& index);
// Marginal on the base system of a Markov measure living on the block
// presentation of `blocks` (symbol i of the measure is blocks->word(i)).
CylinderMarginal block_marginal(const MarkovMeasure& mu_on_blocks, const WordIndex& blocks,
                                const WordIndexPtr& target);
double marginal_distance(const CylinderMarginal& a, const CylinderMarginal& b);

}  // namespace thermo
