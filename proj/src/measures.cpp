#include "thermo/measures.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/perron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermo {

namespace {

constexpr double kZeroProbability = 1e-300;

}  // namespace

// ---------------------------------------------------------------------------
// LocallyConstantPotential

LocallyConstantPotential::LocallyConstantPotential(WordIndexPtr index, std::vector<double> values)
    : index_(std::move(index)), values_(std::move(values)) {
  if (!index_) throw Error(ErrorCode::InvalidArgument, "potential needs a word index");
  if (values_.size() != index_->size()) {
    throw Error(ErrorCode::InvalidArgument,
                "potential needs one value per admissible " + std::to_string(index_->depth()) +
                    "-word (" + std::to_string(index_->size()) + "), got " +
                    std::to_string(values_.size()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidArgument, "potential values must be finite");
  }
}

LocallyConstantPotential LocallyConstantPotential::constant(const SystemPtr& sys, int depth,
                                                            double c) {
  auto index = make_word_index(sys, depth);
  const auto n = index->size();
  return {std::move(index), std::vector<double>(n, c)};
}

LocallyConstantPotential LocallyConstantPotential::from_symbol_values(const SystemPtr& sys,
                                                                      std::vector<double> values) {
  return {make_word_index(sys, 1), std::move(values)};
}

LocallyConstantPotential LocallyConstantPotential::from_function(
    const SystemPtr& sys, int depth, const std::function<double(std::span<const Symbol>)>& f) {
  auto index = make_word_index(sys, depth);
  std::vector<double> values;
  values.reserve(index->size());
  for (const auto& w : index->words()) values.push_back(f(w));
  return {std::move(index), std::move(values)};
}

double LocallyConstantPotential::operator()(std::span<const Symbol> w) const {
  if (static_cast<int>(w.size()) < depth()) {
    throw Error(ErrorCode::WordTooShort, "word shorter than the potential depth");
  }
  return values_[index_->at(w.first(static_cast<std::size_t>(depth())))];
}

double LocallyConstantPotential::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

double LocallyConstantPotential::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double LocallyConstantPotential::sup_norm() const {
  return std::max(std::abs(max_value()), std::abs(min_value()));
}

LocallyConstantPotential LocallyConstantPotential::with_values(std::vector<double> values) const {
  return {index_, std::move(values)};
}

LocallyConstantPotential LocallyConstantPotential::scaled(double t) const {
  auto v = values_;
  for (auto& x : v) x *= t;
  return {index_, std::move(v)};
}

LocallyConstantPotential LocallyConstantPotential::shifted(double c) const {
  auto v = values_;
  for (auto& x : v) x += c;
  return {index_, std::move(v)};
}

LocallyConstantPotential LocallyConstantPotential::lifted(int depth) const {
  if (depth == this->depth()) return *this;
  return lifted(make_word_index(system(), depth));
}

LocallyConstantPotential LocallyConstantPotential::lifted(const WordIndexPtr& deeper) const {
  require_same_system(system(), deeper->system(), "lift");
  if (deeper->depth() < depth()) {
    throw Error(ErrorCode::DepthMismatch, "cannot lift a potential to a smaller depth");
  }
  std::vector<double> v;
  v.reserve(deeper->size());
  for (const auto& w : deeper->words()) v.push_back((*this)(w));
  return {deeper, std::move(v)};
}

namespace {

LocallyConstantPotential combine(const LocallyConstantPotential& a,
                                 const LocallyConstantPotential& b, double sign) {
  require_same_system(a.system(), b.system(), "potential arithmetic");
  const auto& deeper = a.depth() >= b.depth() ? a.index() : b.index();
  const auto la = a.depth() == deeper->depth() ? a : a.lifted(deeper);
  const auto lb = b.depth() == deeper->depth() ? b : b.lifted(deeper);
  std::vector<double> v(deeper->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = la.value(i) + sign * lb.value(i);
  return {deeper, std::move(v)};
}

}  // namespace

LocallyConstantPotential operator+(const LocallyConstantPotential& a,
                                   const LocallyConstantPotential& b) {
  return combine(a, b, 1.0);
}

LocallyConstantPotential operator-(const LocallyConstantPotential& a,
                                   const LocallyConstantPotential& b) {
  return combine(a, b, -1.0);
}

LocallyConstantPotential coboundary(const LocallyConstantPotential& psi) {
  const int k = psi.depth();
  return LocallyConstantPotential::from_function(
      psi.system(), k + 1, [&](std::span<const Symbol> w) {
        return psi(w.subspan(1)) - psi(w.first(static_cast<std::size_t>(k)));
      });
}

// ---------------------------------------------------------------------------
// MarkovMeasure

MarkovMeasure::MarkovMeasure(SystemPtr sys, Eigen::MatrixXd stochastic, Eigen::VectorXd stationary)
    : system_(std::move(sys)), stochastic_(std::move(stochastic)), stationary_(std::move(stationary)) {
  const auto m = system_->alphabet_size();
  if (stochastic_.rows() != m || stochastic_.cols() != m || stationary_.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "Markov data does not match the alphabet");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double p = stochastic_(i, j);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::InvalidArgument, "transition probabilities must be nonnegative");
      }
      if (p > 0.0 && !system_->allowed(i, j)) {
        throw Error(ErrorCode::InvalidArgument, "positive probability on a forbidden transition");
      }
    }
    if (std::abs(stochastic_.row(i).sum() - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " does not sum to 1");
    }
  }
  if ((stationary_.array() < 0.0).any() || std::abs(stationary_.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "stationary vector must be a probability vector");
  }
  const Eigen::RowVectorXd drift = stationary_.transpose() * stochastic_ - stationary_.transpose();
  if (drift.cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "stationary vector is not invariant");
  }
}

MarkovMeasure MarkovMeasure::from_stochastic(SystemPtr sys, Eigen::MatrixXd stochastic) {
  const auto m = stochastic.rows();
  // Solve pi (P - I) = 0 together with sum(pi) = 1.
  Eigen::MatrixXd a(m + 1, m);
  a.topRows(m) = stochastic.transpose() - Eigen::MatrixXd::Identity(m, m);
  a.row(m).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a.topRows(m));
  lu.setThreshold(1e-12);
  if (lu.rank() < m - 1) {
    throw Error(ErrorCode::NonIrreducibleMeasure, "stationary vector is not unique");
  }
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (pi(i) < 0.0 && pi(i) > -1e-13) pi(i) = 0.0;
  }
  pi /= pi.sum();
  return {std::move(sys), std::move(stochastic), std::move(pi)};
}

MarkovMeasure MarkovMeasure::bernoulli(SystemPtr sys, std::vector<double> probabilities) {
  const int m = sys->alphabet_size();
  if (static_cast<int>(probabilities.size()) != m) {
    throw Error(ErrorCode::InvalidArgument, "Bernoulli weights need one entry per symbol");
  }
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "Bernoulli weights must sum to 1");
  }
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(probabilities.data(), m);
  p /= p.sum();
  Eigen::MatrixXd stochastic = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) stochastic.row(i) = p.transpose();
  return {std::move(sys), std::move(stochastic), std::move(p)};
}

MarkovMeasure MarkovMeasure::parry(SystemPtr sys) {
  const Eigen::MatrixXd a = sys->adjacency();
  const auto pd = perron(a);
  const double lambda = std::exp(pd.log_lambda);
  const auto m = a.rows();
  Eigen::MatrixXd stochastic = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      stochastic(i, j) = a(i, j) * pd.right_vec(j) / (lambda * pd.right_vec(i));
    }
    stochastic.row(i) /= stochastic.row(i).sum();
  }
  Eigen::VectorXd pi = pd.left_vec.cwiseProduct(pd.right_vec);
  pi /= pi.sum();
  return {std::move(sys), std::move(stochastic), std::move(pi)};
}

MarkovMeasure MarkovMeasure::fixed_point(SystemPtr sys, Symbol s) {
  const int m = sys->alphabet_size();
  if (s < 0 || s >= m || !sys->allowed(s, s)) {
    throw Error(ErrorCode::InvalidArgument, "symbol " + std::to_string(s) + " is not a fixed point");
  }
  Eigen::MatrixXd stochastic = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    // Transient rows only need to be stochastic; route them along any
    // allowed transition.
    const Symbol target = i == s ? s : sys->successors(i).front();
    stochastic(i, target) = 1.0;
  }
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(m);
  pi(s) = 1.0;
  return {std::move(sys), std::move(stochastic), std::move(pi)};
}

double MarkovMeasure::cylinder_weight(std::span<const Symbol> w) const {
  if (w.empty()) return 1.0;
  double weight = stationary_(w[0]);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) weight *= stochastic_(w[i], w[i + 1]);
  return weight;
}

bool MarkovMeasure::irreducible() const {
  return strongly_connected((stochastic_.array() > 0.0).cast<double>().matrix());
}

// ---------------------------------------------------------------------------
// CylinderMarginal

CylinderMarginal::CylinderMarginal(WordIndexPtr index, std::vector<double> weights)
    : index_(std::move(index)), weights_(std::move(weights)) {
  if (weights_.size() != index_->size()) {
    throw Error(ErrorCode::InvalidArgument, "marginal needs one weight per word");
  }
}

double CylinderMarginal::operator()(std::span<const Symbol> w) const {
  return weights_[index_->at(w)];
}

CylinderMarginal CylinderMarginal::truncated(const WordIndexPtr& shallower) const {
  if (shallower->depth() > depth()) {
    throw Error(ErrorCode::DepthMismatch, "truncation target is deeper than the marginal");
  }
  std::vector<double> w(shallower->size(), 0.0);
  const auto d = static_cast<std::size_t>(shallower->depth());
  for (std::size_t i = 0; i < index_->size(); ++i) {
    w[shallower->at(std::span<const Symbol>(index_->word(i)).first(d))] += weights_[i];
  }
  return {shallower, std::move(w)};
}

void CylinderMarginal::write_csv(std::ostream& out) const {
  out << "word,weight\n";
  const int m = system()->alphabet_size();
  for (std::size_t i = 0; i < index_->size(); ++i) {
    out << format_word(index_->word(i), m) << ',' << format_real(weights_[i]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Operations

double birkhoff_sum(const LocallyConstantPotential& phi, std::span<const Symbol> w,
                    std::optional<int> n) {
  const int k = phi.depth();
  const int len = static_cast<int>(w.size());
  const int terms = n.value_or(len - k + 1);
  if (terms < 1 || len < terms + k - 1) {
    throw Error(ErrorCode::WordTooShort, "word of length " + std::to_string(len) +
                                             " is too short for " + std::to_string(terms) +
                                             " terms of a depth-" + std::to_string(k) +
                                             " potential");
  }
  double sum = 0.0;
  for (int i = 0; i < terms; ++i) {
    sum += phi(w.subspan(static_cast<std::size_t>(i), static_cast<std::size_t>(k)));
  }
  return sum;
}

double integrate(const CylinderMarginal& marginal, const LocallyConstantPotential& phi) {
  require_same_system(marginal.system(), phi.system(), "integrate");
  if (phi.depth() > marginal.depth()) {
    throw Error(ErrorCode::DepthMismatch, "potential is deeper than the marginal");
  }
  double sum = 0.0;
  if (phi.depth() == marginal.depth()) {
    for (std::size_t i = 0; i < phi.size(); ++i) sum += marginal.weight(i) * phi.value(i);
    return sum;
  }
  for (std::size_t i = 0; i < marginal.index()->size(); ++i) {
    if (marginal.weight(i) != 0.0) sum += marginal.weight(i) * phi(marginal.index()->word(i));
  }
  return sum;
}

double integrate(const MarkovMeasure& mu, const LocallyConstantPotential& phi) {
  require_same_system(mu.system(), phi.system(), "integrate");
  return integrate(marginal(mu, phi.index()), phi);
}

double ks_entropy(const MarkovMeasure& mu) {
  const auto& p = mu.stochastic();
  const auto& pi = mu.stationary();
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double q = p(i, j);
      if (q > kZeroProbability) row -= q * std::log(q);
    }
    h += pi(i) * row;
  }
  return std::max(h, 0.0);
}

CylinderMarginal marginal(const MarkovMeasure& mu, int depth, std::size_t cap) {
  return marginal(mu, make_word_index(mu.system(), depth, cap));
}

CylinderMarginal marginal(const MarkovMeasure& mu, const WordIndexPtr& index) {
  require_same_system(mu.system(), index->system(), "marginal");
  std::vector<double> w;
  w.reserve(index->size());
  for (const auto& word : index->words()) w.push_back(mu.cylinder_weight(word));
  return {index, std::move(w)};
}

CylinderMarginal block_marginal(const MarkovMeasure& mu_on_blocks, const WordIndex& blocks,
                                const WordIndexPtr& target) {
  require_same_system(blocks.system(), target->system(), "block marginal");
  if (mu_on_blocks.system()->alphabet_size() != static_cast<int>(blocks.size())) {
    throw Error(ErrorCode::SystemMismatch, "measure does not live on this block presentation");
  }
  const int k = blocks.depth();
  const int d = target->depth();
  const auto& pi = mu_on_blocks.stationary();
  const auto& p = mu_on_blocks.stochastic();
  std::vector<double> w(target->size(), 0.0);
  if (d < k) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      w[target->at(std::span<const Symbol>(blocks.word(b)).first(static_cast<std::size_t>(d)))] +=
          pi(static_cast<Eigen::Index>(b));
    }
    return {target, std::move(w)};
  }
  for (std::size_t i = 0; i < target->size(); ++i) {
    const std::span<const Symbol> word = target->word(i);
    auto prev = blocks.at(word.first(static_cast<std::size_t>(k)));
    double weight = pi(static_cast<Eigen::Index>(prev));
    for (int s = 1; s + k <= d && weight != 0.0; ++s) {
      const auto cur = blocks.at(word.subspan(static_cast<std::size_t>(s), static_cast<std::size_t>(k)));
      weight *= p(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(cur));
      prev = cur;
    }
    w[i] = weight;
  }
  return {target, std::move(w)};
}

double marginal_distance(const CylinderMarginal& a, const CylinderMarginal& b) {
  require_same_system(a.system(), b.system(), "marginal distance");
  if (a.depth() != b.depth()) {
    throw Error(ErrorCode::DepthMismatch, "marginals have different depths");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.index()->size(); ++i) d += std::abs(a.weight(i) - b.weight(i));
  return d;
}

}  // namespace thermo
