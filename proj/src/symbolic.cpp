#include "thermo/symbolic.hpp"

#include "thermo/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace thermo {

namespace {

std::vector<bool> reachable(const SftSystem& sys, bool forward) {
  const int m = sys.alphabet_size();
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  std::queue<Symbol> todo;
  seen[0] = true;
  todo.push(0);
  while (!todo.empty()) {
    const Symbol s = todo.front();
    todo.pop();
    for (Symbol t : forward ? sys.successors(s) : sys.predecessors(s)) {
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        todo.push(t);
      }
    }
  }
  return seen;
}

}  // namespace

SftSystem::SftSystem(int alphabet_size, std::vector<std::uint8_t> transition, std::string label)
    : size_(alphabet_size), transition_(std::move(transition)), label_(std::move(label)) {
  if (size_ < 1) throw Error(ErrorCode::InvalidArgument, "alphabet size must be positive");
  if (transition_.size() != static_cast<std::size_t>(size_) * static_cast<std::size_t>(size_)) {
    throw Error(ErrorCode::InvalidArgument, "transition table has the wrong size");
  }
  successors_.resize(static_cast<std::size_t>(size_));
  predecessors_.resize(static_cast<std::size_t>(size_));
  for (Symbol i = 0; i < size_; ++i) {
    for (Symbol j = 0; j < size_; ++j) {
      if (allowed(i, j)) {
        successors_[static_cast<std::size_t>(i)].push_back(j);
        predecessors_[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  for (Symbol s = 0; s < size_; ++s) {
    if (successors_[static_cast<std::size_t>(s)].empty() ||
        predecessors_[static_cast<std::size_t>(s)].empty()) {
      throw Error(ErrorCode::EmptyRowOrColumn, "symbol " + std::to_string(s) +
                                                   " has no successor or no predecessor");
    }
  }
}

bool SftSystem::admissible(std::span<const Symbol> w) const {
  for (Symbol s : w) {
    if (s < 0 || s >= size_) return false;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!allowed(w[i], w[i + 1])) return false;
  }
  return true;
}

bool SftSystem::cyclically_admissible(std::span<const Symbol> w) const {
  return !w.empty() && admissible(w) && allowed(w.back(), w.front());
}

Eigen::MatrixXd SftSystem::adjacency() const {
  Eigen::MatrixXd a(size_, size_);
  for (Symbol i = 0; i < size_; ++i) {
    for (Symbol j = 0; j < size_; ++j) a(i, j) = allowed(i, j) ? 1.0 : 0.0;
  }
  return a;
}

std::vector<std::vector<int>> SftSystem::transition_rows() const {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(size_),
                                     std::vector<int>(static_cast<std::size_t>(size_), 0));
  for (Symbol i = 0; i < size_; ++i) {
    for (Symbol j : successors(i)) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
  }
  return rows;
}

std::size_t SftSystem::transition_count() const {
  return static_cast<std::size_t>(std::count(transition_.begin(), transition_.end(), 1));
}

bool SftSystem::irreducible() const {
  const auto fwd = reachable(*this, true);
  const auto bwd = reachable(*this, false);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

int SftSystem::period() const {
  std::vector<int> level(static_cast<std::size_t>(size_), -1);
  std::queue<Symbol> todo;
  level[0] = 0;
  todo.push(0);
  int g = 0;
  while (!todo.empty()) {
    const Symbol s = todo.front();
    todo.pop();
    for (Symbol t : successors(s)) {
      if (level[static_cast<std::size_t>(t)] < 0) {
        level[static_cast<std::size_t>(t)] = level[static_cast<std::size_t>(s)] + 1;
        todo.push(t);
      } else {
        g = std::gcd(g, std::abs(level[static_cast<std::size_t>(s)] + 1 -
                                 level[static_cast<std::size_t>(t)]));
      }
    }
  }
  return g == 0 ? 1 : g;
}

SystemPtr build_sft(int alphabet_size, const std::vector<std::vector<int>>& transition,
                    std::string label) {
  if (alphabet_size < 1) throw Error(ErrorCode::InvalidArgument, "alphabet size must be positive");
  const auto m = static_cast<std::size_t>(alphabet_size);
  if (transition.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "transition must have one row per symbol");
  }
  std::vector<std::uint8_t> flat;
  flat.reserve(m * m);
  for (const auto& row : transition) {
    if (row.size() != m) throw Error(ErrorCode::InvalidArgument, "transition must be square");
    for (int v : row) {
      if (v != 0 && v != 1) throw Error(ErrorCode::InvalidArgument, "transition entries must be 0 or 1");
      flat.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return std::make_shared<const SftSystem>(alphabet_size, std::move(flat), std::move(label));
}

SystemPtr full_shift(int alphabet_size) {
  const auto m = static_cast<std::size_t>(alphabet_size);
  return build_sft(alphabet_size, std::vector<std::vector<int>>(m, std::vector<int>(m, 1)),
                   "full-" + std::to_string(alphabet_size) + "-shift");
}

SystemPtr golden_mean_shift() { return build_sft(2, {{1, 1}, {1, 0}}, "golden-mean"); }

bool same_system(const SystemPtr& a, const SystemPtr& b) {
  return a == b || (a && b && *a == *b);
}

void require_same_system(const SystemPtr& a, const SystemPtr& b, const char* context) {
  if (!same_system(a, b)) {
    throw Error(ErrorCode::SystemMismatch, std::string(context) + ": objects live on different systems");
  }
}

std::uint64_t count_words(const SftSystem& sys, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "word length must be positive");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const auto m = static_cast<std::size_t>(sys.alphabet_size());
  // ending[s] = number of admissible words of the current length ending in s
  std::vector<std::uint64_t> ending(m, 1), next(m);
  for (int len = 1; len < n; ++len) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t s = 0; s < m; ++s) {
      for (Symbol t : sys.successors(static_cast<Symbol>(s))) {
        auto& slot = next[static_cast<std::size_t>(t)];
        slot = (kMax - slot < ending[s]) ? kMax : slot + ending[s];
      }
    }
    ending.swap(next);
  }
  std::uint64_t total = 0;
  for (auto c : ending) total = (kMax - total < c) ? kMax : total + c;
  return total;
}

void check_word_cap(const SftSystem& sys, int n, std::size_t cap) {
  const auto count = count_words(sys, n);
  if (count > cap) {
    throw Error(ErrorCode::CombinatorialOverflow,
                std::to_string(count) + " words of length " + std::to_string(n) +
                    " exceed the cap of " + std::to_string(cap));
  }
}

std::vector<Word> enumerate_words(const SftSystem& sys, int n, std::size_t cap) {
  check_word_cap(sys, n, cap);
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(count_words(sys, n)));
  Word w(static_cast<std::size_t>(n));
  // Iterative depth-first walk; successor lists are ascending, so the output
  // comes out in lexicographic order.
  std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
  int depth = 0;
  while (depth >= 0) {
    const auto d = static_cast<std::size_t>(depth);
    if (depth == 0) {
      if (choice[0] >= static_cast<std::size_t>(sys.alphabet_size())) break;
      w[0] = static_cast<Symbol>(choice[0]++);
    } else {
      const auto succ = sys.successors(w[d - 1]);
      if (choice[d] >= succ.size()) {
        choice[d] = 0;
        --depth;
        continue;
      }
      w[d] = succ[choice[d]++];
    }
    if (depth + 1 == n) {
      out.push_back(w);
    } else {
      ++depth;
    }
  }
  return out;
}

std::string format_word(std::span<const Symbol> w, int alphabet_size) {
  std::string out;
  const bool compact = alphabet_size <= 10;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i > 0) out += '.';
    out += std::to_string(w[i]);
  }
  return out;
}

WordIndex::WordIndex(SystemPtr sys, int depth, std::size_t cap)
    : system_(std::move(sys)), depth_(depth) {
  if (depth_ < 1) throw Error(ErrorCode::InvalidArgument, "depth must be positive");
  const double bits = depth_ * std::log2(static_cast<double>(system_->alphabet_size()) + 1.0);
  if (bits >= 63.0) {
    throw Error(ErrorCode::CombinatorialOverflow, "word codes do not fit in 64 bits");
  }
  words_ = enumerate_words(*system_, depth_, cap);
  codes_.reserve(words_.size());
  for (const auto& w : words_) codes_.push_back(code(w));
  extensions_.resize(words_.size());
  Word shifted(static_cast<std::size_t>(depth_));
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const Word& w = words_[i];
    std::copy(w.begin() + 1, w.end(), shifted.begin());
    for (Symbol s : system_->successors(w.back())) {
      shifted.back() = s;
      extensions_[i].push_back(at(shifted));
    }
  }
}

std::uint64_t WordIndex::code(std::span<const Symbol> w) const {
  std::uint64_t c = 0;
  const auto m = static_cast<std::uint64_t>(system_->alphabet_size());
  for (Symbol s : w) c = c * m + static_cast<std::uint64_t>(s);
  return c;
}

std::optional<std::size_t> WordIndex::find(std::span<const Symbol> w) const {
  if (static_cast<int>(w.size()) != depth_) return std::nullopt;
  for (Symbol s : w) {
    if (s < 0 || s >= system_->alphabet_size()) return std::nullopt;
  }
  const auto c = code(w);
  const auto it = std::lower_bound(codes_.begin(), codes_.end(), c);
  if (it == codes_.end() || *it != c) return std::nullopt;
  return static_cast<std::size_t>(it - codes_.begin());
}

std::size_t WordIndex::at(std::span<const Symbol> w) const {
  if (auto i = find(w)) return *i;
  throw Error(ErrorCode::InvalidArgument,
              "word " + format_word(w, system_->alphabet_size()) + " is not an admissible " +
                  std::to_string(depth_) + "-word");
}

WordIndexPtr make_word_index(SystemPtr sys, int depth, std::size_t cap) {
  return std::make_shared<const WordIndex>(std::move(sys), depth, cap);
}

BlockRecoding higher_block(const SystemPtr& sys, int block_length, std::size_t cap) {
  if (block_length < 1) throw Error(ErrorCode::InvalidArgument, "block length must be positive");
  BlockRecoding out;
  out.base = sys;
  out.block_length = block_length;
  out.dictionary = make_word_index(sys, block_length, cap);
  if (block_length == 1) {
    out.recoded = sys;
    return out;
  }
  out.recoded = block_system(*out.dictionary);
  return out;
}

SystemPtr block_system(const WordIndex& index) {
  const auto n = index.size();
  std::vector<std::uint8_t> flat(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : index.extensions(i)) flat[i * n + j] = 1;
  }
  return std::make_shared<const SftSystem>(
      static_cast<int>(n), std::move(flat),
      index.system()->label() + "^[" + std::to_string(index.depth()) + "]");
}

// ---------------------------------------------------------------------------
// Beta shifts

namespace {

using WideFloat = boost::multiprecision::cpp_bin_float_100;

// Remainders closer than this to an integer boundary are snapped, so that a
// double approximating an algebraic beta (golden mean, integers) yields the
// terminating expansion of the intended value.
constexpr double kSnap = 1e-12;

}  // namespace

BetaShift build_beta_shift(double beta, int depth) {
  if (!(beta > 1.0)) throw Error(ErrorCode::DegenerateBeta, "beta must exceed 1");
  if (beta > 10.0) throw Error(ErrorCode::InvalidArgument, "beta must be at most 10");
  if (depth < 1 || depth > 64) throw Error(ErrorCode::InvalidArgument, "depth must lie in [1, 64]");

  BetaShift out;
  out.spec.beta = beta;
  out.spec.truncation_depth = depth;
  out.spec.expansion.assign(static_cast<std::size_t>(depth), 0);

  const WideFloat b(beta);
  WideFloat remainder(1);
  for (int n = 0; n < depth; ++n) {
    const WideFloat x = b * remainder;
    int digit = static_cast<int>(boost::multiprecision::floor(x + kSnap).convert_to<double>());
    WideFloat next = x - digit;
    if (next < 0) next = 0;
    out.spec.expansion[static_cast<std::size_t>(n)] = digit;
    remainder = next;
    if (remainder < kSnap) {
      out.spec.terminating_length = n + 1;
      break;
    }
  }

  // Follower-set automaton on the truncated expansion a_1..a_p (trailing zeros
  // dropped). State k has a_k edges back to the start and, unless it is the
  // last state, one edge (digit a_k) to state k+1. For a terminating
  // expansion this is exactly the beta-shift; otherwise it presents the
  // beta'-shift of the truncated expansion, with beta' increasing to beta.
  std::vector<int> digits(out.spec.expansion.begin(), out.spec.expansion.end());
  while (!digits.empty() && digits.back() == 0) digits.pop_back();
  const int states = static_cast<int>(digits.size());

  struct Edge {
    int from;
    int to;
  };
  std::vector<Edge> edges;
  for (int k = 0; k < states; ++k) {
    const int a = digits[static_cast<std::size_t>(k)];
    for (int d = 0; d < a; ++d) edges.push_back({k, 0});
    if (k + 1 < states) edges.push_back({k, k + 1});
  }
  const auto e = edges.size();
  std::vector<std::uint8_t> flat(e * e, 0);
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t j = 0; j < e; ++j) {
      if (edges[i].to == edges[j].from) flat[i * e + j] = 1;
    }
  }
  std::ostringstream label;
  label << "beta-shift(" << beta << ", depth " << depth << ")";
  out.system = std::make_shared<const SftSystem>(static_cast<int>(e), std::move(flat), label.str());
  return out;
}

// ---------------------------------------------------------------------------
// Interval maps

double Branch::map(double x) const {
  switch (family) {
    case BranchFamily::Affine: return slope * x + intercept;
    case BranchFamily::MannevillePomeauLeft:
      return x * (1.0 + std::pow(2.0, exponent) * std::pow(x, exponent));
  }
  return x;
}

double Branch::derivative(double x) const {
  switch (family) {
    case BranchFamily::Affine: return slope;
    case BranchFamily::MannevillePomeauLeft:
      return 1.0 + std::pow(2.0, exponent) * (1.0 + exponent) * std::pow(x, exponent);
  }
  return 1.0;
}

double Branch::inverse(double y) const {
  switch (family) {
    case BranchFamily::Affine: return std::clamp((y - intercept) / slope, lo, hi);
    case BranchFamily::MannevillePomeauLeft: {
      if (y <= 0.0) return 0.0;
      // f is increasing and convex, so Newton started to the right of the
      // root decreases monotonically onto it.
      double x = std::min(y, hi);
      for (int it = 0; it < 100; ++it) {
        const double step = (map(x) - y) / derivative(x);
        const double next = x - step;
        if (!(next < x)) break;
        x = next;
      }
      return std::clamp(x, lo, hi);
    }
  }
  return y;
}

bool Branch::increasing() const {
  return family == BranchFamily::MannevillePomeauLeft || slope > 0.0;
}

DerivativeTrend Branch::trend() const {
  switch (family) {
    case BranchFamily::Affine: return DerivativeTrend::Constant;
    case BranchFamily::MannevillePomeauLeft: return DerivativeTrend::Increasing;
  }
  return DerivativeTrend::Unknown;
}

bool Branch::full() const {
  const double a = map(lo);
  const double b = map(hi);
  return std::abs(std::min(a, b)) <= 1e-12 && std::abs(std::max(a, b) - 1.0) <= 1e-12;
}

IntervalMapSystem::IntervalMapSystem(std::vector<Branch> branches, std::string label)
    : branches_(std::move(branches)), label_(std::move(label)) {
  if (branches_.empty()) throw Error(ErrorCode::InvalidArgument, "an interval map needs a branch");
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch& a, const Branch& b) { return a.lo < b.lo; });
  if (std::abs(branches_.front().lo) > 1e-12 || std::abs(branches_.back().hi - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "branch domains must cover [0, 1]");
  }
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    const auto& b = branches_[i];
    if (!(b.hi > b.lo)) throw Error(ErrorCode::InvalidArgument, "empty branch domain");
    if (i + 1 < branches_.size() && std::abs(b.hi - branches_[i + 1].lo) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "branch domains must tile [0, 1]");
    }
    if (b.family == BranchFamily::Affine && b.slope == 0.0) {
      throw Error(ErrorCode::InvalidArgument, "affine branch with zero slope is not injective");
    }
    if (b.family == BranchFamily::MannevillePomeauLeft && !(b.exponent > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "Manneville-Pomeau exponent must be positive");
    }
    // Spot-check the derivative formula against central differences.
    for (int k = 1; k <= 16; ++k) {
      const double x = b.lo + (b.hi - b.lo) * k / 17.0;
      const double h = 1e-6 * (b.hi - b.lo);
      const double fd = (b.map(x + h) - b.map(x - h)) / (2.0 * h);
      const double d = b.derivative(x);
      if (std::abs(fd - d) > 1e-6 * std::max(1.0, std::abs(d))) {
        throw Error(ErrorCode::InvalidArgument, "branch derivative disagrees with finite differences");
      }
    }
  }
}

bool IntervalMapSystem::all_full() const {
  return std::all_of(branches_.begin(), branches_.end(), [](const Branch& b) { return b.full(); });
}

bool IntervalMapSystem::derivatives_monotone() const {
  return std::all_of(branches_.begin(), branches_.end(),
                     [](const Branch& b) { return b.trend() != DerivativeTrend::Unknown; });
}

Branch affine_branch(double lo, double hi, double slope, double intercept) {
  Branch b;
  b.lo = lo;
  b.hi = hi;
  b.family = BranchFamily::Affine;
  b.slope = slope;
  b.intercept = intercept;
  return b;
}

IntervalMapSystem build_manneville_pomeau(double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  Branch left;
  left.lo = 0.0;
  left.hi = 0.5;
  left.family = BranchFamily::MannevillePomeauLeft;
  left.exponent = alpha;
  std::ostringstream label;
  label << "manneville-pomeau(" << alpha << ")";
  return IntervalMapSystem({left, affine_branch(0.5, 1.0, 2.0, -1.0)}, label.str());
}

IntervalMapSystem build_doubling() {
  return IntervalMapSystem({affine_branch(0.0, 0.5, 2.0, 0.0), affine_branch(0.5, 1.0, 2.0, -1.0)},
                           "doubling");
}

IntervalMapSystem build_affine_map(std::vector<Branch> branches, std::string label) {
  return IntervalMapSystem(std::move(branches), std::move(label));
}

}  // namespace thermo
