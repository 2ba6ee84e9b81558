#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace thermo {

using Symbol = int;
using Word = std::vector<Symbol>;

inline constexpr std::size_t kDefaultWordCap = 10'000'000;

// One-sided subshift of finite type. allowed(i, j) means j may follow i.
class SftSystem {
 public:
  SftSystem(int alphabet_size, std::vector<std::uint8_t> transition, std::string label);

  [[nodiscard]] int alphabet_size() const noexcept { return size_; }
  [[nodiscard]] bool allowed(Symbol from, Symbol to) const noexcept {
    return transition_[static_cast<std::size_t>(from * size_ + to)] != 0;
  }
  [[nodiscard]] std::span<const Symbol> successors(Symbol s) const { return successors_[s]; }
  [[nodiscard]] std::span<const Symbol> predecessors(Symbol s) const { return predecessors_[s]; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }

  [[nodiscard]] bool admissible(std::span<const Symbol> w) const;
  [[nodiscard]] bool cyclically_admissible(std::span<const Symbol> w) const;
  [[nodiscard]] Eigen::MatrixXd adjacency() const;
  [[nodiscard]] std::vector<std::vector<int>> transition_rows() const;
  [[nodiscard]] std::size_t transition_count() const;

  [[nodiscard]] bool irreducible() const;
  // gcd of cycle lengths; meaningful for irreducible systems only.
  [[nodiscard]] int period() const;

  // Structural equality: same alphabet and transitions. Labels are ignored.
  friend bool operator==(const SftSystem& a, const SftSystem& b) {
    return a.size_ == b.size_ && a.transition_ == b.transition_;
  }

 private:
  int size_;
  std::vector<std::uint8_t> transition_;
  std::string label_;
  std::vector<std::vector<Symbol>> successors_;
  std::vector<std::vector<Symbol>> predecessors_;
};

using SystemPtr = std::shared_ptr<const SftSystem>;

SystemPtr build_sft(int alphabet_size, const std::vector<std::vector<int>>& transition,
                    std::string label = {});
SystemPtr full_shift(int alphabet_size);
SystemPtr golden_mean_shift();

bool same_system(const SystemPtr& a, const SystemPtr& b);
void require_same_system(const SystemPtr& a, const SystemPtr& b, const char* context);

// Number of admissible words of length n, saturating at UINT64_MAX.
std::uint64_t count_words(const SftSystem& sys, int n);
std::vector<Word> enumerate_words(const SftSystem& sys, int n,
                                  std::size_t cap = kDefaultWordCap);
void check_word_cap(const SftSystem& sys, int n, std::size_t cap);

std::string format_word(std::span<const Symbol> w, int alphabet_size);

// The admissible words of a fixed length, in lexicographic order, with
// constant-time-ish lookup of a word's position.
class WordIndex {
 public:
  WordIndex(SystemPtr sys, int depth, std::size_t cap = kDefaultWordCap);

  [[nodiscard]] const SystemPtr& system() const noexcept { return system_; }
  [[nodiscard]] int depth() const noexcept { return depth_; }
  [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
  [[nodiscard]] const Word& word(std::size_t i) const { return words_[i]; }
  [[nodiscard]] const std::vector<Word>& words() const noexcept { return words_; }
  [[nodiscard]] std::optional<std::size_t> find(std::span<const Symbol> w) const;
  [[nodiscard]] std::size_t at(std::span<const Symbol> w) const;
  // Positions of the words that may follow word i in the block presentation:
  // those whose first depth-1 symbols are the last depth-1 symbols of word i.
  [[nodiscard]] std::span<const std::size_t> extensions(std::size_t i) const {
    return extensions_[i];
  }

 private:
  [[nodiscard]] std::uint64_t code(std::span<const Symbol> w) const;

  SystemPtr system_;
  int depth_;
  std::vector<Word> words_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::vector<std::size_t>> extensions_;
};

using WordIndexPtr = std::shared_ptr<const WordIndex>;

WordIndexPtr make_word_index(SystemPtr sys, int depth, std::size_t cap = kDefaultWordCap);

// k-block presentation: symbol i of `recoded` is the admissible k-word
// dictionary->word(i) of `base`.
struct BlockRecoding {
  SystemPtr base;
  int block_length = 1;
  SystemPtr recoded;
  WordIndexPtr dictionary;
};

BlockRecoding higher_block(const SystemPtr& sys, int block_length,
                           std::size_t cap = kDefaultWordCap);
// The SFT whose symbols are the words of `index` (the system itself at depth 1
// up to relabeling).
SystemPtr block_system(const WordIndex& index);

// ---------------------------------------------------------------------------
// Beta shifts

struct BetaShiftSpec {
  double beta = 2.0;
  std::vector<int> expansion;  // greedy digits a_1..a_N, zero padded
  int truncation_depth = 0;
  int terminating_length = 0;  // p when the greedy expansion stops after p digits, else 0
};

struct BetaShift {
  BetaShiftSpec spec;
  SystemPtr system;  // vertex shift on the edges of the follower-set automaton
};

BetaShift build_beta_shift(double beta, int depth);

// ---------------------------------------------------------------------------
// Piecewise expanding interval maps

enum class BranchFamily { Affine, MannevillePomeauLeft };

// How |f'| varies across a branch domain as x increases.
enum class DerivativeTrend { Constant, Increasing, Decreasing, Unknown };

struct Branch {
  double lo = 0.0;
  double hi = 1.0;
  BranchFamily family = BranchFamily::Affine;
  // Affine: f(x) = slope * x + intercept.  MP left branch: f(x) = x (1 + 2^a x^a).
  double slope = 1.0;
  double intercept = 0.0;
  double exponent = 1.0;

  [[nodiscard]] double map(double x) const;
  [[nodiscard]] double derivative(double x) const;
  // Preimage of y in [0, 1] under a full branch.
  [[nodiscard]] double inverse(double y) const;
  [[nodiscard]] bool increasing() const;
  [[nodiscard]] DerivativeTrend trend() const;
  [[nodiscard]] bool full() const;
};

class IntervalMapSystem {
 public:
  IntervalMapSystem(std::vector<Branch> branches, std::string label);

  [[nodiscard]] std::size_t branch_count() const noexcept { return branches_.size(); }
  [[nodiscard]] const Branch& branch(std::size_t i) const { return branches_[i]; }
  [[nodiscard]] const std::vector<Branch>& branches() const noexcept { return branches_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] bool all_full() const;
  [[nodiscard]] bool derivatives_monotone() const;

 private:
  std::vector<Branch> branches_;
  std::string label_;
};

Branch affine_branch(double lo, double hi, double slope, double intercept);
IntervalMapSystem build_manneville_pomeau(double alpha);
IntervalMapSystem build_doubling();
IntervalMapSystem build_affine_map(std::vector<Branch> branches, std::string label = "affine");

}  // namespace thermo
