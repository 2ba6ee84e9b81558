#include "oracle_values.hpp"
#include "oracles.hpp"

#include "thermo/error.hpp"
#include "thermo/pressure.hpp"
#include "thermo/random.hpp"
#include "thermo/symbolic.hpp"

#include <doctest.h>

#include <cmath>

using namespace thermo;

namespace {

double entropy(const SystemPtr& sys) {
  return matrix_pressure(LocallyConstantPotential::constant(sys, 1, 0.0)).log_lambda;
}

// Random irreducible transition matrix: a cycle through all symbols plus random extra edges.
std::vector<std::vector<int>> random_irreducible(Rng& rng, int m, double density) {
  std::vector<std::vector<int>> a(m, std::vector<int>(m, 0));
  for (int i = 0; i < m; ++i) a[i][(i + 1) % m] = 1;
  for (auto& row : a) {
    for (auto& x : row) {
      if (uniform01(rng) < density) x = 1;
    }
  }
  return a;
}

}  // namespace

TEST_SUITE("symbolic") {
  TEST_CASE("build_sft accepts the standard presentations") {
    const auto full = build_sft(2, {{1, 1}, {1, 1}});
    CHECK(full->alphabet_size() == 2);
    CHECK(full->transition_count() == 4);

    const auto golden = build_sft(2, {{1, 1}, {1, 0}});
    CHECK(golden->allowed(0, 1));
    CHECK_FALSE(golden->allowed(1, 1));
    CHECK(*golden == *golden_mean_shift());

    const auto loops = build_sft(2, {{1, 0}, {0, 1}});
    CHECK_FALSE(loops->irreducible());
  }

  TEST_CASE("build_sft rejects malformed transitions") {
    CHECK_THROWS_AS(build_sft(2, {{1, 1}, {0, 0}}), Error);
    CHECK_THROWS_AS(build_sft(2, {{1, 2}, {1, 1}}), Error);
    CHECK_THROWS_AS(build_sft(2, {{1, 1}}), Error);
    try {
      build_sft(2, {{1, 0}, {1, 0}});
      FAIL("stranded symbol accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyRowOrColumn);
    }
  }

  TEST_CASE("enumerate_words examples") {
    CHECK(enumerate_words(*full_shift(2), 3).size() == 8);
    CHECK(enumerate_words(*golden_mean_shift(), 3).size() == 5);
    CHECK(enumerate_words(*golden_mean_shift(), 1).size() == 2);
  }

  TEST_CASE("enumeration matches brute force and is lexicographic") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 2 + trial % 3;
      const auto a = random_irreducible(rng, m, 0.4);
      const auto sys = build_sft(m, a);
      for (int n = 1; n <= 6; ++n) {
        const auto words = enumerate_words(*sys, n);
        const auto brute = oracle::admissible_strings(a, n);
        REQUIRE(words.size() == brute.size());
        CHECK(count_words(*sys, n) == brute.size());
        for (std::size_t i = 0; i < words.size(); ++i) CHECK(words[i] == brute[i]);
      }
    }
  }

  TEST_CASE("word cap raises CombinatorialOverflow") {
    try {
      (void)enumerate_words(*full_shift(2), 20, 1000);
      FAIL("cap not enforced");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CombinatorialOverflow);
    }
  }

  TEST_CASE("WordIndex finds every word") {
    const auto index = make_word_index(golden_mean_shift(), 4);
    for (std::size_t i = 0; i < index->size(); ++i) {
      CHECK(index->find(index->word(i)) == i);
    }
    const Word forbidden{1, 1, 0, 0};
    CHECK_FALSE(index->find(forbidden).has_value());
  }

  TEST_CASE("higher_block examples") {
    const auto full = higher_block(full_shift(2), 2);
    CHECK(full.recoded->alphabet_size() == 4);
    CHECK(full.recoded->transition_count() == 8);

    const auto golden = higher_block(golden_mean_shift(), 2);
    CHECK(golden.recoded->alphabet_size() == 3);
    CHECK(golden.dictionary->word(0) == Word{0, 0});
    CHECK(golden.dictionary->word(1) == Word{0, 1});
    CHECK(golden.dictionary->word(2) == Word{1, 0});
  }

  TEST_CASE("higher_block preserves entropy") {
    Rng rng(5);
    for (int trial = 0; trial < 15; ++trial) {
      const int m = 2 + trial % 4;
      const auto sys = build_sft(m, random_irreducible(rng, m, 0.5));
      const double h = entropy(sys);
      for (int k = 2; k <= 3; ++k) {
        CHECK(std::abs(entropy(higher_block(sys, k).recoded) - h) <= 1e-10);
      }
    }
  }

  TEST_CASE("beta shift: golden ratio") {
    for (int depth : {2, 5, 12, 40}) {
      const auto beta = build_beta_shift(oracle::kGoldenRatio, depth);
      CHECK(beta.spec.expansion[0] == 1);
      CHECK(beta.spec.expansion[1] == 1);
      for (std::size_t i = 2; i < beta.spec.expansion.size(); ++i) CHECK(beta.spec.expansion[i] == 0);
      CHECK(std::abs(entropy(beta.system) - oracle::kLogGolden) <= 1e-10);
    }
  }

  TEST_CASE("beta shift: integer beta gives the full shift") {
    for (int b : {2, 3, 5}) {
      const auto beta = build_beta_shift(b, 10);
      CHECK(std::abs(entropy(beta.system) - std::log(b)) <= 1e-10);
    }
  }

  TEST_CASE("beta shift: 1.5 at depth 20") {
    const auto beta = build_beta_shift(1.5, 20);
    CHECK(std::abs(entropy(beta.system) - oracle::kLog1p5) <= 0.01);
  }

  TEST_CASE("beta shift digits follow the greedy recursion") {
    for (double b : {1.3, 1.5, 1.8, 2.5, 3.7, 9.9}) {
      const auto beta = build_beta_shift(b, 12);
      CHECK(beta.spec.expansion[0] == static_cast<int>(std::floor(b)));
      long double remainder = 1.0L;
      for (int n = 0; n < 12; ++n) {
        const int digit = beta.spec.expansion[static_cast<std::size_t>(n)];
        CHECK(digit >= 0);
        CHECK(digit <= static_cast<int>(std::ceil(b)) - 1);
        remainder = remainder * b;
        CHECK(digit == static_cast<int>(std::floor(remainder)));
        remainder -= digit;
      }
    }
  }

  TEST_CASE("beta shift entropy error shrinks with depth") {
    for (double b : {1.3, 1.5, 1.8, 2.5, 3.7}) {
      std::vector<double> error(41);
      for (int d = 1; d <= 40; ++d) error[d] = std::abs(entropy(build_beta_shift(b, d).system) - std::log(b));
      for (int d = 8; d <= 40; ++d) CHECK(error[d] <= error[d - 4] + 1e-12);
    }
  }

  TEST_CASE("beta shift rejects degenerate input") {
    try {
      (void)build_beta_shift(1.0, 10);
      FAIL("beta = 1 accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateBeta);
    }
    CHECK_THROWS_AS((void)build_beta_shift(11.0, 10), Error);
    CHECK_THROWS_AS((void)build_beta_shift(1.5, 65), Error);
  }

  TEST_CASE("Manneville-Pomeau branches") {
    const auto mp1 = build_manneville_pomeau(1.0);
    CHECK(mp1.branch(0).map(0.25) == doctest::Approx(oracle::kMpAlpha1At025).epsilon(1e-15));
    for (double alpha : {0.3, 0.5, 1.0, 2.0, 3.5}) {
      const auto mp = build_manneville_pomeau(alpha);
      CHECK(mp.branch(0).map(0.0) == 0.0);
      CHECK(mp.branch(0).derivative(0.0) == 1.0);
      CHECK(mp.branch(1).map(0.75) == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(mp.branch(1).derivative(0.75) == 2.0);
      CHECK(std::abs(mp.branch(0).map(0.5) - 1.0) <= 1e-12);
      CHECK(std::abs(mp.branch(1).map(0.5)) <= 1e-12);
      CHECK(std::abs(mp.branch(1).map(1.0) - 1.0) <= 1e-12);
      CHECK(mp.all_full());
      CHECK(mp.derivatives_monotone());
    }
  }

  TEST_CASE("Manneville-Pomeau inverses and derivatives") {
    Rng rng(3);
    for (double alpha : {0.5, 1.0, 2.0}) {
      const auto mp = build_manneville_pomeau(alpha);
      for (int i = 0; i < 100; ++i) {
        const double x = uniform01(rng);
        const auto& br = mp.branch(x < 0.5 ? 0 : 1);
        CHECK(std::abs(br.inverse(br.map(x)) - x) <= 1e-10);
      }
      for (const auto& br : mp.branches()) {
        for (int i = 1; i <= 16; ++i) {
          const double x = br.lo + (br.hi - br.lo) * i / 17.0;
          const double h = 1e-6;
          const double fd = (br.map(x + h) - br.map(x - h)) / (2 * h);
          CHECK(std::abs(fd - br.derivative(x)) <= 1e-6 * std::abs(br.derivative(x)));
        }
      }
    }
  }

  TEST_CASE("affine maps report non-full branches") {
    const auto partial = build_affine_map({affine_branch(0.0, 0.5, 1.5, 0.0), affine_branch(0.5, 1.0, 2.0, -1.0)});
    CHECK_FALSE(partial.all_full());
    const auto doubling = build_doubling();
    CHECK(doubling.all_full());
  }
}
