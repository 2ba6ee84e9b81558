#include "oracle_values.hpp"
#include "oracles.hpp"

#include "thermo/error.hpp"
#include "thermo/measures.hpp"
#include "thermo/perron.hpp"
#include "thermo/random.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace thermo;

namespace {

MarkovMeasure random_chain(const SystemPtr& sys, Rng& rng) {
  const int m = sys->alphabet_size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      if (sys->allowed(i, j)) total += p(i, j) = uniform(rng, 0.05, 1.0);
    }
    p.row(i) /= total;
  }
  return MarkovMeasure::from_stochastic(sys, p);
}

LocallyConstantPotential random_potential(const SystemPtr& sys, int depth, Rng& rng) {
  const auto index = make_word_index(sys, depth);
  std::vector<double> v(index->size());
  for (auto& x : v) x = uniform(rng, -2.0, 2.0);
  return {index, v};
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("birkhoff_sum examples") {
    const auto full = full_shift(2);
    const auto phi = LocallyConstantPotential::from_symbol_values(full, {0.0, std::log(3.0)});
    const Word w{1, 0, 1};
    CHECK(birkhoff_sum(phi, w) == doctest::Approx(std::log(9.0)).epsilon(1e-15));

    const auto c = LocallyConstantPotential::constant(full, 1, 0.7);
    CHECK(birkhoff_sum(c, Word{0, 1, 1, 0, 1}) == doctest::Approx(3.5).epsilon(1e-15));

    const auto golden = golden_mean_shift();
    const auto index = make_word_index(golden, 2);  // 00, 01, 10
    const LocallyConstantPotential depth2(index, {1.0, 2.0, 3.0});
    CHECK(birkhoff_sum(depth2, Word{0, 1, 0}, 2) == 5.0);
  }

  TEST_CASE("birkhoff_sum rejects short words") {
    const auto index = make_word_index(full_shift(2), 3);
    const LocallyConstantPotential phi(index, std::vector<double>(8, 1.0));
    try {
      (void)birkhoff_sum(phi, Word{0, 1}, 1);
      FAIL("short word accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::WordTooShort);
    }
  }

  TEST_CASE("integrate examples") {
    const auto full = full_shift(2);
    const auto phi = LocallyConstantPotential::from_symbol_values(full, {0.0, 1.0});
    CHECK(integrate(MarkovMeasure::bernoulli(full, {0.5, 0.5}), phi) == doctest::Approx(0.5));
    CHECK(integrate(MarkovMeasure::bernoulli(full, {0.25, 0.75}), phi) == doctest::Approx(0.75));
    Rng rng(2);
    const auto mu = random_chain(full, rng);
    CHECK(integrate(mu, LocallyConstantPotential::constant(full, 2, -1.25)) == doctest::Approx(-1.25));
  }

  TEST_CASE("ks_entropy examples") {
    const auto full = full_shift(2);
    CHECK(ks_entropy(MarkovMeasure::bernoulli(full, {0.5, 0.5})) == doctest::Approx(oracle::kLog2).epsilon(1e-14));
    CHECK(ks_entropy(MarkovMeasure::bernoulli(full, {1.0 / 3, 2.0 / 3})) ==
          doctest::Approx(oracle::kBernoulliThirdEntropy).epsilon(1e-14));
    CHECK(ks_entropy(MarkovMeasure::fixed_point(full, 0)) == 0.0);
  }

  TEST_CASE("marginal examples") {
    const auto full = full_shift(2);
    const auto m2 = marginal(MarkovMeasure::bernoulli(full, {0.5, 0.5}), 2);
    for (double w : m2.weights()) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));

    const auto parry = marginal(MarkovMeasure::parry(golden_mean_shift()), 1);
    CHECK(std::abs(parry.weight(0) - oracle::kParryGolden0) <= 1e-12);
    CHECK(std::abs(parry.weight(1) - (1.0 - oracle::kParryGolden0)) <= 1e-12);

    const auto point = marginal(MarkovMeasure::fixed_point(full, 0), 3);
    CHECK(point(Word{0, 0, 0}) == 1.0);
    double others = 0.0;
    for (double w : point.weights()) others += w;
    CHECK(others == 1.0);
  }

  TEST_CASE("marginal_distance examples") {
    const auto full = full_shift(2);
    const auto a = marginal(MarkovMeasure::bernoulli(full, {0.5, 0.5}), 1);
    CHECK(marginal_distance(a, a) == 0.0);
    CHECK(marginal_distance(marginal(MarkovMeasure::fixed_point(full, 0), 1),
                            marginal(MarkovMeasure::fixed_point(full, 1), 1)) == 2.0);
    CHECK(marginal_distance(a, marginal(MarkovMeasure::bernoulli(full, {0.25, 0.75}), 1)) ==
          doctest::Approx(0.5));
  }

  TEST_CASE("marginal CSV lists words lexicographically") {
    const auto m = marginal(MarkovMeasure::bernoulli(full_shift(2), {0.25, 0.75}), 2);
    std::ostringstream out;
    m.write_csv(out);
    CHECK(out.str() == "word,weight\n00,0.0625\n01,0.1875\n10,0.1875\n11,0.5625\n");
  }

  TEST_CASE("integrate is linear in phi and affine in mu") {
    Rng rng(8);
    for (const auto& sys : {full_shift(2), golden_mean_shift(), full_shift(3)}) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto phi = random_potential(sys, 2, rng);
        const auto psi = random_potential(sys, 2, rng);
        const auto mu = random_chain(sys, rng);
        const double a = uniform(rng, -2, 2);
        const double lhs = integrate(mu, phi + psi.scaled(a));
        CHECK(std::abs(lhs - integrate(mu, phi) - a * integrate(mu, psi)) <= 1e-10);

        // Mixtures act on cylinder marginals.
        const auto nu = random_chain(sys, rng);
        const double t = uniform01(rng);
        const auto ma = marginal(mu, phi.index());
        const auto mb = marginal(nu, phi.index());
        std::vector<double> mix(ma.weights().size());
        for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = t * ma.weight(i) + (1 - t) * mb.weight(i);
        const CylinderMarginal mixed(phi.index(), mix);
        CHECK(std::abs(integrate(mixed, phi) - t * integrate(mu, phi) - (1 - t) * integrate(nu, phi)) <= 1e-10);

        const double c = uniform(rng, -3, 3);
        CHECK(std::abs(integrate(mu, phi.shifted(c)) - integrate(mu, phi) - c) <= 1e-12);
      }
    }
  }

  TEST_CASE("Parry measure has maximal entropy") {
    Rng rng(9);
    for (const auto& a : std::vector<oracle::Transition>{oracle::kFull2, oracle::kGolden,
                                                          {{1, 1, 0}, {0, 1, 1}, {1, 1, 1}}}) {
      const auto sys = build_sft(static_cast<int>(a.size()), a);
      const double h_top = std::log(oracle::spectral_radius(sys->adjacency()));
      CHECK(std::abs(ks_entropy(MarkovMeasure::parry(sys)) - h_top) <= 1e-10);
    }
  }

  TEST_CASE("marginals are consistent across depths") {
    Rng rng(4);
    for (const auto& sys : {full_shift(2), golden_mean_shift(), full_shift(3)}) {
      const auto mu = random_chain(sys, rng);
      for (int k = 1; k <= 4; ++k) {
        const auto deep = marginal(mu, k + 1);
        const auto shallow = marginal(mu, k);
        const auto cut = deep.truncated(shallow.index());
        for (std::size_t i = 0; i < shallow.weights().size(); ++i) {
          CHECK(std::abs(cut.weight(i) - shallow.weight(i)) <= 1e-12);
        }
        double total = 0.0;
        for (double w : deep.weights()) total += w;
        CHECK(std::abs(total - 1.0) <= 1e-12);
      }
    }
  }

  TEST_CASE("MarkovMeasure invariants") {
    Rng rng(6);
    const auto sys = golden_mean_shift();
    const auto mu = random_chain(sys, rng);
    const auto& p = mu.stochastic();
    for (int i = 0; i < 2; ++i) CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-12);
    CHECK(p(1, 1) == 0.0);
    const Eigen::RowVectorXd pi = mu.stationary().transpose();
    CHECK(std::abs(pi.sum() - 1.0) <= 1e-12);
    CHECK((pi * p - pi).cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.5, 0.5, 0.5;  // puts weight on the forbidden word 11
    CHECK_THROWS_AS(MarkovMeasure::from_stochastic(sys, bad), Error);

    Eigen::MatrixXd reducible = Eigen::MatrixXd::Identity(2, 2);
    try {
      (void)MarkovMeasure::from_stochastic(full_shift(2), reducible);
      FAIL("non-unique stationary vector accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonIrreducibleMeasure);
    }
  }

  TEST_CASE("lifted potentials agree on every word") {
    Rng rng(12);
    const auto sys = golden_mean_shift();
    const auto phi = random_potential(sys, 2, rng);
    const auto deep = phi.lifted(4);
    for (const auto& w : enumerate_words(*sys, 4)) CHECK(deep(w) == phi(w));
  }
}
