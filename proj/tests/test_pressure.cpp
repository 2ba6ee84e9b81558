#include "oracle_values.hpp"
#include "oracles.hpp"

#include "thermo/error.hpp"
#include "thermo/pressure.hpp"
#include "thermo/random.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace thermo;

namespace {

LocallyConstantPotential random_potential(const SystemPtr& sys, int depth, Rng& rng, double scale = 2.0) {
  const auto index = make_word_index(sys, depth);
  std::vector<double> v(index->size());
  for (auto& x : v) x = uniform(rng, -scale, scale);
  return {index, v};
}

std::function<double(const std::vector<int>&)> as_function(const LocallyConstantPotential& phi) {
  return [phi](const std::vector<int>& w) { return phi(w); };
}

MarkovMeasure random_chain(const SystemPtr& sys, Rng& rng) {
  const int m = sys->alphabet_size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (sys->allowed(i, j)) p(i, j) = uniform(rng, 0.05, 1.0);
    }
    p.row(i) /= p.row(i).sum();
  }
  return MarkovMeasure::from_stochastic(sys, p);
}

// (1/n) log of the sum over admissible (n + depth - 1)-strings of exp(S_n phi),
// enumerated by brute force. Each separated-set term is a max over a subset of
// these, so the library value can never exceed this.
double extension_sum_bound(const LocallyConstantPotential& phi, int n) {
  const auto rows = phi.system()->transition_rows();
  const int k = phi.depth();
  double total = 0.0;
  for (const auto& w : oracle::admissible_strings(rows, n + k - 1)) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<Symbol> block(w.begin() + i, w.begin() + i + k);
      sum += phi(block);
    }
    total += std::exp(sum);
  }
  return std::log(total) / n;
}

}  // namespace

TEST_SUITE("pressure") {
  TEST_CASE("matrix_pressure examples") {
    CHECK(std::abs(matrix_pressure(LocallyConstantPotential::constant(full_shift(2), 1, 0.0)).log_lambda -
                   oracle::kLog2) <= 1e-12);
    CHECK(std::abs(matrix_pressure(LocallyConstantPotential::constant(golden_mean_shift(), 1, 0.0)).log_lambda -
                   oracle::kLogGolden) <= 1e-12);
    const auto phi = LocallyConstantPotential::from_symbol_values(full_shift(2), {0.0, std::log(3.0)});
    CHECK(std::abs(matrix_pressure(phi).log_lambda - oracle::kLog4) <= 1e-12);
  }

  TEST_CASE("weight convention reads the potential at the source symbol") {
    const auto phi = LocallyConstantPotential::from_symbol_values(golden_mean_shift(), {0.0, 1.0});
    const auto l = weighted_transition(phi);
    // exp(phi - max phi): rows scale by the source symbol's weight.
    CHECK(l(0, 0) == doctest::Approx(std::exp(-1.0)));
    CHECK(l(0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == 0.0);
  }

  TEST_CASE("matrix_pressure agrees with an independent eigensolver") {
    Rng rng(21);
    const std::vector<oracle::Transition> systems{oracle::kFull2, oracle::kGolden,
                                                  {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}},
                                                  {{0, 1}, {1, 0}}};
    for (const auto& a : systems) {
      const auto sys = build_sft(static_cast<int>(a.size()), a);
      for (int depth = 1; depth <= 3; ++depth) {
        for (int trial = 0; trial < 5; ++trial) {
          const auto phi = random_potential(sys, depth, rng);
          const auto data = matrix_pressure(phi);
          const double expected = oracle::pressure_depth_k(a, depth, as_function(phi));
          CHECK(std::abs(data.log_lambda - expected) <= 1e-10);
        }
      }
    }
  }

  TEST_CASE("Perron data invariants") {
    Rng rng(22);
    for (const auto& sys : {full_shift(2), golden_mean_shift(), full_shift(3)}) {
      const auto phi = random_potential(sys, 2, rng);
      const auto data = matrix_pressure(phi);
      CHECK(data.right_vec.minCoeff() > 0.0);
      CHECK(data.left_vec.minCoeff() > 0.0);
      CHECK(std::abs(data.right_vec.sum() - 1.0) <= 1e-12);
      CHECK(std::abs(data.left_vec.dot(data.right_vec) - 1.0) <= 1e-12);
      CHECK(data.residual <= 1e-12);
    }
  }

  TEST_CASE("periodic systems keep their Perron root") {
    const auto flip = build_sft(2, {{0, 1}, {1, 0}});
    const auto phi = LocallyConstantPotential::from_symbol_values(flip, {0.4, -1.0});
    CHECK(std::abs(matrix_pressure(phi).log_lambda - 0.5 * (0.4 - 1.0)) <= 1e-12);
  }

  TEST_CASE("reducible systems are rejected") {
    const auto loops = build_sft(2, {{1, 0}, {0, 1}});
    try {
      (void)matrix_pressure(LocallyConstantPotential::constant(loops, 1, 0.0));
      FAIL("reducible system accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotIrreducible);
    }
  }

  TEST_CASE("separated_set_pressure examples") {
    const auto zero = separated_set_pressure(LocallyConstantPotential::constant(full_shift(2), 1, 0.0), 8);
    for (const auto& row : zero.depth_sequence) CHECK(std::abs(row.value - oracle::kLog2) <= 1e-12);

    const auto phi = LocallyConstantPotential::from_symbol_values(full_shift(2), {0.0, std::log(3.0)});
    const auto est = separated_set_pressure(phi, 5);
    CHECK(std::abs(est.depth_sequence[4].value - oracle::kLog4) <= 1e-12);

    const auto golden = separated_set_pressure(LocallyConstantPotential::constant(golden_mean_shift(), 1, 0.0), 10);
    CHECK(std::abs(golden.depth_sequence[9].value - std::log(144.0) / 10.0) <= 1e-12);  // F_12 = 144
    CHECK(std::abs(golden.depth_sequence[9].value - oracle::kLogGolden) <= 0.05);
  }

  TEST_CASE("separated-set sums agree with brute force") {
    Rng rng(23);
    for (const auto& a : std::vector<oracle::Transition>{oracle::kFull2, oracle::kGolden}) {
      const auto sys = build_sft(2, a);
      for (int depth = 1; depth <= 2; ++depth) {
        const auto phi = random_potential(sys, depth, rng);
        const auto est = separated_set_pressure(phi, 8, false);
        for (const auto& row : est.depth_sequence) {
          CHECK(std::abs(row.value - oracle::separated_value(a, depth, row.n, as_function(phi))) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("separated-set estimates bracket the matrix pressure") {
    Rng rng(24);
    for (const auto& sys : {full_shift(2), golden_mean_shift(), full_shift(3)}) {
      for (int trial = 0; trial < 5; ++trial) {
        const auto phi = random_potential(sys, 1 + trial % 2, rng);
        const double exact = matrix_pressure(phi).log_lambda;
        const auto est = separated_set_pressure(phi, 10);
        CHECK(est.upper >= exact - 1e-12);
        for (const auto& row : est.depth_sequence) {
          CHECK(row.value >= exact - 1e-12);
          CHECK(row.value <= extension_sum_bound(phi, row.n) + 1e-12);
        }
      }
    }
  }

  TEST_CASE("pressure CSV header") {
    const auto est = separated_set_pressure(LocallyConstantPotential::constant(full_shift(2), 1, 0.0), 2);
    std::ostringstream out;
    est.write_csv(out);
    CHECK(out.str().rfind("n,value_n,lower,upper\n", 0) == 0);
  }

  TEST_CASE("transfer operator examples") {
    const auto doubling = build_doubling();
    for (int n : {1, 5, 12}) {
      const auto one = transfer_operator_pressure(doubling, 1.0, n);
      CHECK(std::abs(one.lower) <= 1e-12);
      CHECK(std::abs(one.upper) <= 1e-12);
      const auto zero = transfer_operator_pressure(doubling, 0.0, n);
      CHECK(std::abs(zero.lower - oracle::kLog2) <= 1e-12);
      CHECK(std::abs(zero.upper - oracle::kLog2) <= 1e-12);
    }
    const auto mp = transfer_operator_pressure(build_manneville_pomeau(1.0), 1.0, 18);
    CHECK(mp.lower <= 0.0);
    CHECK(mp.upper >= 0.0);
    CHECK(mp.width() <= 0.05);
  }

  TEST_CASE("transfer operator brackets are nested in depth") {
    const TransferOperatorEngine mp(build_manneville_pomeau(0.5));
    const TransferOperatorEngine doubling(build_doubling());
    for (double t : {0.3, 0.8, 1.0, 1.4}) {
      for (const auto* engine : {&mp, &doubling}) {
        auto previous = engine->pressure(t, 2);
        for (int n = 4; n <= 14; n += 2) {
          const auto next = engine->pressure(t, n);
          CHECK(next.lower >= previous.lower - 1e-12);
          CHECK(next.upper <= previous.upper + 1e-12);
          previous = next;
        }
      }
    }
  }

  TEST_CASE("affine maps with unequal slopes") {
    // Slopes 3 and 3/2: P(t) solves 3^{-t} + (3/2)^{-t} = e^{P}.
    const auto map = build_affine_map({affine_branch(0.0, 1.0 / 3, 3.0, 0.0), affine_branch(1.0 / 3, 1.0, 1.5, -0.5)});
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
      const auto est = transfer_operator_pressure(map, t, 10);
      const double exact = std::log(std::pow(3.0, -t) + std::pow(1.5, -t));
      CHECK(est.lower <= exact + 1e-12);
      CHECK(est.upper >= exact - 1e-12);
      CHECK(est.width() <= 1e-10);
    }
  }

  TEST_CASE("transfer operator preconditions") {
    const auto partial = build_affine_map({affine_branch(0.0, 0.5, 1.5, 0.0), affine_branch(0.5, 1.0, 2.0, -1.0)});
    try {
      (void)transfer_operator_pressure(partial, 1.0, 4);
      FAIL("non-full branch accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFullBranch);
    }
    try {
      (void)transfer_operator_pressure(build_doubling(), 1.0, kMaxTransferDepth + 1);
      FAIL("depth beyond the limit accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DepthOverflow);
    }
  }

  TEST_CASE("axiom suite examples") {
    for (const auto& sys : {full_shift(2), golden_mean_shift()}) {
      AxiomSuiteOptions opts;
      opts.samples = 60;
      const auto report = axiom_suite(sys, PressureEngine::Matrix, opts);
      CHECK(report.pass());
      for (const auto& check : report.checks) {
        CHECK(check.worst_violation <= 1e-10);
      }
    }
    AxiomSuiteOptions est;
    est.samples = 40;
    est.n_max = 10;
    CHECK(axiom_suite(full_shift(2), PressureEngine::SeparatedSet, est).pass());
    est.transfer_depth = 10;
    CHECK(axiom_suite(build_doubling(), est).pass());
  }

  TEST_CASE("axiom report CSV") {
    AxiomSuiteOptions opts;
    opts.samples = 5;
    const auto report = axiom_suite(full_shift(2), PressureEngine::Matrix, opts);
    std::ostringstream out;
    report.write_csv(out);
    CHECK(out.str().rfind("axiom,worst_violation,tolerance,pass\n", 0) == 0);
    CHECK(report.checks.size() == 4);
  }

  TEST_CASE("coboundary invariance examples") {
    const auto full = full_shift(2);
    const auto zero = LocallyConstantPotential::constant(full, 1, 0.0);
    const auto constant = coboundary_invariance_check(zero, LocallyConstantPotential::constant(full, 1, 2.5));
    CHECK(std::abs(constant.difference) <= 1e-14);
    const auto step = coboundary_invariance_check(zero, LocallyConstantPotential::from_symbol_values(full, {0.0, 1.0}));
    CHECK(std::abs(step.pressure - oracle::kLog2) <= 1e-10);
    CHECK(std::abs(step.pressure_with_coboundary - oracle::kLog2) <= 1e-10);

    Rng rng(25);
    for (int trial = 0; trial < 20; ++trial) {
      const auto phi = random_potential(golden_mean_shift(), 1, rng);
      const auto psi = random_potential(golden_mean_shift(), 1 + trial % 2, rng);
      const auto report = coboundary_invariance_check(phi, psi);
      CHECK(report.pass);
      CHECK(std::abs(report.difference) <= 1e-9);
    }
  }

  TEST_CASE("pressure dominates entropy plus integral") {
    Rng rng(26);
    for (const auto& sys : {full_shift(2), golden_mean_shift(), full_shift(3)}) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto phi = random_potential(sys, 1, rng);
        const auto mu = random_chain(sys, rng);
        const double gap = matrix_pressure(phi).log_lambda - integrate(mu, phi);
        CHECK(gap >= ks_entropy(mu) - 1e-10);
        CHECK(ks_entropy(mu) >= 0.0);
      }
    }
  }
}
