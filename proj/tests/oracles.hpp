#pragma once

// Independent reference computations for tests. These deliberately avoid the
// library's own algorithms: words are enumerated as raw integers over the full
// alphabet, and eigenvalues come from Eigen's general eigensolver.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Transition = std::vector<std::vector<int>>;

// All strings of length n over m symbols, as digit vectors, most significant first.
inline std::vector<std::vector<int>> all_strings(int m, int n) {
  std::vector<std::vector<int>> out;
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(m);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<int> w(static_cast<std::size_t>(n));
    std::uint64_t c = code;
    for (int i = n - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::uint64_t>(m));
      c /= static_cast<std::uint64_t>(m);
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline bool admissible(const Transition& a, const std::vector<int>& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (a[static_cast<std::size_t>(w[i - 1])][static_cast<std::size_t>(w[i])] == 0) return false;
  }
  return true;
}

inline std::vector<std::vector<int>> admissible_strings(const Transition& a, int n) {
  std::vector<std::vector<int>> out;
  for (auto& w : all_strings(static_cast<int>(a.size()), n)) {
    if (admissible(a, w)) out.push_back(std::move(w));
  }
  return out;
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  double best = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    best = std::max(best, std::abs(solver.eigenvalues()(i)));
  }
  return best;
}

// Pressure of a depth-1 potential: log spectral radius of e^{phi(i)} A(i, j).
inline double pressure_depth1(const Transition& a, const std::vector<double>& phi) {
  const auto m = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
        l(i, j) = std::exp(phi[static_cast<std::size_t>(i)]);
      }
    }
  }
  return std::log(spectral_radius(l));
}

// Pressure of a potential on admissible k-words, given as a function of the
// word, through the edge matrix between overlapping k-words.
inline double pressure_depth_k(const Transition& a, int k,
                               const std::function<double(const std::vector<int>&)>& phi) {
  const auto words = admissible_strings(a, k);
  const auto n = static_cast<Eigen::Index>(words.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& u = words[static_cast<std::size_t>(i)];
      const auto& v = words[static_cast<std::size_t>(j)];
      bool overlap = a[static_cast<std::size_t>(u.back())][static_cast<std::size_t>(v.back())] != 0;
      for (int s = 1; s < k && overlap; ++s) {
        overlap = u[static_cast<std::size_t>(s)] == v[static_cast<std::size_t>(s - 1)];
      }
      if (overlap) l(i, j) = std::exp(phi(u));
    }
  }
  return std::log(spectral_radius(l));
}

// (1/n) log sum over admissible n-strings of max over admissible (k-1)-extensions
// of exp(S_n phi), for a depth-k potential.
inline double separated_value(const Transition& a, int k, int n,
                              const std::function<double(const std::vector<int>&)>& phi) {
  std::vector<double> best;
  std::vector<std::vector<int>> prefixes = admissible_strings(a, n);
  best.assign(prefixes.size(), -INFINITY);
  for (const auto& w : admissible_strings(a, n + k - 1)) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += phi(std::vector<int>(w.begin() + i, w.begin() + i + k));
    }
    const std::vector<int> prefix(w.begin(), w.begin() + n);
    for (std::size_t p = 0; p < prefixes.size(); ++p) {
      if (prefixes[p] == prefix) best[p] = std::max(best[p], s);
    }
  }
  double total = 0.0;
  for (double b : best) total += std::exp(b);
  return std::log(total) / n;
}

inline double bernoulli_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

// Singular values via Eigen's SVD, for comparison with the library's Jacobi sweep.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

inline const Transition kFull2 = {{1, 1}, {1, 1}};
inline const Transition kGolden = {{1, 1}, {1, 0}};

}  // namespace oracle
