#pragma once

#include <Eigen/Dense>

#include <vector>

namespace thermo {

// Singular values in nonincreasing order, by one-sided (Hestenes) Jacobi
// orthogonalization of the columns. Accurate to high relative precision for
// the small matrices used here.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);
double top_singular_value(const Eigen::MatrixXd& m);

// k-th compound matrix: entries are the k x k minors, rows and columns indexed
// by k-subsets in lexicographic order. Its operator norm is the norm of the
// k-th exterior power.
Eigen::MatrixXd compound_matrix(const Eigen::MatrixXd& m, int k);

std::vector<std::vector<int>> index_subsets(int n, int k);

// Product kept as scale * exp(log_scale) with the largest entry of `scaled`
// of unit magnitude.
struct StabilizedProduct {
  Eigen::MatrixXd scaled;
  double log_scale = 0.0;

  static StabilizedProduct identity(Eigen::Index n);
  // this <- factor * this
  void left_multiply(const Eigen::MatrixXd& factor);
  [[nodiscard]] double log_norm() const;
};

}  // namespace thermo
