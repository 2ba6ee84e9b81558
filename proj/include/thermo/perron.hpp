#pragma once

#include <Eigen/Dense>

namespace thermo {

struct PerronData {
  double log_lambda = 0.0;
  Eigen::VectorXd right_vec;  // sums to 1
  Eigen::VectorXd left_vec;   // left . right = 1
  int iterations = 0;
  double residual = 0.0;      // max |L r - lambda r| for the scaled matrix
};

enum class PerronMethod { Automatic, Power, ShiftedInverse };

struct PerronOptions {
  double tolerance = 1e-12;  // relative Collatz-Wielandt bracket width
  int max_iterations = 100000;
  PerronMethod method = PerronMethod::Automatic;
};

// Collatz-Wielandt bounds min_i (Lv)_i / v_i <= lambda <= max_i (Lv)_i / v_i
// for a nonnegative irreducible L and a positive vector v.
struct CwBracket {
  double lower = 0.0;
  double upper = 0.0;
};
CwBracket collatz_wielandt(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& v);

bool strongly_connected(const Eigen::MatrixXd& nonnegative);

// Perron root and vectors of the nonnegative irreducible matrix
// exp(log_scale) * scaled. Throws NotIrreducible or ConvergenceFailure.
PerronData perron(const Eigen::MatrixXd& scaled, double log_scale = 0.0,
                  const PerronOptions& options = {});

}  // namespace thermo
