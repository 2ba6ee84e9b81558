#include "thermo/perron.hpp"

#include "thermo/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace thermo {

namespace {

constexpr int kAutomaticDenseLimit = 512;

bool all_positive(const Eigen::VectorXd& v) {
  return (v.array() > 0.0).all() && v.allFinite();
}

bool reaches_all(const Eigen::MatrixXd& a, bool forward) {
  const auto n = a.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<Eigen::Index> todo;
  seen[0] = true;
  todo.push(0);
  while (!todo.empty()) {
    const auto i = todo.front();
    todo.pop();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double entry = forward ? a(i, j) : a(j, i);
      if (entry > 0.0 && !seen[static_cast<std::size_t>(j)]) {
        seen[static_cast<std::size_t>(j)] = true;
        todo.push(j);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

struct VectorResult {
  Eigen::VectorXd vec;
  CwBracket bracket;
  int iterations = 0;
};

bool converged(const CwBracket& b, double tol) {
  return b.upper - b.lower <= tol * b.upper;
}

// Power iteration on L + shift*I. The shift keeps periodic matrices from
// oscillating. It tracks half the certified lower bound, so it never swamps a
// small Perron root.
VectorResult power_method(const Eigen::MatrixXd& l, const PerronOptions& opt) {
  const auto n = l.rows();
  VectorResult r;
  r.vec = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  r.bracket = collatz_wielandt(l, r.vec);
  for (r.iterations = 1; r.iterations <= opt.max_iterations; ++r.iterations) {
    Eigen::VectorXd next = l * r.vec + 0.5 * r.bracket.lower * r.vec;
    next /= next.sum();
    r.vec = std::move(next);
    r.bracket = collatz_wielandt(l, r.vec);
    if (converged(r.bracket, opt.tolerance)) return r;
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "power iteration did not converge in " + std::to_string(opt.max_iterations) +
                  " iterations");
}

// D^-1 L D, formed entrywise so every entry keeps full relative precision.
Eigen::MatrixXd balanced(const Eigen::MatrixXd& l, const Eigen::VectorXd& d) {
  return d.cwiseInverse().asDiagonal() * l * d.asDiagonal();
}

// Inverse iteration with a shift just above the Perron root. (sigma I - L)^-1
// is entrywise positive once sigma exceeds the root, so iterates stay in the
// positive cone and converge regardless of how close other eigenvalues are in
// modulus.
//
// The iteration runs on the diagonally balanced matrix D^-1 L D, where D is
// the eigenvector estimate so far. A dense solve only resolves components to
// a precision relative to the largest one; after balancing all components of
// the working vector are of order one, so eigenvectors spanning many orders
// of magnitude are still found to full relative accuracy.
VectorResult shifted_inverse(const Eigen::MatrixXd& l, const PerronOptions& opt) {
  const auto n = l.rows();
  const auto identity = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd work = l;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  VectorResult r;
  r.bracket = collatz_wielandt(work, w);
  double estimate = r.bracket.upper;
  {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(l, false);
    if (solver.info() == Eigen::Success) {
      estimate = solver.eigenvalues().real().maxCoeff();
    }
  }
  estimate = std::clamp(estimate, r.bracket.lower, r.bracket.upper);
  const double floor = std::numeric_limits<double>::min();
  double sigma = std::max(estimate * (1.0 + 1e-10), floor);

  const int budget = std::min(opt.max_iterations, 500);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sigma * identity - work);
  for (r.iterations = 1; r.iterations <= budget; ++r.iterations) {
    Eigen::VectorXd x = lu.solve(w);
    if (!x.allFinite() || x.sum() == 0.0) {
      // The shift landed on the root to machine precision: nudge it upward.
      sigma = std::max(sigma * (1.0 + 1e-8), floor);
      lu.compute(sigma * identity - work);
      continue;
    }
    x /= x.sum();
    w = std::move(x);
    if (!all_positive(w)) continue;
    r.bracket = collatz_wielandt(work, w);
    if (converged(r.bracket, opt.tolerance)) break;
    if (r.iterations % 8 == 0) {
      const Eigen::VectorXd next_scale = scale.cwiseProduct(w);
      if (all_positive(next_scale) && next_scale.minCoeff() > 1e-280) {
        scale = next_scale / next_scale.maxCoeff();
        work = balanced(l, scale);
        w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        r.bracket = collatz_wielandt(work, w);
      }
      // Tighten the shift using the current certified upper bound.
      sigma = std::max(r.bracket.upper + (r.bracket.upper - r.bracket.lower), floor);
      lu.compute(sigma * identity - work);
    }
  }
  if (r.iterations > budget) {
    throw Error(ErrorCode::ConvergenceFailure,
                "shifted inverse iteration did not converge in " + std::to_string(budget) +
                    " iterations");
  }
  r.vec = scale.cwiseProduct(w);
  r.vec /= r.vec.sum();
  return r;
}

VectorResult dominant_vector(const Eigen::MatrixXd& l, const PerronOptions& opt) {
  if (l.rows() == 1) {
    VectorResult r;
    r.vec = Eigen::VectorXd::Ones(1);
    r.bracket = {l(0, 0), l(0, 0)};
    return r;
  }
  switch (opt.method) {
    case PerronMethod::Power: return power_method(l, opt);
    case PerronMethod::ShiftedInverse: return shifted_inverse(l, opt);
    case PerronMethod::Automatic:
      if (l.rows() <= kAutomaticDenseLimit) {
        try {
          return shifted_inverse(l, opt);
        } catch (const Error&) {
          return power_method(l, opt);
        }
      }
      return power_method(l, opt);
  }
  return power_method(l, opt);
}

}  // namespace

CwBracket collatz_wielandt(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& v) {
  const Eigen::VectorXd lv = matrix * v;
  const Eigen::ArrayXd ratio = lv.array() / v.array();
  return {ratio.minCoeff(), ratio.maxCoeff()};
}

bool strongly_connected(const Eigen::MatrixXd& nonnegative) {
  if (nonnegative.rows() == 0) return false;
  return reaches_all(nonnegative, true) && reaches_all(nonnegative, false);
}

PerronData perron(const Eigen::MatrixXd& scaled, double log_scale, const PerronOptions& options) {
  if (scaled.rows() != scaled.cols() || scaled.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "Perron solver needs a nonempty square matrix");
  }
  if ((scaled.array() < 0.0).any() || !scaled.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "Perron solver needs a finite nonnegative matrix");
  }
  if (!strongly_connected(scaled)) {
    throw Error(ErrorCode::NotIrreducible, "weighted transition matrix is reducible");
  }

  const auto right = dominant_vector(scaled, options);
  const Eigen::MatrixXd transposed = scaled.transpose();
  const auto left = dominant_vector(transposed, options);

  const double lambda = 0.5 * (right.bracket.lower + right.bracket.upper);
  PerronData out;
  out.log_lambda = std::log(lambda) + log_scale;
  out.right_vec = right.vec / right.vec.sum();
  out.left_vec = left.vec / left.vec.dot(out.right_vec);
  out.iterations = right.iterations + left.iterations;
  out.residual = (scaled * out.right_vec - lambda * out.right_vec).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace thermo
