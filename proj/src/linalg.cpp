#include "thermo/linalg.hpp"

#include "thermo/error.hpp"

#include <algorithm>
#include <cmath>

namespace thermo {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd u = m;
  const auto n = u.cols();
  constexpr double kEps = 1e-15;
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double a = u.col(i).squaredNorm();
        const double b = u.col(j).squaredNorm();
        const double g = u.col(i).dot(u.col(j));
        if (std::abs(g) <= kEps * std::sqrt(a * b) || g == 0.0) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd ci = u.col(i);
        u.col(i) = c * ci - s * u.col(j);
        u.col(j) = s * ci + c * u.col(j);
      }
    }
    if (!rotated) break;
  }
  Eigen::VectorXd sv(n);
  for (Eigen::Index i = 0; i < n; ++i) sv(i) = u.col(i).norm();
  std::sort(sv.data(), sv.data() + n, std::greater<>());
  return sv;
}

double top_singular_value(const Eigen::MatrixXd& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return singular_values(m)(0);
}

std::vector<std::vector<int>> index_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  if (k == 0 || k > n) return out;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Eigen::MatrixXd compound_matrix(const Eigen::MatrixXd& m, int k) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidArgument, "compound of a non-square matrix");
  const int n = static_cast<int>(m.rows());
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "compound order out of range");
  const auto subsets = index_subsets(n, k);
  const auto c = static_cast<Eigen::Index>(subsets.size());
  Eigen::MatrixXd out(c, c);
  Eigen::MatrixXd minor(k, k);
  for (Eigen::Index r = 0; r < c; ++r) {
    for (Eigen::Index s = 0; s < c; ++s) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          minor(i, j) = m(subsets[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)],
                          subsets[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)]);
        }
      }
      out(r, s) = minor.determinant();
    }
  }
  return out;
}

StabilizedProduct StabilizedProduct::identity(Eigen::Index n) {
  return {Eigen::MatrixXd::Identity(n, n), 0.0};
}

void StabilizedProduct::left_multiply(const Eigen::MatrixXd& factor) {
  scaled = factor * scaled;
  const double peak = scaled.cwiseAbs().maxCoeff();
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw Error(ErrorCode::SingularProduct, "matrix product vanished or overflowed");
  }
  scaled /= peak;
  log_scale += std::log(peak);
}

double StabilizedProduct::log_norm() const {
  return std::log(top_singular_value(scaled)) + log_scale;
}

}  // namespace thermo
