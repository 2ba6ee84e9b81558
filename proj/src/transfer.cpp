#include "thermo/error.hpp"
#include "thermo/kernels.hpp"
#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool needs_grid(const IntervalMapSystem& map) {
  return std::any_of(map.branches().begin(), map.branches().end(),
                     [](const Branch& b) { return b.trend() != DerivativeTrend::Constant; });
}

double fixed_point(const Branch& br) {
  double lo = br.lo;
  double hi = br.hi;
  const double sign_lo = br.map(lo) - lo;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double g = br.map(mid) - mid;
    if ((g <= 0.0) == (sign_lo <= 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(br.map(lo) - lo) <= std::abs(br.map(hi) - hi) ? lo : hi;
}

std::size_t locate(const std::vector<double>& nodes, double y) {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), y);
  const auto i = static_cast<std::ptrdiff_t>(it - nodes.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(nodes.size()) - 2));
}

}  // namespace

struct TransferOperatorEngine::Grid {
  kernels::GridOperator op;

  [[nodiscard]] double interpolate(const std::vector<double>& h, double y) const {
    const auto c = locate(op.nodes, y);
    const double f = std::clamp((y - op.nodes[c]) / (op.nodes[c + 1] - op.nodes[c]), 0.0, 1.0);
    return h[c] * (1.0 - f) + h[c + 1] * f;
  }

  // Extremes of the piecewise-linear h over [a, b].
  [[nodiscard]] std::pair<double, double> range(const std::vector<double>& h, double a,
                                                double b) const {
    if (a > b) std::swap(a, b);
    const double ha = interpolate(h, a);
    const double hb = interpolate(h, b);
    double lo = std::min(ha, hb);
    double hi = std::max(ha, hb);
    for (auto i = locate(op.nodes, a) + 1; i < op.nodes.size() && op.nodes[i] < b; ++i) {
      lo = std::min(lo, h[i]);
      hi = std::max(hi, h[i]);
    }
    return {lo, hi};
  }
};

TransferOperatorEngine::TransferOperatorEngine(IntervalMapSystem map, TransferOptions options)
    : map_(std::move(map)), options_(options) {
  if (!map_.all_full()) throw Error(ErrorCode::NonFullBranch, "every branch must be onto [0, 1]");
  if (!map_.derivatives_monotone()) {
    throw Error(ErrorCode::NonMonotoneDerivative, "|f'| must be monotone on every branch");
  }
  if (!options_.grid_refinement || !needs_grid(map_)) return;

  grid_ = std::make_unique<Grid>();
  auto& nodes = grid_->op.nodes;
  // Geometric spacing near 0, where the neutral fixed point of the
  // intermittent family sits, then uniform spacing.
  nodes.push_back(0.0);
  for (double x = options_.smallest_node; x < 1.0;
       x += std::min(options_.relative_spacing * x, options_.max_spacing)) {
    nodes.push_back(x);
  }
  nodes.push_back(1.0);
  for (const auto& br : map_.branches()) {
    kernels::GridBranch gb;
    gb.preimage.reserve(nodes.size());
    for (double x : nodes) {
      const double p = br.inverse(x);
      const auto c = locate(nodes, p);
      gb.preimage.push_back(p);
      gb.cell.push_back(static_cast<std::uint32_t>(c));
      gb.fraction.push_back(std::clamp((p - nodes[c]) / (nodes[c + 1] - nodes[c]), 0.0, 1.0));
      gb.log_derivative.push_back(std::log(std::abs(br.derivative(p))));
    }
    grid_->op.branches.push_back(std::move(gb));
  }
}

TransferOperatorEngine::~TransferOperatorEngine() = default;
TransferOperatorEngine::TransferOperatorEngine(TransferOperatorEngine&&) noexcept = default;
TransferOperatorEngine& TransferOperatorEngine::operator=(TransferOperatorEngine&&) noexcept =
    default;

PressureEstimate TransferOperatorEngine::pressure(double t, int depth,
                                                  std::span<const double> branch_shift) const {
  if (depth < 1 || depth > kMaxTransferDepth) {
    throw Error(ErrorCode::DepthOverflow,
                "cylinder depth " + std::to_string(depth) + " outside [1, 24]");
  }
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be finite");
  std::vector<double> shift(map_.branch_count(), 0.0);
  if (!branch_shift.empty()) {
    if (branch_shift.size() != shift.size()) {
      throw Error(ErrorCode::InvalidArgument, "one shift per branch is required");
    }
    std::copy(branch_shift.begin(), branch_shift.end(), shift.begin());
  }

  // Invariant point masses give lower bounds.
  double lower = -kInf;
  for (std::size_t b = 0; b < map_.branch_count(); ++b) {
    const auto& br = map_.branch(b);
    lower = std::max(lower, shift[b] - t * std::log(std::abs(br.derivative(fixed_point(br)))));
  }
  double upper = kInf;

  if (grid_) {
    const auto& op = grid_->op;
    const std::size_t m = op.nodes.size();
    std::vector<std::vector<double>> weight(op.branches.size(), std::vector<double>(m));
    for (std::size_t b = 0; b < op.branches.size(); ++b) {
      for (std::size_t j = 0; j < m; ++j) {
        weight[b][j] = std::exp(shift[b] - t * op.branches[b].log_derivative[j]);
      }
    }
    std::vector<double> h(m, 1.0), next(m);
    for (int it = 0; it < options_.power_iterations; ++it) {
      if (options_.parallel) {
        kernels::grid_apply_parallel(op, weight, h, next);
      } else {
        kernels::grid_apply_serial(op, weight, h, next);
      }
      const double top = *std::max_element(next.begin(), next.end());
      for (std::size_t j = 0; j < m; ++j) h[j] = next[j] / top;
    }
    std::vector<double> cell_upper(m - 1), cell_lower(m - 1);
    const auto bound_cell = [&](std::size_t j) {
      double sup = 0.0;
      double inf = 0.0;
      for (std::size_t b = 0; b < op.branches.size(); ++b) {
        const auto& gb = op.branches[b];
        const auto [hlo, hhi] = grid_->range(h, gb.preimage[j], gb.preimage[j + 1]);
        sup += std::max(weight[b][j], weight[b][j + 1]) * hhi;
        inf += std::min(weight[b][j], weight[b][j + 1]) * hlo;
      }
      cell_upper[j] = sup / std::min(h[j], h[j + 1]);
      cell_lower[j] = inf / std::max(h[j], h[j + 1]);
    };
    if (options_.parallel) {
      kernels::for_each_index_parallel(m - 1, bound_cell);
    } else {
      kernels::for_each_index_serial(m - 1, bound_cell);
    }
    upper = std::log(*std::max_element(cell_upper.begin(), cell_upper.end()));
    lower = std::max(lower, std::log(*std::min_element(cell_lower.begin(), cell_lower.end())));
  }

  const auto sums = options_.parallel ? kernels::cylinder_sums_parallel(map_, t, shift, depth)
                                      : kernels::cylinder_sums_serial(map_, t, shift, depth);
  PressureEstimate est;
  for (int n = 1; n <= depth; ++n) {
    const auto d = static_cast<std::size_t>(n - 1);
    lower = std::max(lower, std::log(sums.lower[d]) / n);
    upper = std::min(upper, std::log(sums.upper[d]) / n);
    if (lower > upper) {
      // Only rounding can cross the bounds; collapse onto their midpoint.
      const double mid = 0.5 * (lower + upper);
      lower = upper = mid;
    }
    est.depth_sequence.push_back({n, 0.5 * (lower + upper), lower, upper});
  }
  est.lower = lower;
  est.upper = upper;
  est.value = 0.5 * (lower + upper);
  return est;
}

PressureEstimate transfer_operator_pressure(const IntervalMapSystem& map, double t, int depth,
                                            const TransferOptions& options) {
  return TransferOperatorEngine(map, options).pressure(t, depth);
}

}  // namespace thermo
