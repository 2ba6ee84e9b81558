#include "thermo/mp_transitions.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

MannevillePomeauScanner::MannevillePomeauScanner(double alpha, TransferOptions options)
    : alpha_(alpha), engine_(build_manneville_pomeau(alpha), options) {}

MpBracket MannevillePomeauScanner::bracket(double t, int depth) const {
  if (!(t >= kMinScanT && t <= kMaxScanT)) {
    throw Error(ErrorCode::InvalidArgument, "t = " + format_real(t) + " outside [-2, 4]");
  }
  const auto est = engine_.pressure(t, depth);
  return {est.lower, est.upper, depth};
}

MpBracket mp_pressure_bracket(double alpha, double t, int depth) {
  return MannevillePomeauScanner(alpha).bracket(t, depth);
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Kink: return "kink";
    case Verdict::Smooth: return "smooth";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<KinkVerdict> kink_detector(const std::vector<double>& t, const std::vector<double>& lower,
                                       const std::vector<double>& upper) {
  const std::size_t n = t.size();
  if (lower.size() != n || upper.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "grid and brackets differ in length");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t[i] > t[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid must be increasing");
  }
  const auto mid = [&](std::size_t i) { return 0.5 * (lower[i] + upper[i]); };
  const auto width = [&](std::size_t i) { return upper[i] - lower[i]; };
  // Secant slope over [t_a, t_b] and its worst-case error from the brackets.
  const auto slope = [&](std::size_t a, std::size_t b) { return (mid(b) - mid(a)) / (t[b] - t[a]); };
  const auto slope_noise = [&](std::size_t a, std::size_t b) {
    return (width(a) + width(b)) / (2.0 * (t[b] - t[a]));
  };

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<KinkVerdict> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = out[i];
    v.left_slope = i > 0 ? slope(i - 1, i) : kNaN;
    v.right_slope = i + 1 < n ? slope(i, i + 1) : kNaN;
    if (i == 0 || i + 1 == n) {
      v.verdict = Verdict::Inconclusive;
      continue;
    }
    const double h_left = t[i] - t[i - 1];
    const double h_right = t[i + 1] - t[i];
    v.gap = std::abs(v.right_slope - v.left_slope);
    v.noise = slope_noise(i - 1, i) + slope_noise(i, i + 1);

    const bool full_stencil = i >= 2 && i + 2 < n;
    if (full_stencil) {
      const double c_left = std::abs(v.left_slope - slope(i - 2, i - 1)) / (0.5 * (t[i] - t[i - 2]));
      const double c_right = std::abs(slope(i + 1, i + 2) - v.right_slope) / (0.5 * (t[i + 2] - t[i]));
      const double c_left_noise =
          (slope_noise(i - 1, i) + slope_noise(i - 2, i - 1)) / (0.5 * (t[i] - t[i - 2]));
      const double c_right_noise =
          (slope_noise(i, i + 1) + slope_noise(i + 1, i + 2)) / (0.5 * (t[i + 2] - t[i]));
      v.allowance = 0.5 * (h_left * c_left + h_right * c_right);
      v.noise += 0.5 * (h_left * c_left_noise + h_right * c_right_noise);
    }
    v.margin = v.gap - 1.5 * v.allowance - 3.0 * v.noise - 1e-9;
    if (full_stencil && v.margin > 0.0) {
      v.verdict = Verdict::Kink;
    } else if (!full_stencil || v.noise > v.gap) {
      v.verdict = Verdict::Inconclusive;
    } else {
      v.verdict = Verdict::Smooth;
    }
  }
  return out;
}

const PhaseRow* PhaseScan::row_at(double t, double tolerance) const {
  for (const auto& r : rows) {
    if (std::abs(r.t - t) <= tolerance) return &r;
  }
  return nullptr;
}

void PhaseScan::write_csv(std::ostream& out) const {
  out << "t,lower,upper,midpoint,left_slope,right_slope,verdict\n";
  const auto opt = [](double x) { return std::isnan(x) ? std::string() : format_real(x); };
  for (const auto& r : rows) {
    out << format_real(r.t) << ',' << format_real(r.bracket.lower) << ','
        << format_real(r.bracket.upper) << ',' << format_real(r.bracket.midpoint()) << ','
        << opt(r.verdict.left_slope) << ',' << opt(r.verdict.right_slope) << ','
        << verdict_name(r.verdict.verdict) << '\n';
  }
}

std::vector<double> default_scan_grid() {
  return {0.5, 0.6, 0.7, 0.8, 0.9, 0.94, 0.96, 0.98, 1.0,
          1.02, 1.04, 1.06, 1.1, 1.2, 1.3, 1.4, 1.5};
}

PhaseScan phase_scan(const MannevillePomeauScanner& scanner, const std::vector<double>& t_grid,
                     int depth) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty t grid");
  PhaseScan scan;
  scan.alpha = scanner.alpha();
  std::vector<double> lower, upper;
  for (double t : t_grid) {
    const auto b = scanner.bracket(t, depth);
    scan.rows.push_back({t, b, {}});
    lower.push_back(b.lower);
    upper.push_back(b.upper);
  }
  const auto verdicts = kink_detector(t_grid, lower, upper);
  for (std::size_t i = 0; i < verdicts.size(); ++i) scan.rows[i].verdict = verdicts[i];
  return scan;
}

PhaseScan phase_scan(double alpha, const std::vector<double>& t_grid, int depth) {
  return phase_scan(MannevillePomeauScanner(alpha), t_grid, depth);
}

}  // namespace thermo
