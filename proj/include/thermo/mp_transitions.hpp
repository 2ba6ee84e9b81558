#pragma once

#include "thermo/pressure.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace thermo {

struct MpBracket {
  double lower = 0.0;
  double upper = 0.0;
  int depth = 0;

  [[nodiscard]] double midpoint() const { return 0.5 * (lower + upper); }
  [[nodiscard]] double width() const { return upper - lower; }
};

inline constexpr double kMinScanT = -2.0;
inline constexpr double kMaxScanT = 4.0;

// Pressure of -t log|f'| for the intermittent map with parameter alpha.
// Holds the transfer-operator grid so repeated calls reuse it.
class MannevillePomeauScanner {
 public:
  explicit MannevillePomeauScanner(double alpha, TransferOptions options = {});

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  // t in [-2, 4], depth in [1, 24] (DepthOverflow beyond).
  [[nodiscard]] MpBracket bracket(double t, int depth) const;

 private:
  double alpha_;
  TransferOperatorEngine engine_;
};

MpBracket mp_pressure_bracket(double alpha, double t, int depth);

enum class Verdict { Kink, Smooth, Inconclusive };

std::string verdict_name(Verdict v);

struct KinkVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double left_slope = 0.0;   // NaN at the first grid point
  double right_slope = 0.0;  // NaN at the last grid point
  double gap = 0.0;          // |right_slope - left_slope|
  double noise = 0.0;        // slope uncertainty from bracket widths
  double allowance = 0.0;    // slope change explained by curvature
  double margin = 0.0;       // gap - 1.5 allowance - 3 noise; kink when positive
};

// One verdict per grid point. A jump in slope counts as a kink only when it
// exceeds three times the bracket noise after removing the change that the
// curvature on either side accounts for.
std::vector<KinkVerdict> kink_detector(const std::vector<double>& t, const std::vector<double>& lower,
                                       const std::vector<double>& upper);

struct PhaseRow {
  double t = 0.0;
  MpBracket bracket;
  KinkVerdict verdict;
};

struct PhaseScan {
  double alpha = 0.0;
  std::vector<PhaseRow> rows;

  [[nodiscard]] const PhaseRow* row_at(double t, double tolerance = 1e-9) const;
  void write_csv(std::ostream& out) const;  // t,lower,upper,midpoint,left_slope,right_slope,verdict
};

std::vector<double> default_scan_grid();

PhaseScan phase_scan(const MannevillePomeauScanner& scanner, const std::vector<double>& t_grid,
                     int depth);
PhaseScan phase_scan(double alpha, const std::vector<double>& t_grid, int depth);

}  // namespace thermo
