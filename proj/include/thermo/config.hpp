#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thermo {

enum class Command {
  Pressure,
  DualEntropy,
  Equilibrium,
  Tangency,
  ZeroTemp,
  Cocycle,
  Lyapunov,
  MpScan,
  BetaShift,
  Axioms,
};

enum class SystemKind { Sft, Beta, Mp, Doubling, Interval };

std::string_view command_name(Command c);
std::optional<Command> parse_command(std::string_view s);
std::string_view system_kind_name(SystemKind k);
std::optional<SystemKind> parse_system_kind(std::string_view s);

struct SystemConfig {
  SystemKind kind = SystemKind::Sft;
  int alphabet = 2;
  std::vector<std::vector<int>> transition;  // empty: full shift
  std::string label;
  double beta = 2.0;
  int depth = 20;      // beta-shift truncation
  double alpha = 1.0;  // intermittent map parameter
  // Affine branches as [lo, hi, slope, intercept].
  std::vector<std::vector<double>> branches;
  bool operator==(const SystemConfig&) const = default;
};

struct PotentialConfig {
  int depth = 1;
  std::vector<double> values;  // empty: zero potential
  bool operator==(const PotentialConfig&) const = default;
};

struct MeasureConfig {
  // parry | bernoulli | markov | point | gibbs | bernoulli-grid | markov-grid
  std::string kind = "gibbs";
  std::vector<double> weights;
  std::vector<std::vector<double>> stochastic;
  int symbol = 0;
  int grid = 50;
  int depth = 0;  // dual-entropy depth, 0 selects the natural depth
  bool operator==(const MeasureConfig&) const = default;
};

struct SweepConfig {
  double t_max = 50.0;
  double ratio = 1.3;
  int max_period = 12;
  bool operator==(const SweepConfig&) const = default;
};

struct CocycleConfig {
  std::vector<std::vector<std::vector<double>>> generators;
  std::vector<double> alpha;
  int n_max = 12;
  int n_steps = 2000;
  int samples = 64;
  int k = 1;
  int N = 32;
  bool operator==(const CocycleConfig&) const = default;
};

struct PressureConfig {
  int n_max = 12;
  double t = 1.0;   // interval maps: potential -t log|f'|
  int depth = 18;   // interval maps: cylinder depth
  bool operator==(const PressureConfig&) const = default;
};

struct MpConfig {
  std::vector<double> t_grid;  // empty: default scan grid
  int depth = 18;
  bool operator==(const MpConfig&) const = default;
};

struct AxiomsConfig {
  int samples = 200;
  std::string engine = "matrix";  // matrix | separated-set | transfer-operator
  bool operator==(const AxiomsConfig&) const = default;
};

struct TangencyConfig {
  int directions = 50;
  bool operator==(const TangencyConfig&) const = default;
};

struct RunConfig {
  Command command = Command::Pressure;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int max_iter = 500;
  SystemConfig system;
  PotentialConfig potential;
  MeasureConfig measure;
  SweepConfig sweep;
  CocycleConfig cocycle;
  PressureConfig pressure;
  MpConfig mp;
  AxiomsConfig axioms;
  TangencyConfig tangency;
  bool operator==(const RunConfig&) const = default;
};

struct ConfigIssue {
  std::string kind;  // ParseError or ValidationError
  int line = 0;      // 0 when the issue is not tied to a line
  std::string field;
  std::string reason;

  [[nodiscard]] std::string describe() const;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<ConfigIssue> issues;

  [[nodiscard]] bool ok() const { return config.has_value(); }
};

// Line-oriented "section.key = value" text with "#" comments. Values are
// numbers, bare words, or bracketed arrays. Reports every problem found.
ParseResult parse_config(std::string_view text);

// Canonical text; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

std::vector<ConfigIssue> validate_config(const RunConfig& config);

}  // namespace thermo
