#include "thermo/config.hpp"
#include "thermo/zerotemp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace thermo {

using nlohmann::json;

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::Pressure, "pressure"},   {Command::DualEntropy, "dual-entropy"},
    {Command::Equilibrium, "equilibrium"}, {Command::Tangency, "tangency"},
    {Command::ZeroTemp, "zero-temp"},  {Command::Cocycle, "cocycle"},
    {Command::Lyapunov, "lyapunov"},   {Command::MpScan, "mp-scan"},
    {Command::BetaShift, "beta-shift"}, {Command::Axioms, "axioms"},
};

constexpr std::pair<SystemKind, std::string_view> kSystemKinds[] = {
    {SystemKind::Sft, "sft"}, {SystemKind::Beta, "beta"}, {SystemKind::Mp, "mp"},
    {SystemKind::Doubling, "doubling"}, {SystemKind::Interval, "interval"},
};

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view s) {
  for (const auto& [cmd, name] : kCommands) {
    if (name == s) return cmd;
  }
  return std::nullopt;
}

std::string_view system_kind_name(SystemKind k) {
  for (const auto& [kind, name] : kSystemKinds) {
    if (kind == k) return name;
  }
  return "unknown";
}

std::optional<SystemKind> parse_system_kind(std::string_view s) {
  for (const auto& [kind, name] : kSystemKinds) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

std::string ConfigIssue::describe() const {
  std::ostringstream out;
  out << kind;
  if (line > 0) out << " (line " << line << ")";
  if (!field.empty()) out << " " << field;
  out << ": " << reason;
  return out.str();
}

namespace {

// ---------------------------------------------------------------------------
// Typed conversion between json values and config fields. Each reader throws
// a reason string on a type mismatch.

struct TypeMismatch {
  std::string reason;
};

template <class T>
struct Codec;

template <>
struct Codec<double> {
  static double read(const json& j) {
    if (!j.is_number()) throw TypeMismatch{"expected a number"};
    return j.get<double>();
  }
  static json write(double v) { return v; }
};

template <>
struct Codec<int> {
  static int read(const json& j) {
    if (j.is_number_integer()) {
      const auto v = j.get<std::int64_t>();
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw TypeMismatch{"integer out of range"};
      }
      return static_cast<int>(v);
    }
    if (j.is_number_float()) {
      const double d = j.get<double>();
      if (std::floor(d) == d && std::abs(d) < 2e9) return static_cast<int>(d);
    }
    throw TypeMismatch{"expected an integer"};
  }
  static json write(int v) { return v; }
};

template <>
struct Codec<std::uint64_t> {
  static std::uint64_t read(const json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw TypeMismatch{"expected a nonnegative integer"};
  }
  static json write(std::uint64_t v) { return v; }
};

template <>
struct Codec<std::string> {
  static std::string read(const json& j) {
    if (!j.is_string()) throw TypeMismatch{"expected a word"};
    return j.get<std::string>();
  }
  static json write(const std::string& v) { return v; }
};

template <class T>
struct Codec<std::vector<T>> {
  static std::vector<T> read(const json& j) {
    if (!j.is_array()) throw TypeMismatch{"expected a bracketed list"};
    std::vector<T> out;
    for (const auto& e : j) out.push_back(Codec<T>::read(e));
    return out;
  }
  static json write(const std::vector<T>& v) {
    json out = json::array();
    for (const auto& e : v) out.push_back(Codec<T>::write(e));
    return out;
  }
};

template <>
struct Codec<Command> {
  static Command read(const json& j) {
    const auto c = j.is_string() ? parse_command(j.get<std::string>()) : std::nullopt;
    if (!c) {
      throw TypeMismatch{
          "expected one of pressure, dual-entropy, equilibrium, tangency, zero-temp, cocycle, "
          "lyapunov, mp-scan, beta-shift, axioms"};
    }
    return *c;
  }
  static json write(Command c) { return std::string(command_name(c)); }
};

template <>
struct Codec<SystemKind> {
  static SystemKind read(const json& j) {
    const auto k = j.is_string() ? parse_system_kind(j.get<std::string>()) : std::nullopt;
    if (!k) throw TypeMismatch{"expected one of sft, beta, mp, doubling, interval"};
    return *k;
  }
  static json write(SystemKind k) { return std::string(system_kind_name(k)); }
};

struct Field {
  std::string key;
  std::function<void(RunConfig&, const json&)> read;
  std::function<json(const RunConfig&)> write;
};

template <class Access>
Field field(std::string key, Access access) {
  using T = std::remove_cvref_t<decltype(access(std::declval<RunConfig&>()))>;
  return Field{std::move(key),
               [access](RunConfig& c, const json& j) { access(c) = Codec<T>::read(j); },
               [access](const RunConfig& c) {
                 return Codec<T>::write(access(const_cast<RunConfig&>(c)));
               }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("run.command", [](RunConfig& c) -> auto& { return c.command; }),
      field("run.seed", [](RunConfig& c) -> auto& { return c.seed; }),
      field("run.tol", [](RunConfig& c) -> auto& { return c.tol; }),
      field("run.max_iter", [](RunConfig& c) -> auto& { return c.max_iter; }),
      field("system.kind", [](RunConfig& c) -> auto& { return c.system.kind; }),
      field("system.alphabet", [](RunConfig& c) -> auto& { return c.system.alphabet; }),
      field("system.transition", [](RunConfig& c) -> auto& { return c.system.transition; }),
      field("system.label", [](RunConfig& c) -> auto& { return c.system.label; }),
      field("system.beta", [](RunConfig& c) -> auto& { return c.system.beta; }),
      field("system.depth", [](RunConfig& c) -> auto& { return c.system.depth; }),
      field("system.alpha", [](RunConfig& c) -> auto& { return c.system.alpha; }),
      field("system.branches", [](RunConfig& c) -> auto& { return c.system.branches; }),
      field("potential.depth", [](RunConfig& c) -> auto& { return c.potential.depth; }),
      field("potential.values", [](RunConfig& c) -> auto& { return c.potential.values; }),
      field("measure.kind", [](RunConfig& c) -> auto& { return c.measure.kind; }),
      field("measure.weights", [](RunConfig& c) -> auto& { return c.measure.weights; }),
      field("measure.stochastic", [](RunConfig& c) -> auto& { return c.measure.stochastic; }),
      field("measure.symbol", [](RunConfig& c) -> auto& { return c.measure.symbol; }),
      field("measure.grid", [](RunConfig& c) -> auto& { return c.measure.grid; }),
      field("measure.depth", [](RunConfig& c) -> auto& { return c.measure.depth; }),
      field("sweep.t_max", [](RunConfig& c) -> auto& { return c.sweep.t_max; }),
      field("sweep.ratio", [](RunConfig& c) -> auto& { return c.sweep.ratio; }),
      field("sweep.max_period", [](RunConfig& c) -> auto& { return c.sweep.max_period; }),
      field("cocycle.generators", [](RunConfig& c) -> auto& { return c.cocycle.generators; }),
      field("cocycle.alpha", [](RunConfig& c) -> auto& { return c.cocycle.alpha; }),
      field("cocycle.n_max", [](RunConfig& c) -> auto& { return c.cocycle.n_max; }),
      field("cocycle.n_steps", [](RunConfig& c) -> auto& { return c.cocycle.n_steps; }),
      field("cocycle.samples", [](RunConfig& c) -> auto& { return c.cocycle.samples; }),
      field("cocycle.k", [](RunConfig& c) -> auto& { return c.cocycle.k; }),
      field("cocycle.N", [](RunConfig& c) -> auto& { return c.cocycle.N; }),
      field("pressure.n_max", [](RunConfig& c) -> auto& { return c.pressure.n_max; }),
      field("pressure.t", [](RunConfig& c) -> auto& { return c.pressure.t; }),
      field("pressure.depth", [](RunConfig& c) -> auto& { return c.pressure.depth; }),
      field("mp.t_grid", [](RunConfig& c) -> auto& { return c.mp.t_grid; }),
      field("mp.depth", [](RunConfig& c) -> auto& { return c.mp.depth; }),
      field("axioms.samples", [](RunConfig& c) -> auto& { return c.axioms.samples; }),
      field("axioms.engine", [](RunConfig& c) -> auto& { return c.axioms.engine; }),
      field("tangency.directions", [](RunConfig& c) -> auto& { return c.tangency.directions; }),
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_bare_word(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.' ||
           ch == '+';
  });
}

std::optional<json> parse_value(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    if (is_bare_word(text)) return json(std::string(text));
    return std::nullopt;
  }
}

std::string dump_value(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    // A bare word must not be mistaken for a number or keyword on re-parse.
    if (is_bare_word(s) && !json::accept(s)) return s;
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Validation helpers

struct Validator {
  std::vector<ConfigIssue>& issues;

  void fail(const std::string& field, const std::string& reason) {
    issues.push_back({"ValidationError", 0, field, reason});
  }
  void positive(const std::string& field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive");
  }
  void range(const std::string& field, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi)) {
      std::ostringstream r;
      r << "must lie in [" << lo << ", " << hi << "]";
      fail(field, r.str());
    }
  }
  void one_of(const std::string& field, const std::string& v, std::initializer_list<std::string_view> options) {
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      std::string r = "must be one of";
      for (auto o : options) r += " " + std::string(o);
      fail(field, r);
    }
  }
};

}  // namespace

ParseResult parse_config(std::string_view text) {
  ParseResult result;
  RunConfig config;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      result.issues.push_back({"ParseError", line_no, "", "expected 'section.key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value_text = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f) {
      result.issues.push_back({"ParseError", line_no, key, "unknown key"});
      continue;
    }
    if (!seen.insert(key).second) {
      result.issues.push_back({"ParseError", line_no, key, "key given twice"});
      continue;
    }
    const auto value = parse_value(value_text);
    if (!value) {
      result.issues.push_back({"ParseError", line_no, key, "malformed value '" + std::string(value_text) + "'"});
      continue;
    }
    try {
      f->read(config, *value);
    } catch (const TypeMismatch& e) {
      result.issues.push_back({"ValidationError", line_no, key, e.reason});
    }
  }
  if (!seen.count("run.command")) {
    result.issues.push_back({"ValidationError", 0, "run.command", "is required"});
  }
  if (result.issues.empty()) {
    auto more = validate_config(config);
    result.issues.insert(result.issues.end(), more.begin(), more.end());
  }
  if (result.issues.empty()) result.config = std::move(config);
  return result;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += dump_value(f.write(config));
    out += '\n';
  }
  return out;
}

std::vector<ConfigIssue> validate_config(const RunConfig& c) {
  std::vector<ConfigIssue> issues;
  Validator v{issues};
  v.positive("run.tol", c.tol);
  if (c.max_iter < 1) v.fail("run.max_iter", "must be at least 1");

  const auto& s = c.system;
  v.range("system.alphabet", s.alphabet, 1, 64);
  if (!s.transition.empty()) {
    bool square = static_cast<int>(s.transition.size()) == s.alphabet;
    bool binary = true;
    for (const auto& row : s.transition) {
      square = square && static_cast<int>(row.size()) == s.alphabet;
      for (int x : row) binary = binary && (x == 0 || x == 1);
    }
    if (!square) v.fail("system.transition", "must be alphabet x alphabet");
    if (!binary) v.fail("system.transition", "entries must be 0 or 1");
  }
  if (!(s.beta > 1.0 && s.beta <= 10.0)) v.fail("system.beta", "must lie in (1, 10]");
  v.range("system.depth", s.depth, 1, 64);
  v.positive("system.alpha", s.alpha);
  for (const auto& b : s.branches) {
    if (b.size() != 4) {
      v.fail("system.branches", "each branch is [lo, hi, slope, intercept]");
      break;
    }
  }
  if (s.kind == SystemKind::Interval && s.branches.empty()) {
    v.fail("system.branches", "an interval system needs branches");
  }

  if (c.potential.depth < 1) v.fail("potential.depth", "must be at least 1");
  for (double x : c.potential.values) {
    if (!std::isfinite(x)) v.fail("potential.values", "must be finite");
  }

  const auto& m = c.measure;
  v.one_of("measure.kind", m.kind,
           {"parry", "bernoulli", "markov", "point", "gibbs", "bernoulli-grid", "markov-grid"});
  if (m.grid < 1) v.fail("measure.grid", "must be at least 1");
  if (m.depth < 0) v.fail("measure.depth", "must be nonnegative");
  if (m.kind == "bernoulli" && m.weights.empty()) v.fail("measure.weights", "required for bernoulli");
  if (m.kind == "markov" && m.stochastic.empty()) v.fail("measure.stochastic", "required for markov");

  v.positive("sweep.t_max", c.sweep.t_max);
  if (c.sweep.t_max > kMaxTemperature) v.range("sweep.t_max", c.sweep.t_max, 0.0, kMaxTemperature);
  if (!(c.sweep.ratio > 1.0)) v.fail("sweep.ratio", "must exceed 1");
  v.range("sweep.max_period", c.sweep.max_period, 1, 24);

  const auto& cc = c.cocycle;
  for (std::size_t i = 1; i < cc.alpha.size(); ++i) {
    if (cc.alpha[i] > cc.alpha[i - 1]) {
      v.fail("alpha", "must be nonincreasing");
      break;
    }
  }
  v.range("cocycle.n_max", cc.n_max, 1, 24);
  if (cc.n_steps < 1000) v.fail("cocycle.n_steps", "must be at least 1000");
  if (cc.samples < 1) v.fail("cocycle.samples", "must be at least 1");
  v.range("cocycle.N", cc.N, 1, 64);
  if (cc.k < 1) v.fail("cocycle.k", "must be at least 1");
  const bool needs_cocycle = c.command == Command::Cocycle || c.command == Command::Lyapunov;
  if (needs_cocycle && cc.generators.empty()) v.fail("cocycle.generators", "required for this command");
  if (c.command == Command::Cocycle && cc.alpha.empty()) v.fail("cocycle.alpha", "required for this command");
  if (!cc.generators.empty()) {
    const auto l = cc.generators.front().size();
    for (const auto& g : cc.generators) {
      bool square = g.size() == l && l > 0;
      for (const auto& row : g) square = square && row.size() == l;
      if (!square) {
        v.fail("cocycle.generators", "generators must be square of one common size");
        break;
      }
    }
    if (!cc.alpha.empty() && cc.alpha.size() != l) v.fail("cocycle.alpha", "length must equal the dimension");
    if (cc.k > static_cast<int>(l)) v.fail("cocycle.k", "must not exceed the dimension");
  }

  v.range("pressure.n_max", c.pressure.n_max, 1, 30);
  v.range("pressure.depth", c.pressure.depth, 1, 24);
  if (!std::isfinite(c.pressure.t)) v.fail("pressure.t", "must be finite");
  v.range("mp.depth", c.mp.depth, 1, 24);
  for (std::size_t i = 0; i < c.mp.t_grid.size(); ++i) {
    if (!(c.mp.t_grid[i] >= -2.0 && c.mp.t_grid[i] <= 4.0)) {
      v.fail("mp.t_grid", "values must lie in [-2, 4]");
      break;
    }
    if (i > 0 && !(c.mp.t_grid[i] > c.mp.t_grid[i - 1])) {
      v.fail("mp.t_grid", "must be increasing");
      break;
    }
  }
  if (c.axioms.samples < 1) v.fail("axioms.samples", "must be at least 1");
  v.one_of("axioms.engine", c.axioms.engine, {"matrix", "separated-set", "transfer-operator"});
  if (c.tangency.directions < 0) v.fail("tangency.directions", "must be nonnegative");
  return issues;
}

}  // namespace thermo
