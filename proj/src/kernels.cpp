#include "thermo/kernels.hpp"

#include "thermo/error.hpp"
#include "thermo/linalg.hpp"

#include <exception>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Separated-set sums

struct SupSumWalk {
  const LocallyConstantPotential& phi;
  const SftSystem& sys;
  int n;
  int k;
  double shift;
  Word w;

  [[nodiscard]] double window(int end) const {
    const auto start = static_cast<std::size_t>(end - k + 1);
    return phi.value(phi.index()->at(std::span<const Symbol>(w).subspan(start, static_cast<std::size_t>(k))));
  }

  double best_extension(int len, double partial) {
    if (len == n + k - 1) return partial;
    double best = kNegInf;
    for (Symbol s : sys.successors(w[static_cast<std::size_t>(len - 1)])) {
      w[static_cast<std::size_t>(len)] = s;
      const double add = len + 1 >= k ? window(len) : 0.0;
      best = std::max(best, best_extension(len + 1, partial + add));
    }
    return best;
  }

  void accumulate(int len, double partial, double& total) {
    if (len == n) {
      total += std::exp(best_extension(len, partial) - shift);
      return;
    }
    for (Symbol s : sys.successors(w[static_cast<std::size_t>(len - 1)])) {
      w[static_cast<std::size_t>(len)] = s;
      const double add = len + 1 >= k ? window(len) : 0.0;
      accumulate(len + 1, partial + add, total);
    }
  }

  void from_first_symbol(Symbol s, double& total) {
    w[0] = s;
    accumulate(1, k == 1 ? window(0) : 0.0, total);
  }
};

SupSumWalk make_walk(const LocallyConstantPotential& phi, int n) {
  const int k = phi.depth();
  return SupSumWalk{phi, *phi.system(), n, k, n * phi.max_value(),
                    Word(static_cast<std::size_t>(n + k - 1))};
}

void check_sum_cap(const LocallyConstantPotential& phi, int n_max) {
  check_word_cap(*phi.system(), n_max + phi.depth() - 1, kDefaultWordCap);
}

// ---------------------------------------------------------------------------
// Cocycle sums

struct CocycleWalk {
  const SftSystem& sys;
  const CocycleWeights& c;
  const MarkovMeasure* mu;
  int n_max;
  std::vector<int> orders;            // exterior orders k < l with nonzero weight
  std::vector<double> order_weight;   // alpha_k - alpha_{k+1}
  std::vector<std::vector<Eigen::MatrixXd>> compounds;  // [order slot][symbol]
  std::vector<double> log_abs_det;    // per symbol
  std::vector<double> level_shift;    // per depth, upper bound of phi on that level

  // per depth scratch
  std::vector<std::vector<StabilizedProduct>> stack;
  std::vector<double> det_stack;
  std::vector<double> weight_stack;
  Word w;

  std::vector<double> sums;      // scaled partition sums per depth
  std::vector<double> integrals;

  double value_at(int depth) const {
    const auto d = static_cast<std::size_t>(depth);
    double v = c.alpha.back() * det_stack[d];
    for (std::size_t o = 0; o < orders.size(); ++o) v += order_weight[o] * stack[d][o].log_norm();
    return v;
  }

  void push(int depth, Symbol s) {
    const auto d = static_cast<std::size_t>(depth);
    w[d] = s;
    for (std::size_t o = 0; o < orders.size(); ++o) {
      if (depth == 0) {
        stack[0][o] = StabilizedProduct::identity(compounds[o][0].rows());
      } else {
        stack[d][o] = stack[d - 1][o];
      }
      stack[d][o].left_multiply(compounds[o][static_cast<std::size_t>(s)]);
    }
    det_stack[d] = (depth == 0 ? 0.0 : det_stack[d - 1]) + log_abs_det[static_cast<std::size_t>(s)];
    if (mu) {
      weight_stack[d] = depth == 0 ? mu->stationary()(s)
                                   : weight_stack[d - 1] * mu->stochastic()(w[d - 1], s);
    }
    const double phi = value_at(depth);
    sums[d] += std::exp(phi - level_shift[d]);
    if (mu) integrals[d] += weight_stack[d] * phi;
  }

  void descend(int depth) {
    if (depth + 1 >= n_max) return;
    for (Symbol s : sys.successors(w[static_cast<std::size_t>(depth)])) {
      push(depth + 1, s);
      descend(depth + 1);
    }
  }

  void from_first_symbol(Symbol s) {
    push(0, s);
    descend(0);
  }
};

CocycleWalk make_cocycle_walk(const SftSystem& sys, const CocycleWeights& c, int n_max,
                              const MarkovMeasure* mu) {
  const auto l = static_cast<int>(c.alpha.size());
  if (static_cast<int>(c.generators.size()) != sys.alphabet_size()) {
    throw Error(ErrorCode::InvalidArgument, "one generator per symbol is required");
  }
  CocycleWalk walk{sys, c, mu, n_max, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  for (int k = 1; k < l; ++k) {
    const double wk = c.alpha[static_cast<std::size_t>(k - 1)] - c.alpha[static_cast<std::size_t>(k)];
    if (wk == 0.0) continue;
    walk.orders.push_back(k);
    walk.order_weight.push_back(wk);
    std::vector<Eigen::MatrixXd> per_symbol;
    for (const auto& g : c.generators) per_symbol.push_back(k == 1 ? g : compound_matrix(g, k));
    walk.compounds.push_back(std::move(per_symbol));
  }
  double best_single = kNegInf;
  for (const auto& g : c.generators) {
    walk.log_abs_det.push_back(std::log(std::abs(g.determinant())));
  }
  for (std::size_t s = 0; s < c.generators.size(); ++s) {
    const Word single{static_cast<Symbol>(s)};
    best_single = std::max(best_single, singular_value_log(c, single));
  }
  const auto depth_count = static_cast<std::size_t>(n_max);
  walk.level_shift.resize(depth_count);
  for (std::size_t d = 0; d < depth_count; ++d) walk.level_shift[d] = static_cast<double>(d + 1) * best_single;
  walk.stack.assign(depth_count, std::vector<StabilizedProduct>(walk.orders.size()));
  walk.det_stack.assign(depth_count, 0.0);
  walk.weight_stack.assign(depth_count, 0.0);
  walk.w.assign(depth_count, 0);
  walk.sums.assign(depth_count, 0.0);
  walk.integrals.assign(depth_count, 0.0);
  return walk;
}

std::vector<CocycleLevel> finish_levels(const std::vector<double>& shift,
                                        const std::vector<double>& sums,
                                        const std::vector<double>& integrals) {
  std::vector<CocycleLevel> out(sums.size());
  for (std::size_t d = 0; d < sums.size(); ++d) {
    out[d].log_partition = std::log(sums[d]) + shift[d];
    out[d].measure_integral = integrals[d];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cycles

bool rotation_minimal_primitive(std::span<const Symbol> w) {
  const auto p = w.size();
  for (std::size_t r = 1; r < p; ++r) {
    // compare rotation starting at r with w
    for (std::size_t i = 0; i < p; ++i) {
      const Symbol a = w[(r + i) % p];
      const Symbol b = w[i];
      if (a < b) return false;
      if (a > b) break;
      if (i + 1 == p) return false;  // equal rotation: not primitive
    }
  }
  return true;
}

struct CycleWalk {
  const LocallyConstantPotential& phi;
  const SftSystem& sys;
  int period;
  double tie;
  Word w;
  Word wrapped;
  CycleMaximum result{kNegInf, {}};

  double cyclic_average() {
    const auto p = static_cast<std::size_t>(period);
    const auto k = static_cast<std::size_t>(phi.depth());
    wrapped.resize(p + k - 1);
    for (std::size_t i = 0; i < p + k - 1; ++i) wrapped[i] = w[i % p];
    double sum = 0.0;
    for (std::size_t i = 0; i < p; ++i) sum += phi(std::span<const Symbol>(wrapped).subspan(i, k));
    return sum / static_cast<double>(p);
  }

  void offer(double avg) {
    if (avg > result.best_average + tie) {
      result.best_average = avg;
      result.witnesses.assign(1, w);
    } else if (avg >= result.best_average - tie) {
      result.witnesses.push_back(w);
      result.best_average = std::max(result.best_average, avg);
    }
  }

  void descend(int len) {
    if (len == period) {
      if (sys.allowed(w.back(), w.front()) && rotation_minimal_primitive(w)) offer(cyclic_average());
      return;
    }
    for (Symbol s : sys.successors(w[static_cast<std::size_t>(len - 1)])) {
      if (s < w[0]) continue;  // a rotation-minimal word starts with its smallest symbol
      w[static_cast<std::size_t>(len)] = s;
      descend(len + 1);
    }
  }

  void from_first_symbol(Symbol s) {
    w.assign(static_cast<std::size_t>(period), 0);
    w[0] = s;
    descend(1);
  }
};

double cyclic_average_of(const LocallyConstantPotential& phi, const Word& w) {
  CycleWalk probe{phi, *phi.system(), static_cast<int>(w.size()), 0.0, w, {}, {kNegInf, {}}};
  return probe.cyclic_average();
}

// Witnesses in the parts were kept against partial maxima; only true ties survive.
CycleMaximum merge_cycles(const LocallyConstantPotential& phi, std::vector<CycleMaximum> parts,
                          double tie) {
  CycleMaximum out{kNegInf, {}};
  for (const auto& part : parts) out.best_average = std::max(out.best_average, part.best_average);
  for (auto& part : parts) {
    for (auto& w : part.witnesses) {
      if (cyclic_average_of(phi, w) >= out.best_average - tie) out.witnesses.push_back(std::move(w));
    }
  }
  std::sort(out.witnesses.begin(), out.witnesses.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Cylinder tree

struct CylinderNode {
  double a;
  double b;
  double log_min;
  double log_max;
};

struct CylinderWalk {
  const IntervalMapSystem& map;
  double t;
  std::span<const double> shift;
  int depth;
  std::vector<double> lower;
  std::vector<double> upper;

  template <class Visit>
  void children(const CylinderNode& node, Visit&& visit) const {
    for (std::size_t bi = 0; bi < map.branch_count(); ++bi) {
      const Branch& br = map.branch(bi);
      double ga = br.inverse(node.a);
      double gb = br.inverse(node.b);
      if (ga > gb) std::swap(ga, gb);
      const double ta = shift[bi] - t * std::log(std::abs(br.derivative(ga)));
      const double tb = shift[bi] - t * std::log(std::abs(br.derivative(gb)));
      visit(CylinderNode{ga, gb, node.log_min + std::min(ta, tb), node.log_max + std::max(ta, tb)});
    }
  }

  void descend(const CylinderNode& node, int level) {
    children(node, [&](const CylinderNode& child) {
      lower[static_cast<std::size_t>(level)] += std::exp(child.log_min);
      upper[static_cast<std::size_t>(level)] += std::exp(child.log_max);
      if (level + 1 < depth) descend(child, level + 1);
    });
  }
};

void check_cylinder_inputs(const IntervalMapSystem& map, std::span<const double> shift, int depth) {
  if (shift.size() != map.branch_count()) {
    throw Error(ErrorCode::InvalidArgument, "one weight shift per branch is required");
  }
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "cylinder depth must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> log_sup_word_sums_serial(const LocallyConstantPotential& phi, int n_max) {
  check_sum_cap(phi, n_max);
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) {
    auto walk = make_walk(phi, n);
    double total = 0.0;
    for (Symbol s = 0; s < walk.sys.alphabet_size(); ++s) walk.from_first_symbol(s, total);
    out.push_back(std::log(total) + walk.shift);
  }
  return out;
}

std::vector<double> log_sup_word_sums_parallel(const LocallyConstantPotential& phi, int n_max) {
  check_sum_cap(phi, n_max);
  const int m = phi.system()->alphabet_size();
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> partial(static_cast<std::size_t>(m), 0.0);
    const double shift = n * phi.max_value();
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < m; ++s) {
      auto walk = make_walk(phi, n);
      walk.from_first_symbol(s, partial[static_cast<std::size_t>(s)]);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    out.push_back(std::log(total) + shift);
  }
  return out;
}

double singular_value_log(const CocycleWeights& c, std::span<const Symbol> w) {
  const auto l = static_cast<int>(c.alpha.size());
  double value = 0.0;
  double log_det = 0.0;
  for (Symbol s : w) log_det += std::log(std::abs(c.generators[static_cast<std::size_t>(s)].determinant()));
  value += c.alpha.back() * log_det;
  for (int k = 1; k < l; ++k) {
    const double wk = c.alpha[static_cast<std::size_t>(k - 1)] - c.alpha[static_cast<std::size_t>(k)];
    if (wk == 0.0) continue;
    auto prod = StabilizedProduct::identity(k == 1 ? l : compound_matrix(c.generators[0], k).rows());
    for (Symbol s : w) {
      const auto& g = c.generators[static_cast<std::size_t>(s)];
      prod.left_multiply(k == 1 ? g : compound_matrix(g, k));
    }
    value += wk * prod.log_norm();
  }
  return value;
}

std::vector<CocycleLevel> cocycle_word_sums_serial(const SftSystem& sys, const CocycleWeights& c,
                                                   int n_max, const MarkovMeasure* mu) {
  check_word_cap(sys, n_max, kDefaultWordCap);
  auto walk = make_cocycle_walk(sys, c, n_max, mu);
  for (Symbol s = 0; s < sys.alphabet_size(); ++s) walk.from_first_symbol(s);
  return finish_levels(walk.level_shift, walk.sums, walk.integrals);
}

std::vector<CocycleLevel> cocycle_word_sums_parallel(const SftSystem& sys, const CocycleWeights& c,
                                                     int n_max, const MarkovMeasure* mu) {
  check_word_cap(sys, n_max, kDefaultWordCap);
  const int m = sys.alphabet_size();
  const auto prototype = make_cocycle_walk(sys, c, n_max, mu);
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> integrals(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < m; ++s) {
    auto walk = prototype;
    walk.from_first_symbol(s);
    sums[static_cast<std::size_t>(s)] = std::move(walk.sums);
    integrals[static_cast<std::size_t>(s)] = std::move(walk.integrals);
  }
  std::vector<double> total_sums(static_cast<std::size_t>(n_max), 0.0);
  std::vector<double> total_integrals(static_cast<std::size_t>(n_max), 0.0);
  for (std::size_t s = 0; s < sums.size(); ++s) {
    for (std::size_t d = 0; d < total_sums.size(); ++d) {
      total_sums[d] += sums[s][d];
      total_integrals[d] += integrals[s][d];
    }
  }
  return finish_levels(prototype.level_shift, total_sums, total_integrals);
}

CycleMaximum best_cycle_average_serial(const LocallyConstantPotential& phi, int max_period,
                                       double tie_tolerance) {
  std::vector<CycleMaximum> parts;
  for (int p = 1; p <= max_period; ++p) {
    CycleWalk walk{phi, *phi.system(), p, tie_tolerance, {}, {}, {kNegInf, {}}};
    for (Symbol s = 0; s < phi.system()->alphabet_size(); ++s) walk.from_first_symbol(s);
    parts.push_back(std::move(walk.result));
  }
  return merge_cycles(phi, std::move(parts), tie_tolerance);
}

CycleMaximum best_cycle_average_parallel(const LocallyConstantPotential& phi, int max_period,
                                         double tie_tolerance) {
  const int m = phi.system()->alphabet_size();
  const auto tasks = static_cast<std::size_t>(m * max_period);
  std::vector<CycleMaximum> parts(tasks);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t task = 0; task < tasks; ++task) {
    const int p = static_cast<int>(task) / m + 1;
    const auto s = static_cast<Symbol>(static_cast<int>(task) % m);
    CycleWalk walk{phi, *phi.system(), p, tie_tolerance, {}, {}, {kNegInf, {}}};
    walk.from_first_symbol(s);
    parts[task] = std::move(walk.result);
  }
  return merge_cycles(phi, std::move(parts), tie_tolerance);
}

CylinderSums cylinder_sums_serial(const IntervalMapSystem& map, double t,
                                  std::span<const double> branch_shift, int depth) {
  check_cylinder_inputs(map, branch_shift, depth);
  CylinderWalk walk{map, t, branch_shift, depth,
                    std::vector<double>(static_cast<std::size_t>(depth), 0.0),
                    std::vector<double>(static_cast<std::size_t>(depth), 0.0)};
  walk.descend(CylinderNode{0.0, 1.0, 0.0, 0.0}, 0);
  return {std::move(walk.lower), std::move(walk.upper)};
}

CylinderSums cylinder_sums_parallel(const IntervalMapSystem& map, double t,
                                    std::span<const double> branch_shift, int depth) {
  check_cylinder_inputs(map, branch_shift, depth);
  const auto levels = static_cast<std::size_t>(depth);
  const int split = std::min(depth, 6);
  CylinderWalk shallow{map, t, branch_shift, depth, std::vector<double>(levels, 0.0),
                       std::vector<double>(levels, 0.0)};
  // Breadth-first expansion down to the split level fixes the task list.
  std::vector<CylinderNode> frontier{CylinderNode{0.0, 1.0, 0.0, 0.0}};
  for (int level = 0; level < split; ++level) {
    std::vector<CylinderNode> next;
    for (const auto& node : frontier) {
      shallow.children(node, [&](const CylinderNode& child) {
        shallow.lower[static_cast<std::size_t>(level)] += std::exp(child.log_min);
        shallow.upper[static_cast<std::size_t>(level)] += std::exp(child.log_max);
        next.push_back(child);
      });
    }
    frontier = std::move(next);
  }
  std::vector<std::vector<double>> lower(frontier.size()), upper(frontier.size());
  if (split < depth) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      CylinderWalk walk{map, t, branch_shift, depth, std::vector<double>(levels, 0.0),
                        std::vector<double>(levels, 0.0)};
      walk.descend(frontier[i], split);
      lower[i] = std::move(walk.lower);
      upper[i] = std::move(walk.upper);
    }
  }
  CylinderSums out{std::move(shallow.lower), std::move(shallow.upper)};
  if (split < depth) {
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (std::size_t d = static_cast<std::size_t>(split); d < levels; ++d) {
        out.lower[d] += lower[i][d];
        out.upper[d] += upper[i][d];
      }
    }
  }
  return out;
}

namespace {

inline double grid_value(const GridOperator& op, const std::vector<std::vector<double>>& weight,
                         std::span<const double> h, std::size_t j) {
  double v = 0.0;
  for (std::size_t b = 0; b < op.branches.size(); ++b) {
    const auto& br = op.branches[b];
    const std::size_t c = br.cell[j];
    const double f = br.fraction[j];
    v += weight[b][j] * (h[c] * (1.0 - f) + h[c + 1] * f);
  }
  return v;
}

}  // namespace

void grid_apply_serial(const GridOperator& op, const std::vector<std::vector<double>>& weight,
                       std::span<const double> h, std::span<double> out) {
  for (std::size_t j = 0; j < op.nodes.size(); ++j) out[j] = grid_value(op, weight, h, j);
}

void grid_apply_parallel(const GridOperator& op, const std::vector<std::vector<double>>& weight,
                         std::span<const double> h, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(op.nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = grid_value(op, weight, h, static_cast<std::size_t>(j));
  }
}

void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

// An exception may not leave an OpenMP region. Each one is caught where it is
// thrown, and the one from the lowest index is rethrown, as the serial loop
// would have done.
void for_each_index_parallel(std::size_t count, const std::function<void(std::size_t)>& body) {
  const auto n = static_cast<std::ptrdiff_t>(count);
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace thermo::kernels
