#include "thermo/equilibrium.hpp"

#include "thermo/error.hpp"
#include "thermo/format.hpp"
#include "thermo/random.hpp"

#include <algorithm>
#include <cmath>

namespace thermo {

GibbsState::GibbsState(MarkovMeasure chain, LocallyConstantPotential source, double log_lambda)
    : chain_(std::move(chain)), source_(std::move(source)), log_lambda_(log_lambda) {
  if (chain_.system()->alphabet_size() != static_cast<int>(source_.size())) {
    throw Error(ErrorCode::SystemMismatch, "chain does not live on the potential's blocks");
  }
}

CylinderMarginal GibbsState::marginal(int depth) const {
  return marginal(make_word_index(system(), depth));
}

CylinderMarginal GibbsState::marginal(const WordIndexPtr& index) const {
  return block_marginal(chain_, *source_.index(), index);
}

double GibbsState::integrate(const LocallyConstantPotential& psi) const {
  require_same_system(system(), psi.system(), "integrate against a Gibbs state");
  const auto& index = psi.depth() >= depth() ? psi.index() : source_.index();
  return thermo::integrate(marginal(index), psi);
}

double GibbsState::entropy() const { return ks_entropy(chain_); }

GibbsState gibbs_state(const LocallyConstantPotential& phi, const PerronOptions& options) {
  const Eigen::MatrixXd l = weighted_transition(phi);
  const auto pd = perron(l, phi.max_value(), options);
  const double lambda = std::exp(pd.log_lambda - phi.max_value());
  const auto n = l.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (l(i, j) != 0.0) p(i, j) = l(i, j) * pd.right_vec(j) / (lambda * pd.right_vec(i));
    }
    p.row(i) /= p.row(i).sum();
  }
  Eigen::VectorXd pi = pd.left_vec.cwiseProduct(pd.right_vec);
  pi /= pi.sum();
  SystemPtr chain_system = phi.depth() == 1 ? phi.system() : block_system(*phi.index());
  return {MarkovMeasure(std::move(chain_system), std::move(p), std::move(pi)), phi, pd.log_lambda};
}

GibbsState gibbs_state(const SystemPtr& sys, const LocallyConstantPotential& phi) {
  require_same_system(sys, phi.system(), "gibbs state");
  return gibbs_state(phi);
}

std::vector<LocallyConstantPotential> sample_directions(const WordIndexPtr& index, int random_count,
                                                        std::uint64_t seed) {
  const std::size_t dim = index->size();
  std::vector<LocallyConstantPotential> out;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> v(dim, 0.0);
    v[i] = 1.0;
    out.emplace_back(index, std::move(v));
  }
  Rng rng(seed);
  for (int r = 0; r < random_count; ++r) {
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& x : v) {
        x = standard_normal(rng);
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    out.emplace_back(index, std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

void TangencyReport::write_csv(std::ostream& out) const {
  out << "psi_id,lhs,rhs,slack\n";
  for (const auto& row : per_direction) {
    out << row.psi_id << ',' << format_real(row.lhs) << ',' << format_real(row.rhs) << ','
        << format_real(row.slack) << '\n';
  }
}

TangencyReport tangency_check(const LocallyConstantPotential& phi,
                              const std::vector<LocallyConstantPotential>& directions,
                              const GibbsState& state) {
  if (directions.empty()) throw Error(ErrorCode::InvalidArgument, "no directions to test");
  const double base = matrix_pressure(phi).log_lambda;
  TangencyReport report;
  report.directions_tested = static_cast<int>(directions.size());
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const auto& psi = directions[d];
    const double pairing = state.integrate(psi);
    for (const double sign : {1.0, -1.0}) {
      TangencyRow row;
      row.psi_id = std::to_string(d) + (sign > 0 ? "+" : "-");
      row.lhs = matrix_pressure(phi + psi.scaled(sign)).log_lambda - base;
      row.rhs = sign * pairing;
      row.slack = row.lhs - row.rhs;
      min_slack = std::min(min_slack, row.slack);
      report.per_direction.push_back(std::move(row));
    }
  }
  report.max_violation = -min_slack;
  return report;
}

TangencyReport tangency_check(const LocallyConstantPotential& phi,
                              const std::vector<LocallyConstantPotential>& directions) {
  return tangency_check(phi, directions, gibbs_state(phi));
}

GateauxResult gateaux_derivative(const LocallyConstantPotential& phi,
                                 const LocallyConstantPotential& psi,
                                 const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty step grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 1e-7) || (i > 0 && !(t_grid[i] < t_grid[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument,
                  "steps must be decreasing and at least 1e-7");
    }
  }
  GateauxResult out;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double forward = matrix_pressure(phi + psi.scaled(t)).log_lambda;
    const double backward = matrix_pressure(phi + psi.scaled(-t)).log_lambda;
    DerivativeRow row{t, (forward - backward) / (2.0 * t), 0.0};
    if (i == 0) {
      row.extrapolated = row.central_difference;
    } else {
      const double q = t_grid[i - 1] / t;
      const double q2 = q * q;
      row.extrapolated = (q2 * row.central_difference - out.table.back().central_difference) /
                         (q2 - 1.0);
    }
    out.table.push_back(row);
  }
  out.value = out.table.back().extrapolated;
  return out;
}

FrechetReport frechet_probe(const LocallyConstantPotential& phi,
                            const std::vector<double>& radius_grid,
                            const std::vector<LocallyConstantPotential>& directions) {
  if (radius_grid.empty() || directions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "radius grid and directions must be nonempty");
  }
  for (std::size_t i = 1; i < radius_grid.size(); ++i) {
    if (!(radius_grid[i] < radius_grid[i - 1]) || !(radius_grid[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "radius grid must be positive and decreasing");
    }
  }
  const auto state = gibbs_state(phi);
  const double base = state.log_lambda();
  const auto base_marginal = state.marginal(phi.index());

  std::vector<LocallyConstantPotential> unit;
  std::vector<double> pairing;
  for (const auto& psi : directions) {
    const double norm = psi.sup_norm();
    if (norm == 0.0) continue;
    unit.push_back(psi.scaled(1.0 / norm));
    pairing.push_back(state.integrate(unit.back()));
  }

  FrechetReport report;
  for (double r : radius_grid) {
    FrechetRow row{r, 0.0, 0.0};
    for (std::size_t d = 0; d < unit.size(); ++d) {
      const auto moved = gibbs_state(phi + unit[d].scaled(r));
      const double remainder = moved.log_lambda() - base - r * pairing[d];
      row.remainder_ratio = std::max(row.remainder_ratio, std::abs(remainder) / r);
      row.marginal_distance =
          std::max(row.marginal_distance, marginal_distance(moved.marginal(phi.index()), base_marginal));
    }
    report.continuity_constant = std::max(report.continuity_constant, row.marginal_distance / r);
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double expected = report.rows[i - 1].radius / report.rows[i].radius;
    const double factor = report.rows[i].remainder_ratio > 0.0
                              ? report.rows[i - 1].remainder_ratio / report.rows[i].remainder_ratio
                              : 0.0;
    report.halving_factors.push_back(factor);
    if (factor < 0.75 * expected || factor > 1.25 * expected) report.linear_decay = false;
  }
  return report;
}

}  // namespace thermo
