#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "beliefsafe/lp.hpp"
#include "beliefsafe/strategy.hpp"

namespace beliefsafe {

struct MaximinResult {
  MixedStrategy strategy;
  double value = 0.0;
  std::vector<std::size_t> tight_set;  // indices of columns/members attaining the minimum
};

/// max_x min_j x⊤M_{:,j} over the simplex of rows of `m`.
inline MaximinResult maximin_columns(const PayoffMatrix& m, const LpOptions& opt = {}) {
  const std::size_t a = m.rows(), k = m.cols();
  LinearProgram lp(a + 1);
  lp.objective[a] = 1.0;
  lp.set_free(a);
  std::vector<double> simplex(a + 1, 1.0);
  simplex[a] = 0.0;
  lp.add(simplex, Relation::equal, 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> row(a + 1, 0.0);
    for (std::size_t i = 0; i < a; ++i) row[i] = m(i, j);
    row[a] = -1.0;
    lp.add(std::move(row), Relation::greater_equal, 0.0);
  }
  const LpSolution sol = solve_lp(lp, opt);
  if (!sol.ok()) throw lp_error(sol.status, "maximin: LP " + to_string(sol.status));

  MaximinResult res;
  res.strategy = MixedStrategy::normalized(std::vector<double>(sol.x.begin(), sol.x.begin() + a));
  const auto payoffs = m.left_times(res.strategy.view());
  double worst = payoffs.front();
  for (double p : payoffs) worst = std::min(worst, p);
  res.value = worst;
  for (std::size_t j = 0; j < k; ++j)
    if (payoffs[j] <= worst + kTieTolerance) res.tight_set.push_back(j);
  return res;
}

/// Columns A·y for each member y of Θ, as an a×|Θ| matrix.
inline PayoffMatrix induced_columns(const PayoffMatrix& a, const HypothesisSet& theta) {
  if (theta.dimension() != a.cols()) throw dimension_error("induced_columns: Θ dimension != cols(A)");
  std::vector<double> e(a.rows() * theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto col = a.times(theta[k].view());
    for (std::size_t i = 0; i < a.rows(); ++i) e[i * theta.size() + k] = col[i];
  }
  return PayoffMatrix(a.rows(), theta.size(), std::move(e));
}

/// Safe strategy x̄ maximizing min_{y∈Θ} x⊤Ay. For the full simplex the
/// members are the pure columns, which is equivalent.
inline MaximinResult maximin_strategy(const PayoffMatrix& a, const HypothesisSet& theta,
                                      const LpOptions& opt = {}) {
  return maximin_columns(induced_columns(a, theta), opt);
}

/// The point of conv(Θ) minimizing max_i (Ay)_i: the column player's
/// minimax response against Player 1.
inline MixedStrategy hull_minimizer(const PayoffMatrix& a, const HypothesisSet& theta,
                                    const LpOptions& opt = {}) {
  const PayoffMatrix m = induced_columns(a, theta);
  const MaximinResult dual = maximin_columns(m.transposed().scaled(-1.0), opt);
  std::vector<double> y(theta.dimension(), 0.0);
  for (std::size_t k = 0; k < theta.size(); ++k)
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += dual.strategy[k] * theta[k][j];
  return MixedStrategy::normalized(std::move(y));
}

/// Finite member list used by the gap search. For the full simplex this is the
/// b vertices plus the game's minimax point (when it is not already a vertex).
inline HypothesisSet materialize(const HypothesisSet& theta, const PayoffMatrix& a) {
  if (!theta.is_full_simplex()) return theta;
  return theta.with_member(hull_minimizer(a, theta));
}

}  // namespace beliefsafe
