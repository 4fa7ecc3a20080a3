#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beliefsafe {

enum class Relation { less_equal, greater_equal, equal };

struct LinearConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::less_equal;
  double bound = 0.0;
};

/// maximize objective·x subject to constraints and per-variable bounds.
/// Bounds default to [0, +inf); either side may be infinite.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit LinearProgram(std::size_t n = 0)
      : objective(n, 0.0), lower(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

  std::size_t variables() const noexcept { return objective.size(); }

  void add(std::vector<double> coeffs, Relation rel, double bound) {
    constraints.push_back({std::move(coeffs), rel, bound});
  }

  void set_free(std::size_t i) {
    lower.at(i) = -std::numeric_limits<double>::infinity();
    upper.at(i) = std::numeric_limits<double>::infinity();
  }

  void validate() const {
    const std::size_t n = variables();
    if (lower.size() != n || upper.size() != n)
      throw std::invalid_argument("LinearProgram: bound vector size mismatch");
    for (double c : objective)
      if (!std::isfinite(c)) throw std::invalid_argument("LinearProgram: non-finite objective");
    for (const auto& con : constraints) {
      if (con.coeffs.size() != n) throw std::invalid_argument("LinearProgram: constraint size mismatch");
      if (!std::isfinite(con.bound)) throw std::invalid_argument("LinearProgram: non-finite bound");
      for (double c : con.coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("LinearProgram: non-finite coefficient");
    }
    for (std::size_t i = 0; i < n; ++i)
      if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] == std::numeric_limits<double>::infinity() ||
          upper[i] == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("LinearProgram: invalid variable bound");
  }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical_error };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::numerical_error;
  std::vector<double> x;
  double value = 0.0;
  std::size_t pivots = 0;

  bool ok() const noexcept { return status == LpStatus::optimal; }
};

class lp_error : public std::runtime_error {
 public:
  lp_error(LpStatus status, const std::string& what) : std::runtime_error(what), status_(status) {}
  LpStatus status() const noexcept { return status_; }

 private:
  LpStatus status_;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double certificate_tol = 1e-8;
  std::size_t max_pivots = 10'000;
};

namespace detail {

// Dense two-phase tableau simplex with Bland's rule. The objective row stores
// reduced costs c_j - c_B·B^{-1}a_j and, in the rhs slot, the negated value.
class SimplexTableau {
 public:
  SimplexTableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  double& cost(std::size_t c) { return at(m_, c); }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  void load_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= n_; ++j) cost(j) = j < n_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) cost(j) -= cb * at(i, j);
    }
  }

  // Runs primal simplex on the loaded costs; columns with allowed[c] == false never enter.
  LpStatus optimize(const std::vector<bool>& allowed, const LpOptions& opt, std::size_t& pivots) {
    while (true) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (allowed[j] && cost(j) > opt.optimality_tol) {
          enter = j;
          break;
        }
      }
      if (enter == n_) return LpStatus::optimal;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= opt.feasibility_tol) continue;
        const double ratio = rhs(i) / a;
        if (leave == m_ || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return LpStatus::unbounded;
      if (pivots >= opt.max_pivots) return LpStatus::iteration_limit;
      pivot(leave, enter);
      ++pivots;
    }
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

// Maps an original variable onto nonnegative standard-form columns:
// x = offset + sign * x' (one column) or x = x+ - x- (two columns).
struct VariableMap {
  double offset = 0.0;
  double sign = 1.0;
  std::size_t column = 0;
  std::optional<std::size_t> negative_column;
};

}  // namespace detail

/// Solves a small dense LP exactly enough for game-theoretic use.
/// The returned solution is re-checked by direct substitution.
inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opt = {}) {
  lp.validate();
  const std::size_t n = lp.variables();
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<detail::VariableMap> vmap(n);
  std::size_t cols = 0;
  struct Row {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::size_t, double>> upper_rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = lp.lower[i], hi = lp.upper[i];
    if (lo > -inf) {
      vmap[i] = {lo, 1.0, cols++, std::nullopt};
      if (hi < inf) upper_rows.emplace_back(vmap[i].column, hi - lo);
    } else if (hi < inf) {
      vmap[i] = {hi, -1.0, cols++, std::nullopt};
    } else {
      vmap[i].column = cols++;
      vmap[i].negative_column = cols++;
    }
  }
  const std::size_t structural = cols;

  auto push_row = [&](std::vector<double> coeffs, Relation rel, double rhs) {
    if (rhs < 0.0) {
      for (double& c : coeffs) c = -c;
      rhs = -rhs;
      if (rel == Relation::less_equal)
        rel = Relation::greater_equal;
      else if (rel == Relation::greater_equal)
        rel = Relation::less_equal;
    }
    rows.push_back({std::move(coeffs), rel, rhs});
  };

  for (const auto& con : lp.constraints) {
    std::vector<double> coeffs(structural, 0.0);
    double rhs = con.bound;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = con.coeffs[i];
      if (a == 0.0) continue;
      const auto& vm = vmap[i];
      if (vm.negative_column) {
        coeffs[vm.column] += a;
        coeffs[*vm.negative_column] -= a;
      } else {
        coeffs[vm.column] += a * vm.sign;
        rhs -= a * vm.offset;
      }
    }
    push_row(std::move(coeffs), con.relation, rhs);
  }
  for (auto [col, cap] : upper_rows) {
    if (cap < 0.0) return {LpStatus::infeasible, {}, 0.0, 0};
    std::vector<double> coeffs(structural, 0.0);
    coeffs[col] = 1.0;
    push_row(std::move(coeffs), Relation::less_equal, cap);
  }

  const std::size_t m = rows.size();
  std::size_t slack_count = 0, artificial_count = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::equal) ++slack_count;
    if (r.rel != Relation::less_equal) ++artificial_count;
  }
  const std::size_t total = structural + slack_count + artificial_count;
  detail::SimplexTableau tab(m, total);
  std::vector<bool> is_artificial(total, false);
  std::size_t next_slack = structural, next_art = structural + slack_count;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < structural; ++j) tab.at(i, j) = rows[i].coeffs[j];
    tab.rhs(i) = rows[i].rhs;
    switch (rows[i].rel) {
      case Relation::less_equal:
        tab.at(i, next_slack) = 1.0;
        tab.basis()[i] = next_slack++;
        break;
      case Relation::greater_equal:
        tab.at(i, next_slack++) = -1.0;
        tab.at(i, next_art) = 1.0;
        is_artificial[next_art] = true;
        tab.basis()[i] = next_art++;
        break;
      case Relation::equal:
        tab.at(i, next_art) = 1.0;
        is_artificial[next_art] = true;
        tab.basis()[i] = next_art++;
        break;
    }
  }

  LpSolution sol;
  std::vector<bool> allowed(total, true);
  if (artificial_count > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) phase1[j] = -1.0;
    tab.load_costs(phase1);
    const LpStatus st = tab.optimize(allowed, opt, sol.pivots);
    if (st == LpStatus::iteration_limit) {
      sol.status = st;
      return sol;
    }
    if (-tab.cost(total) < -opt.feasibility_tol) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // Drive remaining (zero-level) artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis()[i]]) continue;
      for (std::size_t j = 0; j < total; ++j) {
        if (!is_artificial[j] && std::abs(tab.at(i, j)) > opt.feasibility_tol) {
          tab.pivot(i, j);
          ++sol.pivots;
          break;
        }
      }
    }
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) allowed[j] = false;
  }

  std::vector<double> phase2(total, 0.0);
  double constant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = lp.objective[i];
    const auto& vm = vmap[i];
    if (vm.negative_column) {
      phase2[vm.column] += c;
      phase2[*vm.negative_column] -= c;
    } else {
      phase2[vm.column] += c * vm.sign;
      constant += c * vm.offset;
    }
  }
  tab.load_costs(phase2);
  sol.status = tab.optimize(allowed, opt, sol.pivots);
  if (sol.status != LpStatus::optimal) return sol;

  std::vector<double> y(total, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[tab.basis()[i]] = tab.rhs(i);
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& vm = vmap[i];
    sol.x[i] = vm.negative_column ? y[vm.column] - y[*vm.negative_column] : vm.offset + vm.sign * y[vm.column];
  }
  sol.value = constant - tab.cost(total);

  // Certificate by substitution.
  double obj = 0.0;
  for (std::size_t i = 0; i < n; ++i) obj += lp.objective[i] * sol.x[i];
  bool ok = std::abs(obj - sol.value) <= opt.certificate_tol * std::max(1.0, std::abs(obj));
  for (std::size_t i = 0; i < n && ok; ++i)
    ok = sol.x[i] >= lp.lower[i] - opt.certificate_tol && sol.x[i] <= lp.upper[i] + opt.certificate_tol;
  for (const auto& con : lp.constraints) {
    if (!ok) break;
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += con.coeffs[i] * sol.x[i];
    const double slack = std::max(1.0, std::abs(con.bound)) * opt.certificate_tol;
    switch (con.relation) {
      case Relation::less_equal: ok = lhs <= con.bound + slack; break;
      case Relation::greater_equal: ok = lhs >= con.bound - slack; break;
      case Relation::equal: ok = std::abs(lhs - con.bound) <= slack; break;
    }
  }
  sol.value = obj;
  if (!ok) sol.status = LpStatus::numerical_error;
  return sol;
}

}  // namespace beliefsafe
