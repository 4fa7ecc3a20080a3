#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beliefsafe {

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kTieTolerance = 1e-9;

class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool is_distribution(std::span<const double> p, double tol = kProbabilityTolerance) {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimension_error("l1_distance: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw dimension_error("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Player 1's payoff table, row-major. Rows are Player-1 actions.
class PayoffMatrix {
 public:
  PayoffMatrix() = default;

  PayoffMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) throw dimension_error("PayoffMatrix: empty dimension");
    if (entries_.size() != rows_ * cols_) throw dimension_error("PayoffMatrix: entry count mismatch");
    for (double v : entries_)
      if (!std::isfinite(v)) throw std::invalid_argument("PayoffMatrix: non-finite entry");
  }

  PayoffMatrix(std::initializer_list<std::initializer_list<double>> table) {
    rows_ = table.size();
    cols_ = rows_ ? table.begin()->size() : 0;
    std::vector<double> e;
    for (const auto& row : table) {
      if (row.size() != cols_) throw dimension_error("PayoffMatrix: ragged rows");
      e.insert(e.end(), row.begin(), row.end());
    }
    *this = PayoffMatrix(rows_, cols_, std::move(e));
  }

  static PayoffMatrix from_rows(const std::vector<std::vector<double>>& table) {
    if (table.empty()) throw dimension_error("PayoffMatrix: no rows");
    std::vector<double> e;
    const std::size_t cols = table.front().size();
    for (const auto& row : table) {
      if (row.size() != cols) throw dimension_error("PayoffMatrix: ragged rows");
      e.insert(e.end(), row.begin(), row.end());
    }
    return PayoffMatrix(table.size(), cols, std::move(e));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * cols_, cols_}; }
  const std::vector<double>& entries() const noexcept { return entries_; }

  double max_norm() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
  }

  /// A·y, one entry per row.
  std::vector<double> times(std::span<const double> y) const {
    if (y.size() != cols_) throw dimension_error("PayoffMatrix::times: column count mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = detail::dot(row(i), y);
    return out;
  }

  /// x⊤A, one entry per column.
  std::vector<double> left_times(std::span<const double> x) const {
    if (x.size() != rows_) throw dimension_error("PayoffMatrix::left_times: row count mismatch");
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[j] += x[i] * (*this)(i, j);
    return out;
  }

  PayoffMatrix transposed() const {
    std::vector<double> e(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) e[j * rows_ + i] = (*this)(i, j);
    return PayoffMatrix(cols_, rows_, std::move(e));
  }

  PayoffMatrix scaled(double c) const {
    auto e = entries_;
    for (double& v : e) v *= c;
    return PayoffMatrix(rows_, cols_, std::move(e));
  }

  PayoffMatrix shifted(double c) const {
    auto e = entries_;
    for (double& v : e) v += c;
    return PayoffMatrix(rows_, cols_, std::move(e));
  }

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

class MixedStrategy {
 public:
  MixedStrategy() = default;

  explicit MixedStrategy(std::vector<double> probs) : probs_(std::move(probs)) {
    if (!detail::is_distribution(probs_))
      throw std::invalid_argument("MixedStrategy: not a probability vector");
  }

  MixedStrategy(std::initializer_list<double> probs) : MixedStrategy(std::vector<double>(probs)) {}

  static MixedStrategy pure(std::size_t n, std::size_t k) {
    if (k >= n) throw dimension_error("MixedStrategy::pure: index out of range");
    std::vector<double> p(n, 0.0);
    p[k] = 1.0;
    return MixedStrategy(std::move(p));
  }

  static MixedStrategy uniform(std::size_t n) {
    if (n == 0) throw dimension_error("MixedStrategy::uniform: empty");
    return MixedStrategy(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  /// Renormalizes nonnegative weights; clips round-off negatives.
  static MixedStrategy normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double& v : w) {
      if (v < 0.0 && v > -1e-9) v = 0.0;
      sum += v;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("MixedStrategy::normalized: zero mass");
    for (double& v : w) v /= sum;
    return MixedStrategy(std::move(w));
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::span<const double> view() const noexcept { return probs_; }

  bool is_pure() const {
    return std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }) == 1;
  }

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  std::vector<double> probs_;
};

/// λ·a + (1−λ)·b.
inline MixedStrategy blend(double lambda, const MixedStrategy& a, const MixedStrategy& b) {
  if (a.size() != b.size()) throw dimension_error("blend: size mismatch");
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = lambda * a[i] + (1.0 - lambda) * b[i];
  return MixedStrategy::normalized(std::move(p));
}

/// Finite set Θ of candidate Player-2 strategies.
///
/// The full simplex P_b is represented by its b vertices plus a flag; callers
/// that need the game-dependent minimax point use `materialize`.
class HypothesisSet {
 public:
  HypothesisSet() = default;

  explicit HypothesisSet(std::vector<MixedStrategy> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("HypothesisSet: empty");
    const std::size_t b = members_.front().size();
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i].size() != b) throw dimension_error("HypothesisSet: member size mismatch");
      for (std::size_t j = 0; j < i; ++j)
        if (detail::l1_distance(members_[i].view(), members_[j].view()) <= kProbabilityTolerance)
          throw std::invalid_argument("HypothesisSet: duplicate member " + std::to_string(i));
    }
  }

  static HypothesisSet full_simplex(std::size_t b) {
    std::vector<MixedStrategy> v;
    for (std::size_t j = 0; j < b; ++j) v.push_back(MixedStrategy::pure(b, j));
    HypothesisSet s(std::move(v));
    s.full_simplex_ = true;
    return s;
  }

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t dimension() const { return members_.front().size(); }
  bool is_full_simplex() const noexcept { return full_simplex_; }
  const MixedStrategy& operator[](std::size_t i) const { return members_.at(i); }
  const std::vector<MixedStrategy>& members() const noexcept { return members_; }

  /// Copy with `extra` appended unless it duplicates an existing member.
  HypothesisSet with_member(const MixedStrategy& extra) const {
    for (const auto& m : members_)
      if (detail::l1_distance(m.view(), extra.view()) <= kProbabilityTolerance) return *this;
    auto v = members_;
    v.push_back(extra);
    HypothesisSet s(std::move(v));
    s.full_simplex_ = full_simplex_;
    return s;
  }

 private:
  std::vector<MixedStrategy> members_;
  bool full_simplex_ = false;
};

/// Distribution ρ over the members of a HypothesisSet.
class Belief {
 public:
  Belief() = default;

  explicit Belief(std::vector<double> weights) : weights_(std::move(weights)) {
    if (!detail::is_distribution(weights_))
      throw std::invalid_argument("Belief: weights are not a probability vector");
  }

  static Belief point(std::size_t n, std::size_t k) { return Belief(MixedStrategy::pure(n, k).probs()); }

  static Belief mixture(std::size_t n, std::size_t i, std::size_t j, double t) {
    if (i >= n || j >= n) throw dimension_error("Belief::mixture: index out of range");
    std::vector<double> w(n, 0.0);
    w[i] += t;
    w[j] += 1.0 - t;
    return Belief(std::move(w));
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// E_ρ[y].
  MixedStrategy mean(const HypothesisSet& theta) const {
    if (theta.size() != weights_.size()) throw dimension_error("Belief::mean: size mismatch");
    std::vector<double> y(theta.dimension(), 0.0);
    for (std::size_t k = 0; k < weights_.size(); ++k)
      for (std::size_t j = 0; j < y.size(); ++j) y[j] += weights_[k] * theta[k][j];
    return MixedStrategy::normalized(std::move(y));
  }

 private:
  std::vector<double> weights_;
};

}  // namespace beliefsafe
