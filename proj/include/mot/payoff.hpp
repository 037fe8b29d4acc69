#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/matrix.hpp"
#include "mot/rational.hpp"

namespace mot {

/// Payoff c(x_j, y_i) tabulated on the product of two supports.
/// Row j belongs to xs[j], column i to ys[i].
class PayoffGrid {
 public:
  PayoffGrid() = default;
  PayoffGrid(std::vector<Rational> xs, std::vector<Rational> ys, Matrix<Rational> values)
      : xs_(std::move(xs)), ys_(std::move(ys)), values_(std::move(values)) {
    if (values_.rows() != xs_.size() || values_.cols() != ys_.size()) {
      throw DimensionMismatch("payoff grid is " + std::to_string(values_.rows()) + "x" +
                              std::to_string(values_.cols()) + " but supports are " +
                              std::to_string(xs_.size()) + "x" + std::to_string(ys_.size()));
    }
    auto increasing = [](const std::vector<Rational>& v) {
      for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k - 1] < v[k])) return false;
      return true;
    };
    if (!increasing(xs_) || !increasing(ys_)) {
      throw InvalidArgument("payoff grid supports must be strictly increasing");
    }
  }

  std::span<const Rational> xs() const noexcept { return xs_; }
  std::span<const Rational> ys() const noexcept { return ys_; }
  const Matrix<Rational>& values() const noexcept { return values_; }
  std::size_t rows() const noexcept { return xs_.size(); }
  std::size_t cols() const noexcept { return ys_.size(); }
  const Rational& operator()(std::size_t j, std::size_t i) const { return values_(j, i); }

  PayoffGrid negated() const {
    Matrix<Rational> v = values_;
    for (std::size_t j = 0; j < v.rows(); ++j)
      for (auto& c : v.row(j)) c = -c;
    return {xs_, ys_, std::move(v)};
  }

  friend bool operator==(const PayoffGrid&, const PayoffGrid&) = default;

 private:
  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
  Matrix<Rational> values_;
};

/// Tabulates any callable c(x, y) -> Rational.
template <class F>
PayoffGrid grid_from_function(std::span<const Rational> xs, std::span<const Rational> ys, F&& c) {
  Matrix<Rational> values(xs.size(), ys.size());
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (std::size_t i = 0; i < ys.size(); ++i) values(j, i) = Rational(c(xs[j], ys[i]));
  return {std::vector<Rational>(xs.begin(), xs.end()), std::vector<Rational>(ys.begin(), ys.end()),
          std::move(values)};
}

inline const std::vector<std::string>& builtin_payoff_names() {
  static const std::vector<std::string> names = {"x_times_y_squared", "neg_x_times_y_squared",
                                                 "spread_call", "forward_straddle"};
  return names;
}

/// Built-in payoffs:
///   x_times_y_squared      c = x*y^2
///   neg_x_times_y_squared  c = -x*y^2
///   spread_call K          c = max(y - x - K, 0)
///   forward_straddle       c = |y - x|
inline PayoffGrid grid_from_builtin(std::string_view name, std::span<const Rational> params,
                                    std::span<const Rational> xs, std::span<const Rational> ys) {
  auto expect_arity = [&](std::size_t n) {
    if (params.size() != n) {
      throw InvalidArgument("payoff " + std::string(name) + " takes " + std::to_string(n) +
                            " parameter(s), got " + std::to_string(params.size()));
    }
  };
  if (name == "x_times_y_squared") {
    expect_arity(0);
    return grid_from_function(xs, ys, [](const Rational& x, const Rational& y) -> Rational { return x * y * y; });
  }
  if (name == "neg_x_times_y_squared") {
    expect_arity(0);
    return grid_from_function(xs, ys,
                              [](const Rational& x, const Rational& y) -> Rational { return -(x * y * y); });
  }
  if (name == "spread_call") {
    expect_arity(1);
    const Rational strike = params[0];
    return grid_from_function(xs, ys, [&](const Rational& x, const Rational& y) -> Rational {
      Rational v = y - x - strike;
      return sgn(v) > 0 ? v : Rational(0);
    });
  }
  if (name == "forward_straddle") {
    expect_arity(0);
    return grid_from_function(xs, ys,
                              [](const Rational& x, const Rational& y) -> Rational { return Rational(abs(y - x)); });
  }
  throw UnknownPayoff("unknown payoff \"" + std::string(name) + "\"");
}

/// Indices (j < j2, lo < mid < hi) of one configuration of the
/// Spence-Mirrlees type inequality together with its scaled value.
struct SmcWitness {
  std::size_t j = 0;
  std::size_t j2 = 0;
  std::size_t lo = 0;
  std::size_t mid = 0;
  std::size_t hi = 0;
  /// (y_hi - y_lo) times the inequality's left-hand side; same sign.
  Rational scaled_value;
};

struct SmcReport {
  bool holds_strict = true;
  bool holds_weak = true;
  std::optional<SmcWitness> first_violation;
};

/// Exhaustive check, for every x < x' and y- < y' < y+ on the grid, of
///   lambda [c(x',y+) - c(x,y+)] + (1 - lambda) [c(x',y-) - c(x,y-)]
///     - [c(x',y') - c(x,y')] > 0,   lambda = (y' - y-) / (y+ - y-).
/// The expression is evaluated multiplied through by (y+ - y-) > 0.
inline SmcReport check_smc(const PayoffGrid& grid) {
  SmcReport report;
  const std::size_t n = grid.rows();
  const std::size_t m = grid.cols();
  const auto ys = grid.ys();
  std::vector<Rational> diff(m);
  Rational value;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t j2 = j + 1; j2 < n; ++j2) {
      for (std::size_t i = 0; i < m; ++i) diff[i] = grid(j2, i) - grid(j, i);
      for (std::size_t lo = 0; lo < m; ++lo) {
        for (std::size_t hi = lo + 2; hi < m; ++hi) {
          for (std::size_t mid = lo + 1; mid < hi; ++mid) {
            value = (ys[mid] - ys[lo]) * diff[hi] + (ys[hi] - ys[mid]) * diff[lo] -
                    (ys[hi] - ys[lo]) * diff[mid];
            const int s = sgn(value);
            if (s > 0) continue;
            report.holds_strict = false;
            if (s < 0) {
              report.holds_weak = false;
              report.first_violation = SmcWitness{j, j2, lo, mid, hi, value};
              return report;
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace mot
