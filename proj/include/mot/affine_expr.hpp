#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "mot/rational.hpp"

namespace mot {

/// constant + sum coefficient_k * symbol_k over symbolic variable ids.
/// Zero coefficients are never stored, so equality is structural.
class AffineExpr {
 public:
  using Symbol = std::size_t;

  AffineExpr() = default;
  AffineExpr(Rational constant) : constant_(std::move(constant)) {}  // NOLINT(implicit)

  static AffineExpr symbol(Symbol id, Rational coefficient = 1) {
    AffineExpr e;
    e.add_term(id, coefficient);
    return e;
  }

  const Rational& constant() const noexcept { return constant_; }
  const std::map<Symbol, Rational>& terms() const noexcept { return terms_; }
  bool is_constant() const noexcept { return terms_.empty(); }

  Rational coefficient(Symbol id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  AffineExpr& operator+=(const AffineExpr& other) {
    constant_ += other.constant_;
    for (const auto& [id, c] : other.terms_) add_term(id, c);
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& other) {
    constant_ -= other.constant_;
    for (const auto& [id, c] : other.terms_) add_term(id, -c);
    return *this;
  }
  AffineExpr& operator*=(const Rational& k) {
    if (sgn(k) == 0) {
      constant_ = 0;
      terms_.clear();
      return *this;
    }
    constant_ *= k;
    for (auto& [id, c] : terms_) c *= k;
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator-(AffineExpr a) { return a *= Rational(-1); }
  friend AffineExpr operator*(AffineExpr a, const Rational& k) { return a *= k; }
  friend AffineExpr operator*(const Rational& k, AffineExpr a) { return a *= k; }

  /// Replaces `id` by `value` wherever it occurs.
  AffineExpr substituted(Symbol id, const AffineExpr& value) const {
    auto it = terms_.find(id);
    if (it == terms_.end()) return *this;
    AffineExpr out = *this;
    const Rational c = it->second;
    out.terms_.erase(id);
    out += value * c;
    return out;
  }

  /// Evaluates with `value(id)` for every symbol.
  Rational evaluate(const std::function<Rational(Symbol)>& value) const {
    Rational out = constant_;
    for (const auto& [id, c] : terms_) out += c * value(id);
    return out;
  }

  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;

 private:
  void add_term(Symbol id, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.try_emplace(id, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  Rational constant_ = 0;
  std::map<Symbol, Rational> terms_;
};

}  // namespace mot
