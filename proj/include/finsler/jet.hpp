#pragma once

/**
 * @file jet.hpp
 * @brief Truncated bivariate Taylor jets in (r, s).
 *
 * A jet stores the Taylor coefficients of a scalar function f(r, s) around a
 * base point (r0, s0):
 *
 *     coeff(i, j) = d^i/dr^i d^j/ds^j f(r0, s0) / (i! j!)
 *
 * for 0 <= i <= r_max and 0 <= j <= s_max. Arithmetic is exact up to the
 * retained orders, so composing elementary operations over the coordinate
 * jets yields every partial derivative the curvature formulas need.
 *
 * @code
 * auto [r, s] = finsler::Jet::seed(2.0, 0.5, {2, 5});
 * auto f = r * r * exp(s);
 * double f_rs = f.extract(1, 1);   // 2 r e^s = 4 e^0.5
 * @endcode
 */

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "finsler/errors.hpp"

namespace finsler {

struct JetCaps {
  int r_max = 2;
  int s_max = 5;

  friend bool operator==(const JetCaps&, const JetCaps&) = default;
};

inline JetCaps min_caps(const JetCaps& a, const JetCaps& b) {
  return {std::min(a.r_max, b.r_max), std::min(a.s_max, b.s_max)};
}

template <typename Scalar>
class BasicJet {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  /// Relative magnitude below which a divisor's value counts as zero.
  static constexpr double kDivisionGuard = 1e-12;

  BasicJet() : BasicJet(Scalar(0), Scalar(0), Scalar(0), JetCaps{0, 0}) {}

  BasicJet(Scalar value, Scalar r0, Scalar s0, JetCaps caps)
      : r0_(r0), s0_(s0), caps_(checked(caps)), c_(Coeffs::Zero(caps.r_max + 1, caps.s_max + 1)) {
    c_(0, 0) = value;
  }

  static BasicJet constant(Scalar value, Scalar r0, Scalar s0, JetCaps caps) {
    return BasicJet(value, r0, s0, caps);
  }

  /// Jets of the coordinate functions r and s at (r0, s0).
  static std::pair<BasicJet, BasicJet> seed(Scalar r0, Scalar s0, JetCaps caps) {
    BasicJet r(r0, r0, s0, caps);
    BasicJet s(s0, r0, s0, caps);
    if (caps.r_max >= 1) r.c_(1, 0) = Scalar(1);
    if (caps.s_max >= 1) s.c_(0, 1) = Scalar(1);
    return {std::move(r), std::move(s)};
  }

  /// Builds a jet directly from Taylor-normalized coefficients.
  static BasicJet from_coeffs(Scalar r0, Scalar s0, Coeffs coeffs) {
    BasicJet out;
    out.r0_ = r0;
    out.s0_ = s0;
    out.caps_ = checked({static_cast<int>(coeffs.rows()) - 1, static_cast<int>(coeffs.cols()) - 1});
    out.c_ = std::move(coeffs);
    return out;
  }

  Scalar value() const { return c_(0, 0); }
  Scalar base_r() const { return r0_; }
  Scalar base_s() const { return s0_; }
  const JetCaps& caps() const { return caps_; }
  const Coeffs& coeffs() const { return c_; }

  Scalar coeff(int i, int j) const {
    check_order(i, j);
    return c_(i, j);
  }

  /// The partial derivative d^i/dr^i d^j/ds^j at the base point.
  Scalar extract(int i, int j) const {
    check_order(i, j);
    return c_(i, j) * factorial(i) * factorial(j);
  }

  BasicJet truncated(JetCaps caps) const {
    if (caps.r_max > caps_.r_max || caps.s_max > caps_.s_max) {
      throw Error(ErrorCode::OrderOutOfRange, "cannot widen a jet by truncation");
    }
    return from_coeffs(r0_, s0_, c_.topLeftCorner(caps.r_max + 1, caps.s_max + 1));
  }

  /// Jet of df/dr; the r cap drops by one.
  BasicJet d_r() const {
    if (caps_.r_max == 0) throw Error(ErrorCode::OrderOutOfRange, "d_r of a jet with r_max = 0");
    Coeffs out(caps_.r_max, caps_.s_max + 1);
    for (int i = 0; i < caps_.r_max; ++i) out.row(i) = Scalar(i + 1) * c_.row(i + 1);
    return from_coeffs(r0_, s0_, std::move(out));
  }

  /// Jet of df/ds; the s cap drops by one.
  BasicJet d_s() const {
    if (caps_.s_max == 0) throw Error(ErrorCode::OrderOutOfRange, "d_s of a jet with s_max = 0");
    Coeffs out(caps_.r_max + 1, caps_.s_max);
    for (int j = 0; j < caps_.s_max; ++j) out.col(j) = Scalar(j + 1) * c_.col(j + 1);
    return from_coeffs(r0_, s0_, std::move(out));
  }

  /// For a jet based at s0 = 0 whose s^0 column vanishes identically, the jet
  /// of f / s. The s^0 column is discarded, so it must be zero analytically.
  BasicJet deflate_s() const {
    if (caps_.s_max == 0) throw Error(ErrorCode::OrderOutOfRange, "deflate_s needs s_max >= 1");
    return from_coeffs(r0_, s0_, Coeffs(c_.rightCols(caps_.s_max)));
  }

  /// Re-expands the truncated polynomial in s around s0 + delta. Coefficients
  /// beyond s_max are unknown, so column j loses accuracy as delta^(s_max-j+1).
  BasicJet recentered_s(Scalar delta) const {
    Coeffs out = Coeffs::Zero(c_.rows(), c_.cols());
    for (int j = 0; j <= caps_.s_max; ++j) {
      for (int k = j; k <= caps_.s_max; ++k) {
        out.col(j) += binomial(k, j) * std::pow(delta, k - j) * c_.col(k);
      }
    }
    return from_coeffs(r0_, s0_ + delta, std::move(out));
  }

  BasicJet operator-() const { return from_coeffs(r0_, s0_, Coeffs(-c_)); }

  BasicJet& operator+=(const BasicJet& b) { return *this = *this + b; }
  BasicJet& operator-=(const BasicJet& b) { return *this = *this - b; }
  BasicJet& operator*=(const BasicJet& b) { return *this = *this * b; }
  BasicJet& operator/=(const BasicJet& b) { return *this = *this / b; }

  friend BasicJet operator+(const BasicJet& a, const BasicJet& b) {
    const JetCaps caps = common_caps(a, b);
    return from_coeffs(a.r0_, a.s0_, Coeffs(block(a, caps) + block(b, caps)));
  }

  friend BasicJet operator-(const BasicJet& a, const BasicJet& b) {
    const JetCaps caps = common_caps(a, b);
    return from_coeffs(a.r0_, a.s0_, Coeffs(block(a, caps) - block(b, caps)));
  }

  // Truncated 2D convolution of the Taylor-normalized coefficients.
  friend BasicJet operator*(const BasicJet& a, const BasicJet& b) {
    const JetCaps caps = common_caps(a, b);
    Coeffs out = Coeffs::Zero(caps.r_max + 1, caps.s_max + 1);
    for (int p = 0; p <= caps.r_max; ++p) {
      for (int q = 0; q <= caps.s_max; ++q) {
        const Scalar apq = a.c_(p, q);
        if (apq == Scalar(0)) continue;
        for (int i = p; i <= caps.r_max; ++i) {
          for (int j = q; j <= caps.s_max; ++j) out(i, j) += apq * b.c_(i - p, j - q);
        }
      }
    }
    return from_coeffs(a.r0_, a.s0_, std::move(out));
  }

  friend BasicJet operator/(const BasicJet& a, const BasicJet& b) {
    const JetCaps caps = common_caps(a, b);
    const Scalar b0 = b.c_(0, 0);
    check_divisor(b);
    Coeffs out = Coeffs::Zero(caps.r_max + 1, caps.s_max + 1);
    for (int i = 0; i <= caps.r_max; ++i) {
      for (int j = 0; j <= caps.s_max; ++j) {
        Scalar acc = a.c_(i, j);
        for (int p = 0; p <= i; ++p) {
          for (int q = 0; q <= j; ++q) {
            if (p == 0 && q == 0) continue;
            acc -= b.c_(p, q) * out(i - p, j - q);
          }
        }
        out(i, j) = acc / b0;
      }
    }
    return from_coeffs(a.r0_, a.s0_, std::move(out));
  }

  friend BasicJet operator+(const BasicJet& a, Scalar b) {
    BasicJet out = a;
    out.c_(0, 0) += b;
    return out;
  }
  friend BasicJet operator+(Scalar a, const BasicJet& b) { return b + a; }
  friend BasicJet operator-(const BasicJet& a, Scalar b) { return a + (-b); }
  friend BasicJet operator-(Scalar a, const BasicJet& b) { return (-b) + a; }
  friend BasicJet operator*(const BasicJet& a, Scalar b) { return from_coeffs(a.r0_, a.s0_, Coeffs(a.c_ * b)); }
  friend BasicJet operator*(Scalar a, const BasicJet& b) { return b * a; }
  friend BasicJet operator/(const BasicJet& a, Scalar b) {
    if (b == Scalar(0)) throw Error(ErrorCode::DivisionNearZero, "division of a jet by zero");
    return from_coeffs(a.r0_, a.s0_, Coeffs(a.c_ / b));
  }
  friend BasicJet operator/(Scalar a, const BasicJet& b) {
    return constant(a, b.r0_, b.s0_, b.caps_) / b;
  }

  /// f(a) for a univariate f given its Taylor coefficients f^(k)(a0)/k! at a0 = value(a).
  /// Orders beyond r_max + s_max cannot contribute and may be omitted.
  BasicJet compose(const std::vector<Scalar>& taylor) const {
    const int order = caps_.r_max + caps_.s_max;
    BasicJet delta = *this;
    delta.c_(0, 0) = Scalar(0);
    const int top = std::min<int>(order, static_cast<int>(taylor.size()) - 1);
    BasicJet out = constant(top >= 0 ? taylor[top] : Scalar(0), r0_, s0_, caps_);
    for (int k = top - 1; k >= 0; --k) out = out * delta + taylor[k];
    return out;
  }

  int total_order() const { return caps_.r_max + caps_.s_max; }

  Scalar max_abs_coeff() const { return c_.cwiseAbs().maxCoeff(); }

  bool all_finite() const { return c_.allFinite(); }

 private:
  static JetCaps checked(JetCaps caps) {
    if (caps.r_max < 0 || caps.s_max < 0) {
      throw Error(ErrorCode::OrderOutOfRange, "jet caps must be nonnegative");
    }
    return caps;
  }

  void check_order(int i, int j) const {
    if (i < 0 || j < 0 || i > caps_.r_max || j > caps_.s_max) {
      throw Error(ErrorCode::OrderOutOfRange,
                  "order (" + std::to_string(i) + ", " + std::to_string(j) + ") outside caps (" +
                      std::to_string(caps_.r_max) + ", " + std::to_string(caps_.s_max) + ")");
    }
  }

  static void check_divisor(const BasicJet& b) {
    using std::abs;
    const Scalar b0 = b.c_(0, 0);
    if (b0 == Scalar(0) || abs(b0) < Scalar(kDivisionGuard) * b.max_abs_coeff()) {
      throw Error(ErrorCode::DivisionNearZero, "divisor value is zero relative to its jet");
    }
  }

  static JetCaps common_caps(const BasicJet& a, const BasicJet& b) {
    if (a.r0_ != b.r0_ || a.s0_ != b.s0_) {
      throw Error(ErrorCode::IncompatibleJets, "jets expanded at different base points");
    }
    return min_caps(a.caps_, b.caps_);
  }

  static auto block(const BasicJet& a, JetCaps caps) {
    return a.c_.topLeftCorner(caps.r_max + 1, caps.s_max + 1);
  }

  static Scalar factorial(int k) {
    Scalar f(1);
    for (int i = 2; i <= k; ++i) f *= Scalar(i);
    return f;
  }

  static Scalar binomial(int n, int k) {
    Scalar b(1);
    for (int i = 1; i <= k; ++i) b = b * Scalar(n - k + i) / Scalar(i);
    return b;
  }

  Scalar r0_;
  Scalar s0_;
  JetCaps caps_;
  Coeffs c_;
};

template <typename Scalar>
BasicJet<Scalar> sqrt(const BasicJet<Scalar>& a) {
  using std::sqrt;
  const Scalar a0 = a.value();
  if (!(a0 > Scalar(0))) throw Error(ErrorCode::SqrtNonPositive, "sqrt of a jet with value <= 0");
  // f^(k)/k! = binom(1/2, k) a0^(1/2 - k)
  std::vector<Scalar> taylor(a.total_order() + 1);
  Scalar binom(1);
  Scalar power = sqrt(a0);
  for (int k = 0; k < static_cast<int>(taylor.size()); ++k) {
    taylor[k] = binom * power;
    binom *= (Scalar(0.5) - Scalar(k)) / Scalar(k + 1);
    power /= a0;
  }
  return a.compose(taylor);
}

template <typename Scalar>
BasicJet<Scalar> exp(const BasicJet<Scalar>& a) {
  using std::exp;
  std::vector<Scalar> taylor(a.total_order() + 1);
  Scalar term = exp(a.value());
  for (int k = 0; k < static_cast<int>(taylor.size()); ++k) {
    taylor[k] = term;
    term /= Scalar(k + 1);
  }
  return a.compose(taylor);
}

template <typename Scalar>
BasicJet<Scalar> log(const BasicJet<Scalar>& a) {
  using std::log;
  const Scalar a0 = a.value();
  if (!(a0 > Scalar(0))) throw Error(ErrorCode::LogNonPositive, "log of a jet with value <= 0");
  std::vector<Scalar> taylor(a.total_order() + 1);
  taylor[0] = log(a0);
  Scalar power(1);
  for (int k = 1; k < static_cast<int>(taylor.size()); ++k) {
    power /= a0;
    taylor[k] = ((k % 2 == 1) ? Scalar(1) : Scalar(-1)) * power / Scalar(k);
  }
  return a.compose(taylor);
}

template <typename Scalar>
BasicJet<Scalar> pow(const BasicJet<Scalar>& a, int exponent) {
  if (exponent < 0) return Scalar(1) / pow(a, -exponent);
  BasicJet<Scalar> result = BasicJet<Scalar>::constant(Scalar(1), a.base_r(), a.base_s(), a.caps());
  BasicJet<Scalar> base = a;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

using Jet = BasicJet<double>;

enum class JetOp { Add, Sub, Mul, Div, Neg, Sqrt, Exp, PowInt };

/// Uniform entry point over the elementary jet operations. Binary operations
/// require `b`; `exponent` is read only by PowInt.
template <typename Scalar>
BasicJet<Scalar> elementary(JetOp op, const BasicJet<Scalar>& a,
                            const std::optional<BasicJet<Scalar>>& b = std::nullopt, int exponent = 2) {
  auto rhs = [&]() -> const BasicJet<Scalar>& {
    if (!b) throw Error(ErrorCode::InvalidParameters, "binary jet operation without second operand");
    return *b;
  };
  switch (op) {
    case JetOp::Add: return a + rhs();
    case JetOp::Sub: return a - rhs();
    case JetOp::Mul: return a * rhs();
    case JetOp::Div: return a / rhs();
    case JetOp::Neg: return -a;
    case JetOp::Sqrt: return sqrt(a);
    case JetOp::Exp: return exp(a);
    case JetOp::PowInt: return pow(a, exponent);
  }
  throw Error(ErrorCode::InvalidParameters, "unknown jet operation");
}

}  // namespace finsler
