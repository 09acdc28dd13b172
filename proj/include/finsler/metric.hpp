#pragma once

/**
 * @file metric.hpp
 * @brief Spherically symmetric metrics F = u * phi(r, s) and their sprays.
 *
 * A metric is described either by phi(r, s) or directly by the spray scalars
 * P(r, s), Q(r, s) of G^i = u P y^i + u^2 Q x^i. Everything here evaluates on
 * Taylor jets so the curvature formulas can pull exact partials.
 *
 * Conventions: r = |x|, u = |y|, s = <x, y> / |y|.
 */

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "finsler/jet.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

/// Laurent polynomial sum_k coeffs[k] * r^(lowest_power + k).
struct RadialPolynomial {
  std::vector<double> coeffs;
  int lowest_power = 0;

  RadialPolynomial() = default;
  RadialPolynomial(std::vector<double> c, int lowest = 0) : coeffs(std::move(c)), lowest_power(lowest) {}

  static RadialPolynomial constant(double value) { return RadialPolynomial({value}); }
  static RadialPolynomial monomial(double coeff, int power) { return RadialPolynomial({coeff}, power); }

  template <typename T>
  T operator()(const T& r) const {
    // Horner over the nonnegative part, then scale by r^lowest_power.
    T acc = r * 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
    if (lowest_power == 0) return acc;
    using std::pow;
    return acc * pow(r, lowest_power);
  }

  RadialPolynomial derivative() const;
  bool is_zero() const;
  bool all_finite() const;
};

/// Spray family P = f1 s + f2 sqrt(r^2 - s^2) + g, Q = c0 + c2 s^2 + c1 s sqrt(r^2 - s^2) + g.
/// g_offset is the joint perturbation under which the family stops being Landsberg.
struct FamilyParams {
  RadialPolynomial f1, f2, c0, c1, c2, g_offset;
};

/// The flat, Landsberg surface built from the picked solution of the flatness system.
struct BryantParams {
  double c = 2.0;
  RadialPolynomial c0 = RadialPolynomial::constant(0.0);
  double r_lo = 0.5;
  double r_hi = 2.0;

  double r_ref() const { return 0.5 * (r_lo + r_hi); }
};

using RadialJetFunction = std::function<Jet(const Jet& r, const Jet& s)>;

struct PhiForm {
  std::string name;
  RadialJetFunction phi;
};

struct SprayForm {
  std::string name;
  RadialJetFunction P;
  RadialJetFunction Q;
};

struct Euclidean {};
struct RiemannQuadratic {};
struct Family {
  FamilyParams params;
};
struct Bryant {
  BryantParams params;
};

/// Radial coefficient functions f1, f2, c0, c1, c2, g of the family form.
template <typename T>
struct RadialValues {
  T f1, f2, c0, c1, c2, g;
};

class MetricSpec {
 public:
  using Variant = std::variant<PhiForm, SprayForm, Euclidean, RiemannQuadratic, Family, Bryant>;

  MetricSpec(Variant v) : v_(std::move(v)) {}

  const Variant& variant() const { return v_; }
  std::string name() const;

  /// phi is available (possibly only along s at fixed r, see has_radial_metric()).
  bool has_metric() const { return !std::holds_alternative<SprayForm>(v_); }

  /// phi is a genuine function of (r, s), so x-derivatives of F are meaningful.
  /// False for Family: its phi is recovered along s with phi(r, 0) = 1.
  bool has_radial_metric() const { return has_metric() && !std::holds_alternative<Family>(v_); }

  /// The spray is given in closed family form with radial coefficient functions.
  bool has_radial_data() const {
    return std::holds_alternative<Family>(v_) || std::holds_alternative<Bryant>(v_);
  }

  const Family* family() const { return std::get_if<Family>(&v_); }
  const Bryant* bryant() const { return std::get_if<Bryant>(&v_); }

 private:
  Variant v_;
};

MetricSpec euclidean();
MetricSpec riemann_quadratic();
MetricSpec family(FamilyParams params);
MetricSpec bryant(BryantParams params);
MetricSpec phi_form(std::string name, RadialJetFunction phi);
MetricSpec spray_form(std::string name, RadialJetFunction P, RadialJetFunction Q);

// ---------------------------------------------------------------------------
// Closed forms, templated so they run on double and on Jet.

template <typename T>
RadialValues<T> bryant_radial(const BryantParams& p, const T& r) {
  const T c0 = p.c0(r);
  const T c0p = p.c0.derivative()(r);
  const T r2 = r * r;
  const T r4 = r2 * r2;
  RadialValues<T> out{-1.0 / r2, p.c / r2, c0, -1.0 / r4, c0, r * 0.0};
  out.c2 = -(4.0 * r4 * c0 * c0 + 2.0 * r2 * r * c0p + p.c * p.c) / (2.0 * r4 * (2.0 * r2 * c0 - 1.0));
  return out;
}

template <typename T>
RadialValues<T> family_radial(const FamilyParams& p, const T& r) {
  return {p.f1(r), p.f2(r), p.c0(r), p.c1(r), p.c2(r), p.g_offset(r)};
}

template <typename T>
RadialValues<T> radial_values(const MetricSpec& spec, const T& r) {
  if (const auto* f = spec.family()) return family_radial(f->params, r);
  if (const auto* b = spec.bryant()) return bryant_radial(b->params, r);
  throw Error(ErrorCode::MetricUnavailable, spec.name() + " has no radial family data");
}

template <typename T>
std::pair<T, T> family_spray(const RadialValues<T>& v, const T& r, const T& s) {
  using std::sqrt;
  const T root = sqrt(r * r - s * s);
  return {v.f1 * s + v.f2 * root + v.g, v.c0 + v.c2 * s * s + v.c1 * s * root + v.g};
}

/// Numerator and denominator of U for the family spray.
template <typename T>
std::pair<T, T> family_u_parts(const RadialValues<T>& v, const T& r, const T& s) {
  using std::sqrt;
  const T r2 = r * r;
  const T w = r2 - s * s;
  const T root = sqrt(w);
  const T num = s * root * (r2 * v.f1 + 1.0) + 2.0 * r2 * v.f2 * w;
  const T den = root * (v.f1 * s * s - 2.0 * v.c0 * w + 1.0) + v.c1 * r2 * s * s * s + v.f2 * w * s -
                v.c1 * r2 * r2 * s;
  return {num, den};
}

/// U for the picked solution, in its simplified printed form.
template <typename T>
std::pair<T, T> bryant_u_parts(const BryantParams& p, const T& r, const T& s) {
  using std::sqrt;
  const T k = 2.0 * r * r * p.c0(r) - 1.0;
  return {2.0 * p.c * r * r, (p.c + 1.0) * s - sqrt(r * r - s * s) * k};
}

template <typename T>
T closed_form_u(const MetricSpec& spec, const T& r, const T& s) {
  if (const auto* b = spec.bryant()) {
    auto [num, den] = bryant_u_parts(b->params, r, s);
    return num / den;
  }
  auto [num, den] = family_u_parts(radial_values(spec, r), r, s);
  return num / den;
}

/// (ln phi)_s = (U - s) / (r^2 - s^2).
template <typename T>
T closed_form_log_phi_s(const MetricSpec& spec, const T& r, const T& s) {
  return (closed_form_u(spec, r, s) - s) / (r * r - s * s);
}

/// The U/W numerator N = W - r (U - s) / (r^2 - s^2) with W = 2 r (P + U Q);
/// (ln phi)_r = N / s.
template <typename T>
T uw_numerator(const MetricSpec& spec, const T& r, const T& s) {
  const auto v = radial_values(spec, r);
  const auto [P, Q] = family_spray(v, r, s);
  const T U = closed_form_u(spec, r, s);
  const T W = 2.0 * r * (P + U * Q);
  return W - r * (U - s) / (r * r - s * s);
}

// ---------------------------------------------------------------------------

/// P and Q from phi by the metric-to-spray formulas. `phi` must be expanded at
/// the same point as the coordinate jets; outputs lose one r order and two s
/// orders relative to phi.
std::pair<Jet, Jet> spray_from_phi(const Jet& phi, const Jet& r, const Jet& s);

struct SprayJets {
  Jet P;
  Jet Q;
};

/// Jets of P and Q at (r, s), carrying at least (1, 3) orders. Spray-form and
/// family specs evaluate directly; phi-form specs go through spray_from_phi.
SprayJets spray_jets(const MetricSpec& spec, double r, double s);

/// Jet of phi at (r, s). Family specs return r_max = 0 (phi is only defined
/// along s, normalized by phi(r, 0) = 1).
Jet phi_jet(const MetricSpec& spec, double r, double s, JetCaps caps = {});

/// Jets of (ln phi)_s and (ln phi)_r for Family and Bryant specs, from the
/// closed-form U and the U/W relations. The (ln phi)_r jet is expanded around
/// s = 0 and re-centred when |s| is below `small_s`.
struct LogPhiPartials {
  Jet ls;
  Jet lr;
};
LogPhiPartials log_phi_partials(const MetricSpec& spec, double r, double s, JetCaps caps);

/// phi(r, s) alone; cheaper than phi_jet for oracles that only need F.
double phi_value(const MetricSpec& spec, double r, double s);

/// (ln a)'(r) for the Bryant surface: the s -> 0 limit of N / s, i.e. dN/ds at s = 0.
double log_a_prime(const BryantParams& params, double r);

/// a(r) = phi(r, 0), normalized by a(r_ref) = 1 with r_ref the domain midpoint.
double a_of_r(const BryantParams& params, double r);

/// The weak-Berwald combination predicted for the family,
/// (c1 r^2 + 3 f2) r^2 / sqrt(r^2 - s^2).
double predicted_weak_berwald(const MetricSpec& spec, double r, double s);

/// Throws IntegrandSingularOnPath if the phi integrand denominator gets close
/// to zero on the straight path from 0 to s at fixed r.
void check_phi_path(const MetricSpec& spec, double r, double s);

/// Relative size below which a sampled path denominator counts as singular.
inline constexpr double kPathMargin = 1e-3;

/// |s| below which (ln phi)_r is computed from the s = 0 expansion.
inline constexpr double kSmallS = 1e-3;

QuadSpec phi_quad_spec();

}  // namespace finsler
