#include "finsler/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace finsler {

RadialPolynomial RadialPolynomial::derivative() const {
  RadialPolynomial out;
  if (coeffs.empty()) return out;
  if (lowest_power == 0) {
    for (std::size_t k = 1; k < coeffs.size(); ++k) out.coeffs.push_back(static_cast<double>(k) * coeffs[k]);
    return out;
  }
  out.lowest_power = lowest_power - 1;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    out.coeffs.push_back(static_cast<double>(lowest_power + static_cast<int>(k)) * coeffs[k]);
  }
  return out;
}

bool RadialPolynomial::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

bool RadialPolynomial::all_finite() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return std::isfinite(c); });
}

std::string MetricSpec::name() const {
  struct Visitor {
    std::string operator()(const PhiForm& p) const { return p.name; }
    std::string operator()(const SprayForm& p) const { return p.name; }
    std::string operator()(const Euclidean&) const { return "euclidean"; }
    std::string operator()(const RiemannQuadratic&) const { return "riemann_quadratic"; }
    std::string operator()(const Family&) const { return "family"; }
    std::string operator()(const Bryant&) const { return "bryant"; }
  };
  return std::visit(Visitor{}, v_);
}

MetricSpec euclidean() { return MetricSpec(Euclidean{}); }

MetricSpec riemann_quadratic() { return MetricSpec(RiemannQuadratic{}); }

MetricSpec family(FamilyParams params) {
  for (const auto* poly : {&params.f1, &params.f2, &params.c0, &params.c1, &params.c2, &params.g_offset}) {
    if (!poly->all_finite()) throw Error(ErrorCode::InvalidParameters, "family coefficients must be finite");
  }
  return MetricSpec(Family{std::move(params)});
}

MetricSpec bryant(BryantParams params) {
  if (!std::isfinite(params.c) || !params.c0.all_finite()) {
    throw Error(ErrorCode::InvalidParameters, "bryant parameters must be finite");
  }
  if (!(params.r_lo > 0.0) || !(params.r_lo < params.r_hi) || !std::isfinite(params.r_hi)) {
    throw Error(ErrorCode::InvalidParameters, "bryant domain must satisfy 0 < r_lo < r_hi");
  }
  // 2 r^2 c0(r) - 1 must keep one sign on the domain.
  constexpr int kSamples = 1024;
  double first = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = params.r_lo + (params.r_hi - params.r_lo) * i / kSamples;
    const double k = 2.0 * r * r * params.c0(r) - 1.0;
    if (i == 0) first = k;
    if (std::abs(k) < 1e-8 || (k > 0.0) != (first > 0.0)) {
      throw Error(ErrorCode::InvalidParameters,
                  "2 r^2 c0(r) - 1 vanishes in the domain near r = " + std::to_string(r));
    }
  }
  return MetricSpec(Bryant{std::move(params)});
}

MetricSpec phi_form(std::string name, RadialJetFunction phi) {
  return MetricSpec(PhiForm{std::move(name), std::move(phi)});
}

MetricSpec spray_form(std::string name, RadialJetFunction P, RadialJetFunction Q) {
  return MetricSpec(SprayForm{std::move(name), std::move(P), std::move(Q)});
}

QuadSpec phi_quad_spec() { return QuadSpec{1e-13, 1e-13, 40}; }

std::pair<Jet, Jet> spray_from_phi(const Jet& phi, const Jet& r, const Jet& s) {
  const Jet phi_s = phi.d_s();
  const Jet phi_r = phi.d_r();
  const Jet phi_ss = phi_s.d_s();
  const Jet phi_rs = phi_s.d_r();
  const Jet w = r * r - s * s;

  const Jet den = phi - s * phi_s + w * phi_ss;
  const Jet Q = (-phi_r + s * phi_rs + r * phi_ss) / (2.0 * r * den);
  const Jet P = -(s * phi + w * phi_s) * Q / phi + (s * phi_r + r * phi_s) / (2.0 * r * phi);
  return {P, Q};
}

namespace {

constexpr JetCaps kSprayCaps{1, 3};

void check_bryant_domain(const BryantParams& p, double r) {
  if (r < p.r_lo || r > p.r_hi) {
    throw Error(ErrorCode::SingularFrame, "r = " + std::to_string(r) + " outside the bryant domain [" +
                                              std::to_string(p.r_lo) + ", " + std::to_string(p.r_hi) + "]");
  }
}

void check_radial(double r, double s) {
  if (!(r > 0.0) || !(std::abs(s) < r)) {
    throw Error(ErrorCode::SingularFrame, "need r > 0 and |s| < r");
  }
}

// First-order dual number; the (ln a)' integrand is evaluated many times per
// phi value, and a 1x2 jet spends most of its time allocating.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual operator-(Dual a) { return {-a.v, -a.d}; }
Dual operator+(Dual a, double b) { return {a.v + b, a.d}; }
Dual operator+(double a, Dual b) { return {a + b.v, b.d}; }
Dual operator-(Dual a, double b) { return {a.v - b, a.d}; }
Dual operator-(double a, Dual b) { return {a - b.v, -b.d}; }
Dual operator*(Dual a, double b) { return {a.v * b, a.d * b}; }
Dual operator*(double a, Dual b) { return {a * b.v, a * b.d}; }
Dual operator/(Dual a, double b) { return {a.v / b, a.d / b}; }
Dual operator/(double a, Dual b) { return Dual{a, 0.0} / b; }

Dual sqrt(Dual a) {
  const double root = std::sqrt(a.v);
  return {root, 0.5 * a.d / root};
}

Dual pow(Dual a, int k) {
  const double p = std::pow(a.v, k);
  return {p, k * std::pow(a.v, k - 1) * a.d};
}

// dN/ds at s = 0.
double log_a_prime_impl(const MetricSpec& spec, double r) {
  return uw_numerator(spec, Dual{r, 0.0}, Dual{0.0, 1.0}).d;
}

double log_a_impl(const MetricSpec& spec, const BryantParams& p, double r) {
  check_bryant_domain(p, r);
  return quad([&](double t) { return log_a_prime_impl(spec, t); }, p.r_ref(), r, phi_quad_spec());
}

// ln phi(r, s) - ln phi(r, 0) by integrating the closed-form (ln phi)_s.
double log_phi_along_s(const MetricSpec& spec, double r, double s) {
  check_phi_path(spec, r, s);
  return quad([&](double t) { return closed_form_log_phi_s(spec, r, t); }, 0.0, s, phi_quad_spec());
}

// Assembles the ln phi jet from its value, the (ln phi)_s jet (all j >= 1
// coefficients) and the (ln phi)_r jet (the pure r coefficients).
Jet assemble_log_phi(double r, double s, JetCaps caps, double value, const Jet* ls, const Jet* lr) {
  Jet::Coeffs c = Jet::Coeffs::Zero(caps.r_max + 1, caps.s_max + 1);
  c(0, 0) = value;
  for (int i = 0; i <= caps.r_max; ++i) {
    for (int j = 1; j <= caps.s_max; ++j) c(i, j) = ls->coeff(i, j - 1) / j;
  }
  for (int i = 1; i <= caps.r_max; ++i) c(i, 0) = lr->coeff(i - 1, 0) / i;
  return Jet::from_coeffs(r, s, std::move(c));
}

}  // namespace

SprayJets spray_jets(const MetricSpec& spec, double r, double s) {
  check_radial(r, s);
  struct Visitor {
    double r, s;
    const MetricSpec& spec;

    SprayJets operator()(const Euclidean&) const {
      return {Jet::constant(0.0, r, s, kSprayCaps), Jet::constant(0.0, r, s, kSprayCaps)};
    }
    SprayJets operator()(const SprayForm& f) const {
      auto [rj, sj] = Jet::seed(r, s, kSprayCaps);
      return {f.P(rj, sj), f.Q(rj, sj)};
    }
    SprayJets operator()(const Family&) const { return from_radial(); }
    SprayJets operator()(const Bryant& b) const {
      check_bryant_domain(b.params, r);
      return from_radial();
    }
    SprayJets operator()(const RiemannQuadratic&) const { return from_phi(); }
    SprayJets operator()(const PhiForm&) const { return from_phi(); }

    SprayJets from_radial() const {
      auto [rj, sj] = Jet::seed(r, s, kSprayCaps);
      auto [P, Q] = family_spray(radial_values(spec, rj), rj, sj);
      return {P, Q};
    }
    SprayJets from_phi() const {
      const JetCaps caps{2, 5};
      auto [rj, sj] = Jet::seed(r, s, caps);
      auto [P, Q] = spray_from_phi(phi_jet(spec, r, s, caps), rj, sj);
      return {P, Q};
    }
  };
  return std::visit(Visitor{r, s, spec}, spec.variant());
}

Jet phi_jet(const MetricSpec& spec, double r, double s, JetCaps caps) {
  check_radial(r, s);
  struct Visitor {
    double r, s;
    JetCaps caps;
    const MetricSpec& spec;

    Jet operator()(const Euclidean&) const { return Jet::constant(1.0, r, s, caps); }
    Jet operator()(const RiemannQuadratic&) const {
      auto [rj, sj] = Jet::seed(r, s, caps);
      return sqrt(1.0 + sj * sj);
    }
    Jet operator()(const PhiForm& f) const {
      auto [rj, sj] = Jet::seed(r, s, caps);
      Jet phi = f.phi(rj, sj);
      if (!(phi.value() > 0.0) || !phi.all_finite()) {
        throw Error(ErrorCode::NonPositivePhi, f.name + ": phi must be positive and finite");
      }
      return phi;
    }
    Jet operator()(const SprayForm& f) const {
      throw Error(ErrorCode::MetricUnavailable, f.name + " is given by its spray only");
    }
    Jet operator()(const Family&) const {
      const JetCaps s_only{0, caps.s_max};
      const double value = log_phi_along_s(spec, r, s);
      if (caps.s_max == 0) return exp(Jet::constant(value, r, s, s_only));
      auto [rj, sj] = Jet::seed(r, s, JetCaps{0, caps.s_max - 1});
      const Jet ls = closed_form_log_phi_s(spec, rj, sj);
      return exp(assemble_log_phi(r, s, s_only, value, &ls, nullptr));
    }
    Jet operator()(const Bryant& b) const {
      check_bryant_domain(b.params, r);
      const double value = log_phi_along_s(spec, r, s) + log_a_impl(spec, b.params, r);
      auto [rj, sj] = Jet::seed(r, s, JetCaps{caps.r_max, std::max(caps.s_max - 1, 0)});
      const Jet ls = closed_form_log_phi_s(spec, rj, sj);
      const Jet lr = log_phi_partials(spec, r, s, JetCaps{std::max(caps.r_max - 1, 0), 0}).lr;
      return exp(assemble_log_phi(r, s, caps, value, &ls, &lr));
    }
  };
  return std::visit(Visitor{r, s, caps, spec}, spec.variant());
}

LogPhiPartials log_phi_partials(const MetricSpec& spec, double r, double s, JetCaps caps) {
  check_radial(r, s);
  if (!spec.has_radial_data()) {
    throw Error(ErrorCode::MetricUnavailable, "closed-form (ln phi) partials need family or bryant data");
  }
  if (const auto* b = spec.bryant()) check_bryant_domain(b->params, r);

  LogPhiPartials out;
  {
    auto [rj, sj] = Jet::seed(r, s, caps);
    out.ls = closed_form_log_phi_s(spec, rj, sj);
  }
  if (std::abs(s) >= kSmallS) {
    auto [rj, sj] = Jet::seed(r, s, caps);
    out.lr = uw_numerator(spec, rj, sj) / sj;
    return out;
  }
  // N(r, 0) = 0 identically, so N / s is regular at s = 0: expand at s = 0 with
  // spare s orders, drop the s^0 column, and re-centre at s.
  constexpr int kSpare = 8;
  auto [rj, sj] = Jet::seed(r, 0.0, JetCaps{caps.r_max, caps.s_max + kSpare + 1});
  const Jet numerator = uw_numerator(spec, rj, sj);
  const double lead = numerator.coeffs().col(0).cwiseAbs().maxCoeff();
  if (lead > 1e-9 * std::max(1.0, numerator.max_abs_coeff())) {
    throw Error(ErrorCode::SingularFrame, "(ln phi)_r has a pole at s = 0 for this spray");
  }
  out.lr = numerator.deflate_s().recentered_s(s).truncated(caps);
  return out;
}

double phi_value(const MetricSpec& spec, double r, double s) {
  check_radial(r, s);
  struct Visitor {
    double r, s;
    const MetricSpec& spec;

    double operator()(const Euclidean&) const { return 1.0; }
    double operator()(const RiemannQuadratic&) const { return std::sqrt(1.0 + s * s); }
    double operator()(const PhiForm&) const { return phi_jet(spec, r, s, {0, 0}).value(); }
    double operator()(const SprayForm& f) const {
      throw Error(ErrorCode::MetricUnavailable, f.name + " is given by its spray only");
    }
    double operator()(const Family&) const { return std::exp(log_phi_along_s(spec, r, s)); }
    double operator()(const Bryant& b) const {
      return std::exp(log_phi_along_s(spec, r, s) + log_a_impl(spec, b.params, r));
    }
  };
  return std::visit(Visitor{r, s, spec}, spec.variant());
}

double log_a_prime(const BryantParams& params, double r) {
  const MetricSpec spec = bryant(params);
  check_bryant_domain(params, r);
  return log_a_prime_impl(spec, r);
}

double a_of_r(const BryantParams& params, double r) {
  const MetricSpec spec = bryant(params);
  return std::exp(log_a_impl(spec, params, r));
}

double predicted_weak_berwald(const MetricSpec& spec, double r, double s) {
  const auto v = radial_values(spec, r);
  return (v.c1 * r * r + 3.0 * v.f2) * r * r / std::sqrt(r * r - s * s);
}

void check_phi_path(const MetricSpec& spec, double r, double s) {
  check_radial(r, s);
  if (!spec.has_radial_data()) return;

  auto parts = [&](double t) -> std::pair<double, double> {
    if (const auto* b = spec.bryant()) {
      const double k = 2.0 * r * r * b->params.c0(r) - 1.0;
      const double root = std::sqrt(r * r - t * t);
      return {(b->params.c + 1.0) * t - root * k, std::abs((b->params.c + 1.0) * t) + root * std::abs(k)};
    }
    const auto v = radial_values(spec, r);
    const double w = r * r - t * t;
    const double root = std::sqrt(w);
    const double terms[] = {root * (v.f1 * t * t - 2.0 * v.c0 * w + 1.0), v.c1 * r * r * t * t * t, v.f2 * w * t,
                            -v.c1 * r * r * r * r * t};
    double den = 0.0, scale = 0.0;
    for (double term : terms) {
      den += term;
      scale += std::abs(term);
    }
    return {den, scale};
  };

  constexpr int kSamples = 64;
  const double first = parts(0.0).first;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = s * i / kSamples;
    const auto [den, scale] = parts(t);
    if (!(std::abs(den) > kPathMargin * scale) || (den > 0.0) != (first > 0.0)) {
      throw Error(ErrorCode::IntegrandSingularOnPath,
                  "phi integrand denominator vanishes between s = 0 and s = " + std::to_string(s) +
                      " (near t = " + std::to_string(t) + ")");
    }
  }
}

}  // namespace finsler
