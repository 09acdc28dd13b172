#include "finsler/curvature.hpp"

#include <cmath>
#include <limits>

namespace finsler {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_valid(const PointFrame& f) {
  if (!f.valid) throw Error(ErrorCode::SingularFrame, f.reason.empty() ? "invalid frame" : f.reason);
}

double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

struct Local {
  SprayData spray;
  std::optional<MetricScalars> metric;
};

std::optional<MetricScalars> local_metric(const MetricSpec& spec, const PointFrame& f) {
  if (!spec.has_metric()) return std::nullopt;
  const Jet phi = phi_jet(spec, f.r, f.s, {0, 2});
  return metric_scalars(phi.value(), phi.extract(0, 1), phi.extract(0, 2), f.r, f.s);
}

Local local(const MetricSpec& spec, const PointFrame& f, bool with_metric) {
  require_valid(f);
  Local out{spray(spec, f), std::nullopt};
  if (with_metric) out.metric = local_metric(spec, f);
  return out;
}

const MetricScalars& need_metric(const MetricSpec& spec, const std::optional<MetricScalars>& m) {
  if (!m) throw Error(ErrorCode::MetricUnavailable, spec.name() + " carries no metric function");
  return *m;
}

double weak_berwald_combination(const PointFrame& f, const SprayData& sp) {
  const double w = f.r * f.r - f.s * f.s;
  return (f.n + 1) * (sp.P - f.s * sp.P_s) + w * (sp.Q_s - f.s * sp.Q_ss);
}

Matrix assemble_mean_berwald(const PointFrame& f, const SprayData& sp) {
  const int n = f.n;
  const double s = f.s, u = f.u, r = f.r;
  const double w = r * r - s * s;
  const double a = weak_berwald_combination(f, sp);
  const double b = (n + 1) * (s * s * sp.P_ss + s * sp.P_s - sp.P) +
                   r * r * (s * s * sp.Q_sss + s * sp.Q_ss - sp.Q_s) + 3 * s * s * sp.Q_s -
                   3 * s * s * s * sp.Q_ss - s * s * s * s * sp.Q_sss;
  const double c = (n + 1) * sp.P_ss + 2 * (sp.Q_s - s * sp.Q_ss) + w * sp.Q_sss;
  const Vector& x = f.x;
  const Vector& y = f.y;
  Matrix E = (a / u) * Matrix::Identity(n, n) + (b / (u * u * u)) * y * y.transpose() + (c / u) * x * x.transpose() -
             (c * s / (u * u)) * (x * y.transpose() + y * x.transpose());
  return E;
}

struct RicciParts {
  double R1, R3, R1mag, R3mag;
};

RicciParts ricci_parts(const PointFrame& f, const SprayData& sp) {
  const double r = f.r, s = f.s;
  const double w = r * r - s * s;
  const double P = sp.P, Q = sp.Q;
  const double t1[] = {2 * Q, -(s / r) * sp.P_r, -sp.P_s, 2 * w * sp.P_s * Q, P * P, 2 * s * P * Q};
  const double t3[] = {(2 / r) * sp.Q_r, -sp.Q_ss, -(s / r) * sp.Q_rs, 2 * w * Q * sp.Q_ss, 4 * Q * Q,
                       -w * sp.Q_s * sp.Q_s, -2 * s * Q * sp.Q_s};
  RicciParts out{0, 0, 0, 0};
  for (double t : t1) {
    out.R1 += t;
    out.R1mag += std::abs(t);
  }
  for (double t : t3) {
    out.R3 += t;
    out.R3mag += std::abs(t);
  }
  return out;
}

struct LandsbergMagnitudes {
  double L1, L2;
};

LandsbergMagnitudes landsberg_magnitudes(const PointFrame& f, const MetricScalars& m, const SprayData& sp) {
  const double s = f.s;
  const double w = f.r * f.r - s * s;
  const double phi_u = s * m.phi + w * m.phi_s;
  return {std::abs(3 * m.phi_s * sp.P_ss) + std::abs(m.phi * sp.P_sss) + std::abs(phi_u * sp.Q_sss),
          std::abs(s * m.phi * sp.P_ss) + std::abs(m.phi_s * (sp.P - s * sp.P_s)) +
              std::abs(phi_u * (sp.Q_s - s * sp.Q_ss))};
}

double weak_landsberg_combination(const PointFrame& f, const MetricScalars& m, const LandsbergScalars& ls) {
  const double w = f.r * f.r - f.s * f.s;
  return w * (m.rho0 + w * m.rho3) * ls.L1 + ((f.n + 1) * m.rho0 + 3 * w * m.rho3) * ls.L2;
}

MeanLandsberg assemble_mean_landsberg(const PointFrame& f, const MetricScalars& m, const LandsbergScalars& ls) {
  MeanLandsberg out;
  out.J1 = -0.5 * m.phi * weak_landsberg_combination(f, m, ls);
  out.J2 = -f.s * out.J1;
  out.J = f.x * out.J1 + (f.y / f.u) * out.J2;
  return out;
}

UWData uw_from_local(const MetricSpec& spec, const PointFrame& f, const SprayData& sp) {
  const double r = f.r, s = f.s;
  Jet ls, lr;
  if (spec.has_radial_data()) {
    auto parts = log_phi_partials(spec, r, s, {0, 1});
    ls = parts.ls;
    lr = parts.lr;
  } else {
    if (!spec.has_metric()) throw Error(ErrorCode::MetricUnavailable, spec.name() + " carries no metric function");
    const Jet log_phi = log(phi_jet(spec, r, s, {1, 2}));
    ls = log_phi.d_s();
    lr = log_phi.d_r();
  }
  auto [rj, sj] = Jet::seed(r, s, {0, 1});
  const Jet U = sj + (rj * rj - sj * sj) * ls;
  const Jet W = sj * lr + rj * ls;

  UWData out;
  out.U = U.value();
  out.W = W.value();
  out.p_identity = sp.P - (-sp.Q * out.U + out.W / (2 * r));
  if (std::abs(s) < kSmallS) {
    out.q_identity = kNaN;
  } else {
    const double w = r * r - s * s;
    const double Us = U.extract(0, 1), Ws = W.extract(0, 1);
    const double num = 2 * r * out.U - 2 * r * s - 2 * r * r * out.W + s * w * Ws + s * s * out.W + s * out.U * out.W;
    const double den = 2 * r * s * (out.U * out.U - s * out.U + w * Us);
    out.q_identity = sp.Q - num / den;
  }
  return out;
}

struct RadialWithDerivatives {
  RadialValues<double> v;
  RadialValues<double> d;
};

RadialWithDerivatives radial_with_derivatives(const MetricSpec& spec, double r) {
  auto [rj, sj] = Jet::seed(r, 0.0, {1, 0});
  const auto jets = radial_values(spec, rj);
  auto val = [](const Jet& j) { return j.value(); };
  auto der = [](const Jet& j) { return j.extract(1, 0); };
  return {{val(jets.f1), val(jets.f2), val(jets.c0), val(jets.c1), val(jets.c2), val(jets.g)},
          {der(jets.f1), der(jets.f2), der(jets.c0), der(jets.c1), der(jets.c2), der(jets.g)}};
}

}  // namespace

double PointFrame::root() const { return std::sqrt(std::max(r * r - s * s, 0.0)); }

PointFrame make_frame(const Vector& x, const Vector& y, const FrameGuards& guards) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "x and y must have the same dimension n >= 2");
  }
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::InvalidParameters, "non-finite frame vector");
  PointFrame f;
  f.n = static_cast<int>(x.size());
  f.x = x;
  f.y = y;
  f.r = x.norm();
  f.u = y.norm();
  if (f.r == 0.0 || f.u == 0.0) throw Error(ErrorCode::ZeroVector, "x and y must be nonzero");
  f.s = std::clamp(x.dot(y) / f.u, -f.r, f.r);
  f.valid = f.root() >= guards.radial_margin * f.r;
  if (!f.valid) f.reason = "direction too close to the radial set (sqrt(r^2 - s^2) < margin * r)";
  return f;
}

PointFrame make_frame(const MetricSpec& spec, const Vector& x, const Vector& y, const FrameGuards& guards) {
  PointFrame f = make_frame(x, y, guards);
  if (!f.valid) return f;
  try {
    const SprayData sp = spray(spec, f);
    if (!std::isfinite(sp.P) || !std::isfinite(sp.Q) || !std::isfinite(sp.P_sss) || !std::isfinite(sp.Q_sss)) {
      throw Error(ErrorCode::SingularFrame, "spray is not finite");
    }
    if (spec.has_radial_data()) {
      if (guards.require_metric) check_phi_path(spec, f.r, f.s);
      // U denominator at the frame itself, with the configured guard.
      const auto [num, den] = spec.bryant() ? bryant_u_parts(spec.bryant()->params, f.r, f.s)
                                            : family_u_parts(radial_values(spec, f.r), f.r, f.s);
      if (std::abs(den) < guards.denominator_guard * (std::abs(num) + 1.0)) {
        throw Error(ErrorCode::SingularFrame, "U denominator vanishes");
      }
    }
    if (guards.require_metric && spec.has_metric()) local_metric(spec, f);
  } catch (const Error& e) {
    f.valid = false;
    f.reason = e.what();
  }
  return f;
}

SprayData spray(const MetricSpec& spec, const PointFrame& f) {
  require_valid(f);
  const SprayJets jets = spray_jets(spec, f.r, f.s);
  SprayData out;
  out.P = jets.P.extract(0, 0);
  out.P_s = jets.P.extract(0, 1);
  out.P_ss = jets.P.extract(0, 2);
  out.P_sss = jets.P.extract(0, 3);
  out.P_r = jets.P.extract(1, 0);
  out.Q = jets.Q.extract(0, 0);
  out.Q_s = jets.Q.extract(0, 1);
  out.Q_ss = jets.Q.extract(0, 2);
  out.Q_sss = jets.Q.extract(0, 3);
  out.Q_r = jets.Q.extract(1, 0);
  out.Q_rs = jets.Q.extract(1, 1);
  out.G = f.u * out.P * f.y + f.u * f.u * out.Q * f.x;
  return out;
}

MetricScalars metric_scalars(double phi, double phi_s, double phi_ss, double r, double s) {
  const double w = r * r - s * s;
  const double a = phi - s * phi_s;
  const double h = a + w * phi_ss;
  constexpr double kGuard = 1e-8;
  if (!(phi > 0.0)) throw Error(ErrorCode::NonPositivePhi, "phi must be positive");
  if (std::abs(a) < kGuard * (std::abs(phi) + std::abs(s * phi_s))) {
    throw Error(ErrorCode::SingularFrame, "phi - s phi_s vanishes (degenerate metric)");
  }
  if (std::abs(h) < kGuard * (std::abs(phi) + std::abs(s * phi_s) + std::abs(w * phi_ss))) {
    throw Error(ErrorCode::SingularFrame, "phi - s phi_s + (r^2 - s^2) phi_ss vanishes (degenerate metric)");
  }
  MetricScalars m{phi, phi_s, phi_ss};
  const double t = phi * phi_s - s * phi_s * phi_s - s * phi * phi_ss;
  m.rho0 = 1.0 / (phi * a);
  m.rho1 = (s * phi + w * phi_s) * t / (phi * phi * phi * a * h);
  m.rho2 = -t / (phi * phi * a * h);
  m.rho3 = -phi_ss / (phi * a * h);
  return m;
}

Matrix assemble_metric(const PointFrame& f, const MetricScalars& m) {
  const int n = f.n;
  const double s = f.s, u = f.u;
  const double a = m.phi - s * m.phi_s;
  const Vector& x = f.x;
  const Vector yh = f.y / u;
  return m.phi * a * Matrix::Identity(n, n) + (m.phi_s * m.phi_s + m.phi * m.phi_ss) * x * x.transpose() +
         (s * s * m.phi * m.phi_ss - s * a * m.phi_s) * yh * yh.transpose() +
         (a * m.phi_s - s * m.phi * m.phi_ss) * (x * yh.transpose() + yh * x.transpose());
}

Matrix assemble_inverse_metric(const PointFrame& f, const MetricScalars& m) {
  const int n = f.n;
  const Vector& x = f.x;
  const Vector yh = f.y / f.u;
  return m.rho0 * Matrix::Identity(n, n) + m.rho1 * yh * yh.transpose() +
         m.rho2 * (x * yh.transpose() + yh * x.transpose()) + m.rho3 * x * x.transpose();
}

Matrix metric_tensor(const MetricSpec& spec, const PointFrame& f) {
  require_valid(f);
  const auto m = local_metric(spec, f);
  return assemble_metric(f, need_metric(spec, m));
}

Matrix inverse_metric(const MetricSpec& spec, const PointFrame& f) {
  require_valid(f);
  const auto m = local_metric(spec, f);
  return assemble_inverse_metric(f, need_metric(spec, m));
}

Tensor4 assemble_berwald(const PointFrame& f, const SprayData& sp) {
  const int n = f.n;
  const double s = f.s, u = f.u;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double s2 = s * s, s3 = s2 * s;
  const double P = sp.P, Ps = sp.P_s, Pss = sp.P_ss, Psss = sp.P_sss;
  const double Qs = sp.Q_s, Qss = sp.Q_ss, Qsss = sp.Q_sss;

  const double a_xx = Pss / u;
  const double a_dd = (P - s * Ps) / u;
  const double a_dxy = -s * Pss / (u2);
  const double a_ydx = -s * Pss / (u2);
  const double a_xdx = (Qs - s * Qss) / u;
  const double a_dyy = (s2 * Pss + s * Ps - P) / u3;
  const double a_yyyy = (3 * P - s3 * Psss - 6 * s2 * Pss - 3 * s * Ps) / u5;
  const double a_yyyx = (s2 * Psss + 3 * s * Pss) / u4;
  const double a_yxxx = Psss / u2;
  const double a_yyxx = -(Pss + s * Psss) / u3;
  const double a_xxyy = (s2 * Qsss + s * Qss - Qs) / u3;
  const double a_xxxy = -s * Qsss / u2;
  const double a_xxxx = Qsss / u;
  const double a_xdy = (s2 * Qss - s * Qs) / u2;
  const double a_xyyy = (3 * s * Qs - 3 * s2 * Qss - s3 * Qsss) / u4;

  const Vector& x = f.x;
  const Vector& y = f.y;
  Tensor4 B(n, n, n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const double dij = delta(i, j), dik = delta(i, k), dil = delta(i, l);
          const double djk = delta(j, k), djl = delta(j, l), dkl = delta(k, l);
          double b = 0.0;
          b += a_xx * (dij * x[k] * x[l] + dil * x[j] * x[k] + dik * x[j] * x[l]);
          b += a_dd * (dij * dkl + dik * djl + dil * djk);
          b += a_dxy * (dij * (x[k] * y[l] + x[l] * y[k]) + dik * (x[j] * y[l] + x[l] * y[j]) +
                        dil * (x[j] * y[k] + x[k] * y[j]));
          b += a_ydx * y[i] * (djk * x[l] + djl * x[k] + dkl * x[j]);
          b += a_xdx * x[i] * (djk * x[l] + djl * x[k] + dkl * x[j]);
          b += a_dyy * (dij * y[k] * y[l] + dik * y[j] * y[l] + dil * y[j] * y[k]);
          b += a_dyy * y[i] * (djk * y[l] + djl * y[k] + dkl * y[j]);
          b += a_yyyy * y[i] * y[j] * y[k] * y[l];
          b += a_yyyx * y[i] * (y[j] * y[k] * x[l] + y[j] * y[l] * x[k] + y[k] * y[l] * x[j]);
          b += a_yxxx * y[i] * x[j] * x[k] * x[l];
          b += a_yyxx * y[i] * (y[j] * x[k] * x[l] + y[k] * x[j] * x[l] + y[l] * x[j] * x[k]);
          b += a_xxyy * x[i] * (x[j] * y[k] * y[l] + x[k] * y[j] * y[l] + x[l] * y[j] * y[k]);
          b += a_xxxy * x[i] * (x[j] * x[l] * y[k] + x[j] * x[k] * y[l] + x[k] * x[l] * y[j]);
          b += a_xxxx * x[i] * x[j] * x[k] * x[l];
          b += a_xdy * x[i] * (dkl * y[j] + djl * y[k] + djk * y[l]);
          b += a_xyyy * x[i] * y[j] * y[k] * y[l];
          B(i, j, k, l) = b;
        }
      }
    }
  }
  return B;
}

Tensor4 berwald(const MetricSpec& spec, const PointFrame& f) {
  return assemble_berwald(f, local(spec, f, false).spray);
}

MeanBerwald mean_berwald(const MetricSpec& spec, const PointFrame& f) {
  const Local loc = local(spec, f, false);
  return {assemble_mean_berwald(f, loc.spray), weak_berwald_combination(f, loc.spray)};
}

LandsbergScalars landsberg_scalars(const PointFrame& f, const MetricScalars& m, const SprayData& sp) {
  const double s = f.s;
  const double w = f.r * f.r - s * s;
  const double phi_u = s * m.phi + w * m.phi_s;
  LandsbergScalars ls;
  ls.L1 = 3 * m.phi_s * sp.P_ss + m.phi * sp.P_sss + phi_u * sp.Q_sss;
  ls.L2 = -s * m.phi * sp.P_ss + m.phi_s * (sp.P - s * sp.P_s) + phi_u * (sp.Q_s - s * sp.Q_ss);
  ls.L3 = -s * s * s * ls.L1 + 3 * s * ls.L2;
  ls.L4 = -s * ls.L2;
  ls.L5 = -s * ls.L1;
  ls.L6 = s * s * ls.L1 - ls.L2;
  return ls;
}

Tensor3 assemble_landsberg(const PointFrame& f, double phi, const LandsbergScalars& ls) {
  const int n = f.n;
  const Vector& x = f.x;
  const Vector yh = f.y / f.u;
  Tensor3 L(n, n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        const double djk = delta(j, k), djl = delta(j, l), dkl = delta(k, l);
        double b = 0.0;
        b += ls.L1 * x[j] * x[k] * x[l];
        b += ls.L2 * (x[j] * dkl + x[k] * djl + x[l] * djk);
        b += ls.L3 * yh[j] * yh[k] * yh[l];
        b += ls.L4 * (yh[j] * dkl + yh[k] * djl + yh[l] * djk);
        b += ls.L5 * (yh[j] * x[k] * x[l] + yh[k] * x[j] * x[l] + yh[l] * x[j] * x[k]);
        b += ls.L6 * (x[j] * yh[k] * yh[l] + x[k] * yh[j] * yh[l] + x[l] * yh[j] * yh[k]);
        L(j, k, l) = -0.5 * phi * b;
      }
    }
  }
  return L;
}

Landsberg landsberg(const MetricSpec& spec, const PointFrame& f) {
  const Local loc = local(spec, f, true);
  const MetricScalars& m = need_metric(spec, loc.metric);
  const LandsbergScalars ls = landsberg_scalars(f, m, loc.spray);
  return {assemble_landsberg(f, m.phi, ls), ls};
}

MeanLandsberg mean_landsberg(const MetricSpec& spec, const PointFrame& f) {
  const Local loc = local(spec, f, true);
  const MetricScalars& m = need_metric(spec, loc.metric);
  return assemble_mean_landsberg(f, m, landsberg_scalars(f, m, loc.spray));
}

Ricci ricci(const MetricSpec& spec, const PointFrame& f) {
  const Local loc = local(spec, f, spec.has_metric());
  const RicciParts parts = ricci_parts(f, loc.spray);
  const double w = f.r * f.r - f.s * f.s;
  Ricci out;
  out.R1 = parts.R1;
  out.R3 = parts.R3;
  out.Ric = f.u * f.u * ((f.n - 1) * parts.R1 + w * parts.R3);
  out.K = kNaN;
  if (f.n == 2 && loc.metric) {
    const double F = f.u * loc.metric->phi;
    out.K = out.Ric / (F * F);
  }
  return out;
}

UWData uw(const MetricSpec& spec, const PointFrame& f) {
  const Local loc = local(spec, f, false);
  return uw_from_local(spec, f, loc.spray);
}

std::array<double, 3> flatness_system(const MetricSpec& spec, double r) {
  const auto [v, d] = radial_with_derivatives(spec, r);
  const double r2 = r * r, r3 = r2 * r, r4 = r2 * r2, r6 = r4 * r2;
  const double e1 = 6 * r * v.c1 + r2 * d.c1 + 2 * r3 * v.c1 * v.f1 + 2 * r * v.f1 * v.f2 - d.f2;
  const double e2 = 2 * v.c0 + 2 * r2 * v.c0 * v.f1 + 2 * r2 * v.c2 + 2 * r4 * v.f1 * v.c2 + r2 * v.f1 * v.f1 - v.f1 -
                    r * d.f1;
  const double e3 = 4 * r2 * v.c0 * v.c0 + 2 * v.c0 + 2 * r * d.c0 + 4 * r4 * v.c0 * v.c2 + 2 * r2 * v.c0 * v.f1 -
                    r6 * v.c1 * v.c1 - 2 * r2 * v.c2 - v.f1 + r2 * v.f2 * v.f2;
  return {e1, e2, e3};
}

double flatness_polynomial(const MetricSpec& spec, double r, double s) {
  const auto [v, d] = radial_with_derivatives(spec, r);
  const auto e = flatness_system(spec, r);
  const double r3 = r * r * r, r5 = r3 * r * r;
  const double A3 = -e[0];
  const double A2 = -(4 * r * v.c0 * v.c0 + 2 * d.c0 + 4 * r3 * v.c0 * v.c2 - r5 * v.c1 * v.c1 - 4 * r * v.c2 -
                      2 * r3 * v.c2 * v.f1 - r * v.f1 * v.f1 + d.f1 + r * v.f2 * v.f2);
  const double A1 = -r * r * A3;
  const double A0 = r * e[2];
  const double root = std::sqrt(r * r - s * s);
  return A3 * s * s * s + A2 * s * s * root + A1 * s + A0 * root;
}

ConditionReport residuals(const MetricSpec& spec, const PointFrame& f) { return evaluate(spec, f).residuals; }

CurvaturePack evaluate(const MetricSpec& spec, const PointFrame& f, bool with_metric) {
  const Local loc = local(spec, f, with_metric && spec.has_metric());
  const SprayData& sp = loc.spray;
  const double r = f.r, s = f.s, u = f.u;
  const double w = r * r - s * s;

  CurvaturePack pack;
  pack.frame = f;
  pack.spray = sp;
  pack.B = assemble_berwald(f, sp);
  pack.E = assemble_mean_berwald(f, sp);
  const RicciParts rp = ricci_parts(f, sp);
  pack.R1 = rp.R1;
  pack.R3 = rp.R3;
  pack.Ric = u * u * ((f.n - 1) * rp.R1 + w * rp.R3);

  Scales& sc = pack.scales;
  sc.B = (std::abs(sp.P) + r * std::abs(sp.Q) + r * std::abs(sp.P_s) + r * r * std::abs(sp.P_ss) + r * r * r * std::abs(sp.P_sss) +
          r * r * std::abs(sp.Q_s) + r * r * r * std::abs(sp.Q_ss) + r * r * r * r * std::abs(sp.Q_sss)) /
         u;
  sc.E = (f.n + 1) * sc.B;
  sc.weak_berwald = (f.n + 1) * (std::abs(sp.P) + std::abs(s * sp.P_s)) + w * (std::abs(sp.Q_s) + std::abs(s * sp.Q_ss)) +
                    u * sc.B;
  sc.flat_flag = rp.R1mag + w * rp.R3mag;
  sc.Ric = u * u * ((f.n - 1) * rp.R1mag + w * rp.R3mag);

  ConditionReport& rep = pack.residuals;
  rep.valid = true;
  rep.res_weak_berwald = weak_berwald_combination(f, sp);
  rep.res_flat_flag = rp.R1 + w * rp.R3;
  rep.res_weak_landsberg = kNaN;
  rep.res_landsberg_surface = kNaN;
  if (spec.has_radial_data()) rep.res_flatness_system = flatness_system(spec, r);

  if (loc.metric) {
    const MetricScalars& m = *loc.metric;
    MetricPart mp;
    mp.scalars = m;
    mp.g = assemble_metric(f, m);
    mp.g_inv = assemble_inverse_metric(f, m);
    mp.landsberg = landsberg_scalars(f, m, sp);
    mp.L = assemble_landsberg(f, m.phi, mp.landsberg);
    const MeanLandsberg ml = assemble_mean_landsberg(f, m, mp.landsberg);
    mp.J = ml.J;
    mp.J1 = ml.J1;
    mp.J2 = ml.J2;
    mp.uw = uw_from_local(spec, f, sp);
    mp.K = kNaN;
    if (f.n == 2) {
      const double F = u * m.phi;
      mp.K = pack.Ric / (F * F);
    }

    const LandsbergMagnitudes lm = landsberg_magnitudes(f, m, sp);
    sc.L = 0.5 * std::abs(m.phi) * (r * r * r * lm.L1 + r * lm.L2) + m.phi * m.phi * u * sc.B;
    // The second terms keep the scales meaningful when L1, L2 vanish term by term.
    sc.landsberg_surface = w * lm.L1 + 3 * lm.L2 + sc.L / (std::abs(m.phi) * r);
    sc.J = 0.5 * std::abs(m.phi) * r *
           (w * (std::abs(m.rho0) + w * std::abs(m.rho3)) * lm.L1 +
            ((f.n + 1) * std::abs(m.rho0) + 3 * w * std::abs(m.rho3)) * lm.L2) +
           mp.g_inv.norm() * sc.L;
    sc.g = mp.g.norm();

    rep.res_weak_landsberg = weak_landsberg_combination(f, m, mp.landsberg);
    rep.res_landsberg_surface = w * mp.landsberg.L1 + 3 * mp.landsberg.L2;
    pack.metric = std::move(mp);
  }
  return pack;
}

double frobenius(const Tensor3& t) {
  const Eigen::Tensor<double, 0> n = t.square().sum().sqrt();
  return n();
}

double frobenius(const Tensor4& t) {
  const Eigen::Tensor<double, 0> n = t.square().sum().sqrt();
  return n();
}

}  // namespace finsler
