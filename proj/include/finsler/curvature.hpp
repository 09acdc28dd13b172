#pragma once

/**
 * @file curvature.hpp
 * @brief Closed-form curvature of spherically symmetric Finsler metrics.
 *
 * All tensors are evaluated at a point-direction frame (x, y) in R^n from the
 * scalar data phi, P, Q and their partials in (r, s). Index conventions follow
 * the usual ones: B^i_jkl is stored as B(i, j, k, l), L_jkl as L(j, k, l).
 */

#include <array>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/CXX11/Tensor>

#include "finsler/metric.hpp"

namespace finsler {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Tensor3 = Eigen::Tensor<double, 3>;
using Tensor4 = Eigen::Tensor<double, 4>;

struct FrameGuards {
  /// Frames with sqrt(r^2 - s^2) < radial_margin * r are on the singular set.
  double radial_margin = 0.02;
  /// Denominators smaller than this times their own term magnitude are singular.
  double denominator_guard = 1e-8;
  /// When false, a frame only needs a finite spray (metric degeneracy is allowed).
  bool require_metric = true;
};

struct PointFrame {
  int n = 0;
  Vector x;
  Vector y;
  double r = 0.0;
  double u = 0.0;
  double s = 0.0;
  bool valid = false;
  std::string reason;

  /// sqrt(r^2 - s^2), clamped at zero.
  double root() const;
};

/// Geometry-only frame: r, u, s and the radial-set guard.
PointFrame make_frame(const Vector& x, const Vector& y, const FrameGuards& guards = {});

/// Frame validated against the metric as well (domain, phi integration path,
/// family denominators).
PointFrame make_frame(const MetricSpec& spec, const Vector& x, const Vector& y, const FrameGuards& guards = {});

struct SprayData {
  double P = 0, P_s = 0, P_ss = 0, P_sss = 0, P_r = 0;
  double Q = 0, Q_s = 0, Q_ss = 0, Q_sss = 0, Q_r = 0, Q_rs = 0;
  Vector G;
};

struct MetricScalars {
  double phi = 1, phi_s = 0, phi_ss = 0;
  double rho0 = 0, rho1 = 0, rho2 = 0, rho3 = 0;
};

struct LandsbergScalars {
  double L1 = 0, L2 = 0, L3 = 0, L4 = 0, L5 = 0, L6 = 0;
};

struct UWData {
  double U = 0, W = 0;
  /// P - (-Q U + W / (2r)).
  double p_identity = 0;
  /// Q minus its expression through U, W, U_s, W_s; NaN when |s| is too small.
  double q_identity = 0;
};

/// Magnitudes of the terms entering each quantity before cancellation; used
/// to turn absolute residuals into relative ones.
struct Scales {
  double B = 0, E = 0, L = 0, J = 0, Ric = 0, g = 0, weak_berwald = 0, landsberg_surface = 0, flat_flag = 0;
};

struct ConditionReport {
  bool valid = false;
  double res_weak_berwald = 0;
  double res_weak_landsberg = 0;
  double res_landsberg_surface = 0;
  double res_flat_flag = 0;
  /// The reduced three-equation flatness system; only for family-form sprays.
  std::optional<std::array<double, 3>> res_flatness_system;
};

/// The metric-dependent part of a curvature pack.
struct MetricPart {
  MetricScalars scalars;
  Matrix g;
  Matrix g_inv;
  Tensor3 L;
  Vector J;
  LandsbergScalars landsberg;
  double J1 = 0, J2 = 0;
  UWData uw;
  double K = 0;
};

struct CurvaturePack {
  PointFrame frame;
  SprayData spray;
  Tensor4 B;
  Matrix E;
  double R1 = 0, R3 = 0, Ric = 0;
  std::optional<MetricPart> metric;
  ConditionReport residuals;
  Scales scales;
};

// Individual operations. Each throws SingularFrame on an invalid frame.
SprayData spray(const MetricSpec& spec, const PointFrame& f);
Matrix metric_tensor(const MetricSpec& spec, const PointFrame& f);
Matrix inverse_metric(const MetricSpec& spec, const PointFrame& f);
Tensor4 berwald(const MetricSpec& spec, const PointFrame& f);

struct MeanBerwald {
  Matrix E;
  /// (n+1)(P - s P_s) + (r^2 - s^2)(Q_s - s Q_ss).
  double weak_berwald = 0;
};
MeanBerwald mean_berwald(const MetricSpec& spec, const PointFrame& f);

struct Landsberg {
  Tensor3 L;
  LandsbergScalars scalars;
};
Landsberg landsberg(const MetricSpec& spec, const PointFrame& f);

struct MeanLandsberg {
  Vector J;
  double J1 = 0, J2 = 0;
};
MeanLandsberg mean_landsberg(const MetricSpec& spec, const PointFrame& f);

struct Ricci {
  double Ric = 0;
  double R1 = 0, R3 = 0;
  /// Ric / F^2, for n = 2 only (NaN otherwise or without a metric).
  double K = 0;
};
Ricci ricci(const MetricSpec& spec, const PointFrame& f);

UWData uw(const MetricSpec& spec, const PointFrame& f);

ConditionReport residuals(const MetricSpec& spec, const PointFrame& f);

/// Everything at once, sharing the jet evaluations. With `with_metric` false
/// only the spray part is filled (metric stays empty, metric residuals NaN).
CurvaturePack evaluate(const MetricSpec& spec, const PointFrame& f, bool with_metric = true);

// Assembly from scalars, exposed for tests and the oracle.
Tensor4 assemble_berwald(const PointFrame& f, const SprayData& sp);
Matrix assemble_metric(const PointFrame& f, const MetricScalars& m);
Matrix assemble_inverse_metric(const PointFrame& f, const MetricScalars& m);
MetricScalars metric_scalars(double phi, double phi_s, double phi_ss, double r, double s);
LandsbergScalars landsberg_scalars(const PointFrame& f, const MetricScalars& m, const SprayData& sp);
Tensor3 assemble_landsberg(const PointFrame& f, double phi, const LandsbergScalars& ls);

/// The reduced flatness system for family-form sprays at radius r.
std::array<double, 3> flatness_system(const MetricSpec& spec, double r);

/// The flatness polynomial A3 s^3 + A2 s^2 sqrt(r^2 - s^2) + A1 s + A0 sqrt(r^2 - s^2),
/// which equals r sqrt(r^2 - s^2) (R1 + (r^2 - s^2) R3) for family sprays.
double flatness_polynomial(const MetricSpec& spec, double r, double s);

double frobenius(const Tensor3& t);
double frobenius(const Tensor4& t);

}  // namespace finsler
