#pragma once

/**
 * @file oracle.hpp
 * @brief Finite-difference recomputation of sprays and curvatures from F.
 *
 * Nothing here uses the closed-form curvature formulas. In Semi mode the
 * engine's G^i is differentiated numerically; in Full mode G^i itself comes
 * from finite differences of F^2, so only phi(r, s) is trusted.
 *
 * Steps: a k-th order derivative of F^2, or of the finite-difference spray,
 * uses h = h_rel^(1/k) times the coordinate scale (u for y-directions, r for
 * x-directions). The engine spray carries only rounding noise, so Semi mode
 * differentiates it with the smaller h_rel^(2/(k+1)). One Richardson level.
 */

#include <functional>
#include <optional>
#include <string_view>

#include "finsler/curvature.hpp"

namespace finsler {

enum class OracleMode { Off, Semi, Full };

std::string_view to_string(OracleMode mode);

struct FdSpec {
  double h_rel = 1e-5;
  bool richardson = true;

  void validate() const;
};

/// F = u phi(r, s). Throws SingularFrame on the radial set.
double F_value(const MetricSpec& spec, const Vector& x, const Vector& y);

/// Engine G^i at (x, y); the differentiated quantity in Semi mode.
Vector engine_spray(const MetricSpec& spec, const Vector& x, const Vector& y);

/// g_ij as the Hessian of F^2 / 2 in y.
Matrix fd_metric_tensor(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd = {});

/// G^i = 1/4 g^il ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}).
Vector fd_spray(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd = {});

/// Third y-derivatives of G^i, from the engine spray (Semi) or fd_spray (Full).
Tensor4 fd_berwald(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd = {},
                   OracleMode mode = OracleMode::Semi);

/// -1/2 y_m B^m_jkl with y_m = g_mi y^i.
Tensor3 landsberg_identity(const Matrix& g, const Tensor4& B, const Vector& y);

/// Trace of the spray curvature R^i_k.
double fd_ricci(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd = {},
                OracleMode mode = OracleMode::Semi);

/// Fixes the sign relating the engine Landsberg tensor to landsberg_identity
/// on the first informative frame, then holds every later frame to it.
class SigmaCalibrator {
 public:
  explicit SigmaCalibrator(double threshold = 1e-2) : threshold_(threshold) {}

  /// Relative mismatch ||engine - sigma * oracle|| / max(..., scale). Before
  /// calibration (and for frames below threshold) sigma = +1 is assumed.
  double observe(const Tensor3& engine, const Tensor3& oracle, double scale);

  std::optional<int> sigma() const { return sigma_; }

 private:
  double threshold_;
  std::optional<int> sigma_;
};

/// ||a - b|| / max(||a||, ||b||, scale); zero when all three vanish.
double relative_difference(double a, double b, double scale = 0.0);
double relative_difference(const Vector& a, const Vector& b, double scale = 0.0);
double relative_difference(const Matrix& a, const Matrix& b, double scale = 0.0);
double relative_difference(const Tensor3& a, const Tensor3& b, double scale = 0.0);
double relative_difference(const Tensor4& a, const Tensor4& b, double scale = 0.0);

}  // namespace finsler
