#pragma once

#include <functional>

namespace finsler {

struct QuadSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 40;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// The panel with the largest |K15 - G7| estimate is bisected until the summed
/// estimate is below max(abs_tol, rel_tol * |result|). A panel that would need
/// splitting beyond `max_depth` bisections raises MaxDepthExceeded, which in
/// practice flags a singular integrand on the path. b < a integrates with the
/// usual sign flip.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadSpec& spec = {});

/// Convenience wrapper returning only the value.
double quad(const std::function<double(double)>& f, double a, double b, const QuadSpec& spec = {});

}  // namespace finsler
