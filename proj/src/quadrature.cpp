#include "finsler/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {
namespace {

// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int depth;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_depth < 1) {
    throw Error(ErrorCode::InvalidParameters, "quadrature tolerances must be positive and max_depth >= 1");
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidParameters, "quadrature limits must be finite");
  }
  if (a == b) return {};

  QuadResult result;
  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod(f, a, b, 0);
  result.evaluations = 15;
  double total = first.value;
  double error = first.error;
  panels.push(first);

  auto converged = [&] {
    return error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  };

  while (!converged()) {
    Panel worst = panels.top();
    if (!std::isfinite(worst.value) || !std::isfinite(worst.error)) {
      throw Error(ErrorCode::MaxDepthExceeded, "non-finite integrand on [" + std::to_string(worst.a) + ", " +
                                                   std::to_string(worst.b) + "]");
    }
    if (worst.depth >= spec.max_depth) {
      throw Error(ErrorCode::MaxDepthExceeded,
                  "refinement depth exhausted near " + std::to_string(0.5 * (worst.a + worst.b)));
    }
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
    const Panel right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum from the panels to shed the drift of the incremental updates.
  total = 0.0;
  error = 0.0;
  std::vector<Panel> all;
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    total += it->value;
    error += it->error;
  }
  if (!std::isfinite(total)) throw Error(ErrorCode::MaxDepthExceeded, "integral is not finite");
  result.value = total;
  result.error = error;
  return result;
}

double quad(const std::function<double(double)>& f, double a, double b, const QuadSpec& spec) {
  return integrate(f, a, b, spec).value;
}

}  // namespace finsler
