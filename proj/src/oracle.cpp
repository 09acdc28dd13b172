#include "finsler/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace finsler {
namespace {

using Field = std::function<Vector(const Vector& x, const Vector& y)>;

struct Axis {
  bool on_y;
  int index;
};

// Stencil points that hit the singular set surface as one error code.
Field guarded(Field f) {
  return [f = std::move(f)](const Vector& x, const Vector& y) -> Vector {
    try {
      return f(x, y);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::StencilCrossesSingularSet) throw;
      throw Error(ErrorCode::StencilCrossesSingularSet, std::string("stencil point rejected: ") + e.what());
    }
  };
}

Vector central_product(const Field& f, const Vector& x, const Vector& y, const std::vector<Axis>& axes,
                       const std::vector<double>& h) {
  const int k = static_cast<int>(axes.size());
  Vector acc;
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vector xs = x, ys = y;
    int sign = 1;
    for (int m = 0; m < k; ++m) {
      const double step = (mask >> m & 1) ? -h[m] : h[m];
      if (mask >> m & 1) sign = -sign;
      (axes[m].on_y ? ys : xs)[axes[m].index] += step;
    }
    const Vector v = f(xs, ys);
    if (acc.size() == 0) acc = Vector::Zero(v.size());
    acc += sign * v;
  }
  double denom = std::pow(2.0, k);
  for (double hm : h) denom *= hm;
  return acc / denom;
}

Vector partial(const Field& f, const Vector& x, const Vector& y, const std::vector<Axis>& axes, const FdSpec& fd,
               bool exact_field = false) {
  const int k = static_cast<int>(axes.size());
  const double base = std::pow(fd.h_rel, exact_field ? 2.0 / (k + 1) : 1.0 / k);
  std::vector<double> h(k);
  for (int m = 0; m < k; ++m) h[m] = base * (axes[m].on_y ? y.norm() : x.norm());
  const Vector coarse = central_product(f, x, y, axes, h);
  if (!fd.richardson) return coarse;
  for (double& hm : h) hm *= 0.5;
  const Vector fine = central_product(f, x, y, axes, h);
  return (4.0 * fine - coarse) / 3.0;
}

Field F2_field(const MetricSpec& spec) {
  return guarded([&spec](const Vector& x, const Vector& y) {
    const double F = F_value(spec, x, y);
    return Vector::Constant(1, F * F);
  });
}

Field spray_field(const MetricSpec& spec, const FdSpec& fd, OracleMode mode) {
  if (mode == OracleMode::Full) {
    return guarded([&spec, fd](const Vector& x, const Vector& y) { return fd_spray(spec, x, y, fd); });
  }
  return guarded([&spec](const Vector& x, const Vector& y) { return engine_spray(spec, x, y); });
}

void check_inputs(const Vector& x, const Vector& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::DimensionMismatch, "x and y must match, n >= 2");
}

void require_mode(OracleMode mode) {
  if (mode == OracleMode::Off) throw Error(ErrorCode::InvalidParameters, "oracle mode is off");
}

double rel(double d, double na, double nb, double scale) {
  const double denom = std::max({na, nb, scale});
  return denom == 0.0 ? d : d / denom;
}

}  // namespace

std::string_view to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::Off: return "off";
    case OracleMode::Semi: return "semi";
    case OracleMode::Full: return "full";
  }
  return "?";
}

void FdSpec::validate() const {
  if (!(h_rel >= 1e-8 && h_rel <= 1e-2)) throw Error(ErrorCode::InvalidParameters, "h_rel must lie in [1e-8, 1e-2]");
}

double F_value(const MetricSpec& spec, const Vector& x, const Vector& y) {
  const PointFrame f = make_frame(x, y);
  if (!f.valid) throw Error(ErrorCode::SingularFrame, f.reason);
  return f.u * phi_value(spec, f.r, f.s);
}

Vector engine_spray(const MetricSpec& spec, const Vector& x, const Vector& y) {
  return spray(spec, make_frame(x, y)).G;
}

Matrix fd_metric_tensor(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd) {
  check_inputs(x, y);
  fd.validate();
  const int n = static_cast<int>(x.size());
  const Field F2 = F2_field(spec);
  Matrix g(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      g(k, l) = g(l, k) = 0.5 * partial(F2, x, y, {{true, k}, {true, l}}, fd)[0];
    }
  }
  return g;
}

Vector fd_spray(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd) {
  check_inputs(x, y);
  fd.validate();
  const int n = static_cast<int>(x.size());
  const Field F2 = F2_field(spec);
  const Matrix g = fd_metric_tensor(spec, x, y, fd);
  Vector rhs(n);
  for (int l = 0; l < n; ++l) {
    double mixed = 0.0;
    for (int k = 0; k < n; ++k) mixed += partial(F2, x, y, {{false, k}, {true, l}}, fd)[0] * y[k];
    rhs[l] = mixed - partial(F2, x, y, {{false, l}}, fd)[0];
  }
  return 0.25 * g.ldlt().solve(rhs);
}

Tensor4 fd_berwald(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd, OracleMode mode) {
  check_inputs(x, y);
  fd.validate();
  require_mode(mode);
  const int n = static_cast<int>(x.size());
  const Field G = spray_field(spec, fd, mode);
  const bool exact = mode == OracleMode::Semi;
  Tensor4 B(n, n, n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      for (int l = k; l < n; ++l) {
        const Vector d = partial(G, x, y, {{true, j}, {true, k}, {true, l}}, fd, exact);
        const int idx[6][3] = {{j, k, l}, {j, l, k}, {k, j, l}, {k, l, j}, {l, j, k}, {l, k, j}};
        for (int i = 0; i < n; ++i) {
          for (const auto& p : idx) B(i, p[0], p[1], p[2]) = d[i];
        }
      }
    }
  }
  return B;
}

Tensor3 landsberg_identity(const Matrix& g, const Tensor4& B, const Vector& y) {
  const int n = static_cast<int>(y.size());
  const Vector y_low = g * y;
  Tensor3 L(n, n, n);
  L.setZero();
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) L(j, k, l) += -0.5 * y_low[m] * B(m, j, k, l);
      }
    }
  }
  return L;
}

double fd_ricci(const MetricSpec& spec, const Vector& x, const Vector& y, const FdSpec& fd, OracleMode mode) {
  check_inputs(x, y);
  fd.validate();
  require_mode(mode);
  const int n = static_cast<int>(x.size());
  const Field G = spray_field(spec, fd, mode);
  const bool exact = mode == OracleMode::Semi;
  const Vector G0 = G(x, y);

  std::vector<Vector> dx(n), dy(n);
  for (int k = 0; k < n; ++k) {
    dx[k] = partial(G, x, y, {{false, k}}, fd, exact);
    dy[k] = partial(G, x, y, {{true, k}}, fd, exact);
  }
  std::vector<std::vector<Vector>> dxy(n, std::vector<Vector>(n)), dyy(n, std::vector<Vector>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      dxy[j][k] = partial(G, x, y, {{false, j}, {true, k}}, fd, exact);
      if (k >= j) dyy[j][k] = dyy[k][j] = partial(G, x, y, {{true, j}, {true, k}}, fd, exact);
    }
  }

  // Ric = R^m_m with R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}.
  double ric = 0.0;
  for (int m = 0; m < n; ++m) {
    double term = 2.0 * dx[m][m];
    for (int j = 0; j < n; ++j) {
      term -= y[j] * dxy[j][m][m];
      term += 2.0 * G0[j] * dyy[j][m][m];
      term -= dy[j][m] * dy[m][j];
    }
    ric += term;
  }
  return ric;
}

double SigmaCalibrator::observe(const Tensor3& engine, const Tensor3& oracle, double scale) {
  const double ne = frobenius(engine);
  const double no = frobenius(oracle);
  if (!sigma_ && std::max(ne, no) > threshold_ * std::max(scale, 1e-300)) {
    const Tensor3 plus = engine - oracle;
    const Tensor3 minus = engine + oracle;
    sigma_ = frobenius(plus) <= frobenius(minus) ? 1 : -1;
  }
  const double s = sigma_.value_or(1);
  const Tensor3 diff = engine - s * oracle;
  return rel(frobenius(diff), ne, no, scale);
}

double relative_difference(double a, double b, double scale) {
  return rel(std::abs(a - b), std::abs(a), std::abs(b), scale);
}

double relative_difference(const Vector& a, const Vector& b, double scale) {
  return rel((a - b).norm(), a.norm(), b.norm(), scale);
}

double relative_difference(const Matrix& a, const Matrix& b, double scale) {
  return rel((a - b).norm(), a.norm(), b.norm(), scale);
}

double relative_difference(const Tensor3& a, const Tensor3& b, double scale) {
  const Tensor3 d = a - b;
  return rel(frobenius(d), frobenius(a), frobenius(b), scale);
}

double relative_difference(const Tensor4& a, const Tensor4& b, double scale) {
  const Tensor4 d = a - b;
  return rel(frobenius(d), frobenius(a), frobenius(b), scale);
}

}  // namespace finsler
