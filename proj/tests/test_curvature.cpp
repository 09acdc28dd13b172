#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/config.hpp"
#include "finsler/grid.hpp"

using namespace finsler;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

MetricSpec bryant_c(double c) {
  BryantParams p;
  p.c = c;
  return bryant(p);
}

MetricSpec landsberg_family(double g = 0.0) {
  FamilyParams p;
  p.f1 = p.c0 = p.c1 = p.c2 = RadialPolynomial::constant(0.0);
  p.f2 = RadialPolynomial::constant(1.0);
  p.g_offset = RadialPolynomial::constant(g);
  return family(p);
}

// Random frames with sqrt(r^2 - s^2) > 0.3 r, in dimension n.
std::vector<PointFrame> frames(const MetricSpec& spec, int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PointFrame> out;
  while (static_cast<int>(out.size()) < count) {
    const double r = 0.6 + 1.3 * unit(rng);
    const double sf = 0.05 + 0.85 * unit(rng);
    auto [x, y] = oriented_frame(n, r, sf, 6.28 * unit(rng), unit(rng) - 0.5);
    const Matrix R = random_rotation(n, rng);
    PointFrame f = make_frame(spec, R * x, (0.5 + unit(rng)) * (R * y));
    if (f.valid && f.root() > 0.3 * f.r) out.push_back(std::move(f));
  }
  return out;
}

double rel(double a, double b, double scale = 0.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale, 1e-300});
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("frame construction") {
    PointFrame f = make_frame(vec({1, 0}), vec({0, 1}));
    CHECK(f.r == 1.0);
    CHECK(f.u == 1.0);
    CHECK(f.s == 0.0);
    CHECK(f.valid);

    f = make_frame(vec({1, 0}), vec({2, 0}));
    CHECK(f.s == 1.0);
    CHECK_FALSE(f.valid);

    f = make_frame(vec({3, 4}), vec({0, 2}));
    CHECK(f.r == 5.0);
    CHECK(f.u == 2.0);
    CHECK(f.s == 4.0);

    try {
      (void)make_frame(vec({0, 0}), vec({0, 1}));
      FAIL("expected ZeroVector");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroVector);
    }
  }

  TEST_CASE("euclidean: identity metric, no curvature") {
    const MetricSpec spec = euclidean();
    for (const PointFrame& f : frames(spec, 3, 10, 1)) {
      const CurvaturePack p = evaluate(spec, f);
      CHECK((p.metric->g - Matrix::Identity(3, 3)).norm() == 0.0);
      CHECK((p.metric->g_inv - Matrix::Identity(3, 3)).norm() == 0.0);
      CHECK(frobenius(p.B) == 0.0);
      CHECK(frobenius(p.metric->L) == 0.0);
      CHECK(p.Ric == 0.0);
      CHECK(p.residuals.res_weak_berwald == 0.0);
      CHECK(p.residuals.res_flat_flag == 0.0);
      CHECK(p.metric->uw.U == doctest::Approx(f.s));
      CHECK(p.metric->uw.W == 0.0);
    }
    const PointFrame f2 = make_frame(spec, vec({1, 0}), vec({0, 1}));
    CHECK(ricci(spec, f2).K == 0.0);
  }

  TEST_CASE("riemann quadratic metric by hand") {
    const MetricSpec spec = riemann_quadratic();
    const PointFrame f = make_frame(spec, vec({1, 0}), vec({0, 1}));
    Matrix g(2, 2), gi(2, 2);
    g << 2, 0, 0, 1;
    gi << 0.5, 0, 0, 1;
    CHECK((metric_tensor(spec, f) - g).norm() < 1e-14);
    CHECK((inverse_metric(spec, f) - gi).norm() < 1e-14);
    const SprayData sp = spray(spec, f);
    CHECK(sp.P == doctest::Approx(0.0));
    CHECK(sp.Q == doctest::Approx(0.25));
    for (const PointFrame& h : frames(spec, 3, 10, 2)) {
      CHECK(frobenius(berwald(spec, h)) < 1e-10);
    }
  }

  TEST_CASE("g times its closed-form inverse is the identity") {
    for (const MetricSpec& spec : {riemann_quadratic(), bryant_c(2.0), landsberg_family(), randers(0.3)}) {
      for (int n : {2, 3, 4}) {
        for (const PointFrame& f : frames(spec, n, 5, 3 + n)) {
          const Matrix g = metric_tensor(spec, f);
          CHECK((g * inverse_metric(spec, f) - Matrix::Identity(n, n)).norm() < 1e-10);
          CHECK((g - g.transpose()).norm() < 1e-14 * g.norm());
        }
      }
    }
  }

  TEST_CASE("bryant surface: landsberg, flat, not weakly berwald") {
    for (double c : {-0.5, 0.5, 2.0}) {
      const MetricSpec spec = bryant_c(c);
      for (const PointFrame& f : frames(spec, 2, 20, 4)) {
        const CurvaturePack p = evaluate(spec, f);
        const double w = f.r * f.r - f.s * f.s;
        CHECK(std::abs(p.residuals.res_landsberg_surface) < 1e-9);
        CHECK(std::abs(p.residuals.res_flat_flag) < 1e-9);
        for (double e : *p.residuals.res_flatness_system) CHECK(std::abs(e) < 1e-9);
        CHECK(rel(p.residuals.res_weak_berwald, (3 * c - 1) / std::sqrt(w)) < 1e-10);
        CHECK(std::abs(p.metric->K) < 1e-9);
      }
    }
    const PointFrame f = make_frame(bryant_c(2.0), vec({1, 0}), vec({0, 1}));
    const ConditionReport rep = residuals(bryant_c(2.0), f);
    CHECK(rep.res_weak_berwald == doctest::Approx(5.0));
  }

  TEST_CASE("family sprays are quadratic in y on surfaces") {
    // u sqrt(r^2 - s^2) = |x1 y2 - x2 y1| is linear in y away from the radial set,
    // so B vanishes for n = 2 while the weak-Berwald scalar does not.
    const MetricSpec spec = bryant_c(2.0);
    for (const PointFrame& f : frames(spec, 2, 10, 5)) {
      const CurvaturePack p = evaluate(spec, f);
      CHECK(frobenius(p.B) < 1e-10 * p.scales.B);
      CHECK(std::abs(p.residuals.res_weak_berwald) > 0.5);
    }
    for (const PointFrame& f : frames(spec, 3, 10, 6)) {
      const CurvaturePack p = evaluate(spec, f);
      CHECK(frobenius(p.B) > 1e-3 * p.scales.B);
    }
  }

  TEST_CASE("landsberg family and its g-offset perturbation") {
    const MetricSpec good = landsberg_family();
    for (const PointFrame& f : frames(good, 2, 20, 7)) {
      CHECK(std::abs(residuals(good, f).res_landsberg_surface) < 1e-8);
    }
    const MetricSpec bad = landsberg_family(0.1);
    double worst = 0.0;
    for (const PointFrame& f : frames(bad, 2, 20, 7)) {
      worst = std::max(worst, std::abs(residuals(bad, f).res_landsberg_surface));
    }
    CHECK(worst > 1e-3);
  }

  TEST_CASE("traces and contractions") {
    for (const MetricSpec& spec : {randers(0.3), bryant_c(2.0), landsberg_family()}) {
      for (const PointFrame& f : frames(spec, 3, 5, 8)) {
        const CurvaturePack p = evaluate(spec, f);
        const MetricPart& m = *p.metric;
        Matrix trB = Matrix::Zero(3, 3);
        Vector trL = Vector::Zero(3);
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
              trB(i, j) += p.B(k, i, j, k);
              trL[i] += m.L(i, j, k) * m.g_inv(j, k);
            }
          }
        }
        CHECK((p.E - trB).norm() < 1e-9 * std::max(p.E.norm(), p.scales.E));
        CHECK((m.J - trL).norm() < 1e-9 * std::max(m.J.norm(), p.scales.J));
        CHECK(std::abs(m.J.dot(f.y)) < 1e-12 * std::max(m.J.norm(), p.scales.J) * f.u);
        CHECK((p.E * f.y).norm() < 1e-10 * std::max(p.E.norm(), p.scales.E) * f.u);
        const LandsbergScalars& ls = m.landsberg;
        const double s = f.s;
        CHECK(std::abs(ls.L3 - (-s * s * s * ls.L1 + 3 * s * ls.L2)) <=
              1e-12 * (std::abs(s * s * s * ls.L1) + std::abs(3 * s * ls.L2) + 1e-300));
      }
    }
  }

  TEST_CASE("flatness polynomial identity") {
    FamilyParams p;
    p.f1 = RadialPolynomial({0.3, -0.2});
    p.f2 = RadialPolynomial({0.5, 0.4});
    p.c0 = RadialPolynomial({0.1, 0.05});
    p.c1 = RadialPolynomial({-0.2, 0.1});
    p.c2 = RadialPolynomial({0.2});
    const MetricSpec spec = family(p);
    for (const PointFrame& f : frames(spec, 2, 10, 9)) {
      const Ricci ric = ricci(spec, f);
      const double w = f.r * f.r - f.s * f.s;
      const double lhs = flatness_polynomial(spec, f.r, f.s);
      const double rhs = f.r * std::sqrt(w) * (ric.R1 + w * ric.R3);
      CHECK(rel(lhs, rhs, 1e-12) < 1e-9);
    }
  }

  TEST_CASE("scaling phi by 2") {
    const MetricSpec base = randers(0.3);
    const MetricSpec doubled =
        phi_form("randers x2", [](const Jet&, const Jet& s) { return 2.0 * (sqrt(1.0 + s * s) + 0.3 * s); });
    for (const PointFrame& f : frames(base, 3, 5, 10)) {
      const CurvaturePack a = evaluate(base, f);
      const CurvaturePack b = evaluate(doubled, f);
      CHECK(rel(a.spray.P, b.spray.P, 1e-12) < 1e-12);
      CHECK(rel(a.spray.Q, b.spray.Q, 1e-12) < 1e-12);
      CHECK((a.spray.G - b.spray.G).norm() < 1e-12 * a.spray.G.norm());
      const Tensor4 dB = a.B - b.B;
      CHECK(frobenius(dB) < 1e-12 * frobenius(a.B));
      CHECK((a.E - b.E).norm() < 1e-12 * a.E.norm());
      CHECK((4.0 * a.metric->g - b.metric->g).norm() < 1e-12 * b.metric->g.norm());
    }
  }

  TEST_CASE("homogeneity in y") {
    const MetricSpec spec = randers(0.3);
    for (const PointFrame& f : frames(spec, 3, 5, 11)) {
      const CurvaturePack a = evaluate(spec, f);
      const CurvaturePack b = evaluate(spec, make_frame(spec, f.x, 2.0 * f.y));
      CHECK((a.metric->g - b.metric->g).norm() < 1e-12 * a.metric->g.norm());
      CHECK((4.0 * a.spray.G - b.spray.G).norm() < 1e-12 * b.spray.G.norm());
      const Tensor4 dB = 0.5 * a.B - b.B;
      CHECK(frobenius(dB) < 1e-12 * frobenius(b.B));
    }
  }

  TEST_CASE("singular frames are rejected") {
    const MetricSpec spec = bryant_c(2.0);
    const PointFrame f = make_frame(spec, vec({1, 0}), vec({1, 0}));
    CHECK_FALSE(f.valid);
    try {
      (void)evaluate(spec, f);
      FAIL("expected SingularFrame");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularFrame);
    }
  }
}
