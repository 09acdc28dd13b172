#include <doctest.h>

#include <cmath>

#include "finsler/curvature.hpp"

using namespace finsler;

namespace {

MetricSpec landsberg_family() {
  FamilyParams p;
  p.f1 = p.c0 = p.c1 = p.c2 = p.g_offset = RadialPolynomial::constant(0.0);
  p.f2 = RadialPolynomial::constant(1.0);
  return family(p);
}

MetricSpec bryant_c(double c, std::vector<double> c0 = {0.0}, double r_hi = 2.0) {
  BryantParams p;
  p.c = c;
  p.c0 = RadialPolynomial(std::move(c0));
  p.r_hi = r_hi;
  return bryant(p);
}

PointFrame frame_at(const MetricSpec& spec, double r, double s) {
  // unit y with <x, y> = s
  Vector x(2), y(2);
  x << r, 0.0;
  y << s / r, std::sqrt(1.0 - s * s / (r * r));
  return make_frame(spec, x, y);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// (ln phi)_r from (1/s)(W - r(U - s)/(r^2 - s^2)), W = 2r(P + U Q), at a finite s.
double log_phi_r_direct(const MetricSpec& spec, double r, double s) {
  const double U = closed_form_u(spec, r, s);
  const SprayJets sp = spray_jets(spec, r, s);
  const double W = 2 * r * (sp.P.value() + U * sp.Q.value());
  return (W - r * (U - s) / (r * r - s * s)) / s;
}

}  // namespace

TEST_SUITE("metric") {
  TEST_CASE("euclidean") {
    CHECK(phi_jet(euclidean(), 1.0, 0.5).value() == 1.0);
    CHECK(phi_jet(euclidean(), 1.0, 0.5).max_abs_coeff() == 1.0);
    const SprayData sp = spray(euclidean(), frame_at(euclidean(), 1.3, 0.4));
    CHECK(sp.P == 0.0);
    CHECK(sp.Q == 0.0);
  }

  TEST_CASE("riemann quadratic spray") {
    const MetricSpec spec = riemann_quadratic();
    for (double r : {0.6, 1.0, 1.7}) {
      for (double sf : {0.1, 0.5, 0.8}) {
        const SprayData sp = spray(spec, frame_at(spec, r, sf * r));
        CHECK(std::abs(sp.P) < 1e-12);
        CHECK(rel(sp.Q, 1.0 / (2 * (1 + r * r))) < 1e-10);
      }
    }
  }

  TEST_CASE("landsberg family examples") {
    const MetricSpec spec = landsberg_family();
    const PointFrame f = frame_at(spec, 1.0, 0.0);
    const SprayData sp = spray(spec, f);
    CHECK(sp.P == doctest::Approx(1.0));
    CHECK(sp.Q == doctest::Approx(0.0));
    CHECK(uw(spec, f).U == doctest::Approx(2.0));
    CHECK(closed_form_u(spec, 1.0, 0.0) == doctest::Approx(2.0));
    const double w = 1.0;
    const double combo = 3 * (sp.P - f.s * sp.P_s) + w * (sp.Q_s - f.s * sp.Q_ss);
    CHECK(combo == doctest::Approx(3.0));
    CHECK(predicted_weak_berwald(spec, 1.0, 0.0) == doctest::Approx(3.0));
  }

  TEST_CASE("bryant examples") {
    const MetricSpec spec = bryant_c(2.0);
    const PointFrame f = frame_at(spec, 1.0, 0.0);
    const SprayData sp = spray(spec, f);
    CHECK(sp.P == doctest::Approx(2.0));
    CHECK(sp.Q == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(radial_values(spec, 1.0).c2 == doctest::Approx(2.0));
    CHECK(closed_form_u(spec, 1.0, 0.0) == doctest::Approx(4.0));
    CHECK(uw(spec, f).U == doctest::Approx(4.0));

    const MetricSpec third = bryant_c(1.0 / 3.0);
    for (double sf : {0.1, 0.4, 0.8}) {
      const PointFrame g = frame_at(third, 1.2, sf * 1.2);
      CHECK(std::abs(mean_berwald(third, g).weak_berwald) < 1e-12);
    }
  }

  TEST_CASE("bryant (ln phi)_s equals its integrand") {
    const MetricSpec spec = bryant_c(2.0);
    const Jet phi = phi_jet(spec, 1.0, 0.3);
    CHECK(rel(phi.extract(0, 1) / phi.value(), closed_form_log_phi_s(spec, 1.0, 0.3)) < 1e-12);
  }

  TEST_CASE("bryant cross partials of ln phi") {
    // c0 = 0.1 r keeps 2 r^2 c0 - 1 away from zero on [0.5, 1.5]
    for (const auto& c0 : {std::vector<double>{0.0}, std::vector<double>{0.0, 0.1}}) {
      const MetricSpec spec = bryant_c(2.0, c0, 1.5);
      for (double r : {0.6, 1.0, 1.4}) {
        for (double sf : {0.0005, 0.2, 0.6}) {
          const LogPhiPartials lp = log_phi_partials(spec, r, sf * r, {1, 1});
          CHECK(rel(lp.ls.extract(1, 0), lp.lr.extract(0, 1)) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("a(r): normalization, positivity and the s -> 0 limit") {
    BryantParams p;
    const MetricSpec spec = bryant(p);
    CHECK(a_of_r(p, p.r_ref()) == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i <= 15; ++i) {
      const double r = p.r_lo + 0.1 * i;
      CHECK(a_of_r(p, r) > 0.0);
      const double limit = log_a_prime(p, r);
      CHECK(std::isfinite(limit));
      // Linear extrapolation to s = 0 from s = 1e-4 and s = 1e-5.
      const double s1 = 1e-4, s2 = 1e-5;
      const double l1 = log_phi_r_direct(spec, r, s1), l2 = log_phi_r_direct(spec, r, s2);
      const double extrapolated = l2 - s2 * (l1 - l2) / (s1 - s2);
      CHECK(std::abs(extrapolated - limit) < 1e-6 * std::max(1.0, std::abs(limit)));
    }
  }

  TEST_CASE("bryant spray and metric forms agree") {
    for (double c : {-0.5, 0.5, 2.0}) {
      const MetricSpec spec = bryant_c(c);
      for (double r : {0.7, 1.1, 1.8}) {
        for (double sf : {0.1, 0.45, 0.85}) {
          const double s = sf * r;
          const auto [rj, sj] = Jet::seed(r, s, {2, 5});
          const auto [P, Q] = spray_from_phi(phi_jet(spec, r, s), rj, sj);
          const SprayJets direct = spray_jets(spec, r, s);
          const double scale = std::abs(direct.P.value()) + r * r * std::abs(direct.Q.value());
          CHECK(std::abs(P.value() - direct.P.value()) < 1e-8 * scale);
          CHECK(std::abs(Q.value() - direct.Q.value()) * r * r < 1e-8 * scale);
          CHECK(phi_value(spec, r, s) > 0.0);
        }
      }
    }
  }

  TEST_CASE("family U and W identities") {
    FamilyParams p;
    p.f1 = RadialPolynomial({0.2, -0.3});
    p.f2 = RadialPolynomial({0.8, 0.1, 0.2});
    p.c0 = RadialPolynomial({0.1});
    p.c1 = RadialPolynomial({-0.4, 0.0, 0.3});
    p.c2 = RadialPolynomial({0.05, 0.1});
    const MetricSpec spec = family(p);
    int checked = 0;
    for (double r : {0.7, 1.0, 1.3}) {
      for (double sf : {0.1, 0.3, 0.6}) {
        const PointFrame f = frame_at(spec, r, sf * r);
        if (!f.valid) continue;
        const UWData d = uw(spec, f);
        const SprayData sp = spray(spec, f);
        const double scale = std::abs(sp.P) + std::abs(sp.Q * d.U) + std::abs(d.W / (2 * r));
        CHECK(std::abs(d.p_identity) < 1e-10 * scale);
        if (!std::isnan(d.q_identity)) CHECK(std::abs(d.q_identity) < 1e-8 * (std::abs(sp.Q) + 1.0));
        ++checked;
      }
    }
    CHECK(checked > 4);
  }

  TEST_CASE("bryant parameters are validated") {
    BryantParams p;
    p.c0 = RadialPolynomial({0.5});  // 2 r^2 c0 - 1 = r^2 - 1 vanishes at r = 1
    CHECK_THROWS_AS(bryant(p), Error);
    BryantParams q;
    q.r_lo = 2.0;
    q.r_hi = 1.0;
    CHECK_THROWS_AS(bryant(q), Error);
  }
}
