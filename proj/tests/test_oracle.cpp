#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/config.hpp"
#include "finsler/grid.hpp"
#include "finsler/oracle.hpp"

using namespace finsler;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

MetricSpec bryant_default() { return bryant(BryantParams{}); }

MetricSpec landsberg_family() {
  FamilyParams p;
  p.f1 = p.c0 = p.c1 = p.c2 = p.g_offset = RadialPolynomial::constant(0.0);
  p.f2 = RadialPolynomial::constant(1.0);
  return family(p);
}

std::vector<PointFrame> frames(const MetricSpec& spec, int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PointFrame> out;
  while (static_cast<int>(out.size()) < count) {
    auto [x, y] = oriented_frame(n, 0.7 + unit(rng), 0.1 + 0.7 * unit(rng), 6.28 * unit(rng), unit(rng) - 0.5);
    const Matrix R = random_rotation(n, rng);
    PointFrame f = make_frame(spec, R * x, R * y);
    if (f.valid && f.root() > 0.3 * f.r) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("F values") {
    CHECK(F_value(euclidean(), vec({1, 0}), vec({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(F_value(riemann_quadratic(), vec({1, 0}), vec({1, 1})) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    const Vector x = vec({0.4, 0.9}), y = vec({0.7, -0.1});
    const MetricSpec spec = bryant_default();
    CHECK(std::abs(F_value(spec, x, 2.0 * y) - 2.0 * F_value(spec, x, y)) < 1e-12 * F_value(spec, x, y));
  }

  TEST_CASE("finite-difference spray") {
    CHECK(fd_spray(euclidean(), vec({1, 0.2}), vec({0.3, 1})).norm() < 1e-9);

    const Vector x = vec({0.6, 0.8}), y = vec({-0.5, 1.1});
    const Vector expected = 0.25 * y.squaredNorm() * x;  // r = 1
    CHECK(relative_difference(fd_spray(riemann_quadratic(), x, y), expected) < 1e-6);

    const MetricSpec spec = bryant_default();
    for (const PointFrame& f : frames(spec, 2, 5, 1)) {
      CHECK(relative_difference(fd_spray(spec, f.x, f.y), engine_spray(spec, f.x, f.y)) < 1e-5);
    }
  }

  TEST_CASE("metric tensor from the Hessian of F^2 / 2") {
    const MetricSpec spec = randers(0.3);
    for (const PointFrame& f : frames(spec, 3, 5, 2)) {
      CHECK(relative_difference(fd_metric_tensor(spec, f.x, f.y), metric_tensor(spec, f)) < 1e-8);
    }
  }

  TEST_CASE("finite-difference berwald") {
    const Vector x = vec({0.9, 0.3, -0.2}), y = vec({0.1, 1.0, 0.4});
    CHECK(frobenius(fd_berwald(euclidean(), x, y)) < 1e-7);
    CHECK(frobenius(fd_berwald(riemann_quadratic(), x, y)) < 1e-6);
    for (const MetricSpec& spec : {bryant_default(), randers(0.3)}) {
      for (const PointFrame& f : frames(spec, 3, 4, 3)) {
        const CurvaturePack p = evaluate(spec, f);
        CHECK(relative_difference(p.B, fd_berwald(spec, f.x, f.y), p.scales.B) < 1e-5);
        CHECK(relative_difference(p.B, fd_berwald(spec, f.x, f.y, {}, OracleMode::Full), p.scales.B) < 1e-3);
      }
    }
    CHECK_THROWS_AS(fd_berwald(euclidean(), x, y, {}, OracleMode::Off), Error);
  }

  TEST_CASE("landsberg identity with one sign") {
    const Vector x = vec({0.9, 0.3}), y = vec({0.1, 1.0});
    Tensor4 zero(2, 2, 2, 2);
    zero.setZero();
    CHECK(frobenius(landsberg_identity(Matrix::Identity(2, 2), zero, y)) == 0.0);

    const MetricSpec spec = landsberg_family();
    SigmaCalibrator sigma;
    for (const PointFrame& f : frames(spec, 3, 6, 4)) {
      const CurvaturePack p = evaluate(spec, f);
      const Tensor3 oracle = landsberg_identity(p.metric->g, fd_berwald(spec, f.x, f.y), f.y);
      CHECK(sigma.observe(p.metric->L, oracle, p.scales.L) < 1e-5);
      // the contraction is exact for a homogeneous B, so feed it the engine one
      const Tensor3 exact = landsberg_identity(p.metric->g, p.B, f.y);
      double contraction = 0.0;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          double acc = 0.0;
          for (int l = 0; l < 3; ++l) acc += exact(j, k, l) * f.y[l];
          contraction = std::max(contraction, std::abs(acc));
        }
      }
      CHECK(contraction < 1e-9 * std::max(frobenius(exact), p.scales.L) * f.u);
    }
    REQUIRE(sigma.sigma().has_value());
    CHECK(*sigma.sigma() == 1);
  }

  TEST_CASE("finite-difference ricci") {
    const Vector x = vec({0.9, 0.3}), y = vec({0.1, 1.0});
    CHECK(std::abs(fd_ricci(euclidean(), x, y)) < 1e-7);

    const MetricSpec spec = bryant_default();
    for (const PointFrame& f : frames(spec, 2, 5, 5)) {
      CHECK(std::abs(fd_ricci(spec, f.x, f.y)) < 1e-4 * f.u * f.u);
    }
    const MetricSpec riem = riemann_quadratic();
    for (const PointFrame& f : frames(riem, 3, 5, 6)) {
      const CurvaturePack p = evaluate(riem, f);
      CHECK(relative_difference(p.Ric, fd_ricci(riem, f.x, f.y, {}, OracleMode::Full), p.scales.Ric) < 1e-4);
    }
  }

  TEST_CASE("error shrinks from h_rel 1e-4 to 1e-5") {
    const MetricSpec spec = bryant_default();
    const PointFrame f = frames(spec, 2, 1, 7).front();
    const Vector G = engine_spray(spec, f.x, f.y);
    const Matrix g = metric_tensor(spec, f);
    FdSpec coarse, fine;
    coarse.h_rel = 1e-4;
    fine.h_rel = 1e-5;
    CHECK(relative_difference(fd_spray(spec, f.x, f.y, fine), G) <
          relative_difference(fd_spray(spec, f.x, f.y, coarse), G));
    CHECK(relative_difference(fd_metric_tensor(spec, f.x, f.y, fine), g) <
          relative_difference(fd_metric_tensor(spec, f.x, f.y, coarse), g));
  }

  TEST_CASE("step validation and singular stencils") {
    FdSpec bad;
    bad.h_rel = 0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.h_rel = 1e-9;
    CHECK_THROWS_AS(bad.validate(), Error);

    FdSpec wide;
    wide.h_rel = 1e-2;
    // root = 0.03 r: third-order steps of ~0.2 u reach the radial set.
    const Vector x = vec({1, 0}), y = vec({std::sqrt(1 - 0.0009), 0.03});
    try {
      (void)fd_berwald(bryant_default(), x, y, wide, OracleMode::Full);
      FAIL("expected StencilCrossesSingularSet");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StencilCrossesSingularSet);
    }
  }

  TEST_CASE("sigma is fixed once") {
    Tensor3 a(2, 2, 2);
    a.setConstant(1.0);
    const Tensor3 minus = -a;
    SigmaCalibrator sigma;
    CHECK(sigma.observe(a, minus, 1.0) == 0.0);
    CHECK(*sigma.sigma() == -1);
    CHECK(sigma.observe(a, a, 1.0) == doctest::Approx(2.0));
  }

  TEST_CASE("relative differences") {
    CHECK(relative_difference(1.0, 1.0) == 0.0);
    CHECK(relative_difference(0.0, 0.0) == 0.0);
    CHECK(relative_difference(1e-20, 0.0, 1.0) == doctest::Approx(1e-20));
    CHECK(relative_difference(2.0, 1.0) == doctest::Approx(0.5));
  }
}
