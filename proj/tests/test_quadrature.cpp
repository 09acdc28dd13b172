#include <doctest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

using namespace finsler;

TEST_SUITE("quadrature") {
  TEST_CASE("polynomial and exponential") {
    CHECK(std::abs(quad([](double t) { return t * t; }, 0.0, 1.0) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(quad([](double t) { return std::exp(t); }, 0.0, 1.0) - (std::exp(1.0) - 1.0)) < 1e-12);
  }

  TEST_CASE("steep integrand close to a singularity") {
    // arcsin(0.99) from its series around 1: pi/2 - sqrt(2 eps) (1 + eps/12 + 3 eps^2/160 + ...), eps = 0.01
    const double eps = 0.01;
    double series = 0.0, term = std::sqrt(2.0 * eps);
    for (int k = 0; k < 30; ++k) {
      series += term;
      term *= (2.0 * k + 1) * (2.0 * k + 1) / ((2.0 * k + 2) * (2.0 * k + 3)) * eps / 2.0;
    }
    const double expected = M_PI / 2 - series;
    CHECK(std::abs(expected - std::asin(0.99)) < 1e-14);
    CHECK(std::abs(quad([](double t) { return 1.0 / std::sqrt(1.0 - t * t); }, 0.0, 0.99) - expected) < 1e-10);
  }

  TEST_CASE("additivity and orientation") {
    const auto f = [](double t) { return std::sin(3 * t) / (1.5 + t); };
    const double whole = quad(f, 0.0, 2.0);
    const double parts = quad(f, 0.0, 0.7) + quad(f, 0.7, 2.0);
    CHECK(std::abs(whole - parts) < 1e-11);
    CHECK(quad(f, 2.0, 0.0) == doctest::Approx(-whole).epsilon(1e-14));
  }

  TEST_CASE("error estimate and depth limit") {
    const QuadResult res = integrate([](double t) { return std::cos(t); }, 0.0, 1.0);
    CHECK(res.error <= 1e-12);
    CHECK(res.evaluations >= 15);
    QuadSpec shallow;
    shallow.max_depth = 3;
    try {
      (void)quad([](double t) { return 1.0 / std::sqrt(std::abs(t - 0.3)); }, 0.0, 1.0, shallow);
      FAIL("expected MaxDepthExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MaxDepthExceeded);
    }
  }
}
