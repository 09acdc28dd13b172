#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/jet.hpp"

using namespace finsler;

namespace {

double max_rel(const Jet& a, const Jet& b) {
  const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() / scale;
}

// A random smooth expression in (r, s); `pick` chooses the shape.
template <typename T>
T expression(const T& r, const T& s, int pick) {
  switch (pick % 4) {
    case 0: return r * r * exp(s) + s / r;
    case 1: return sqrt(r * r - s * s) * (1.0 + s);
    case 2: return exp(r * s) / (2.0 + s * s);
    default: return pow(r + s, 3) - sqrt(1.0 + r * s);
  }
}

}  // namespace

TEST_SUITE("jet") {
  TEST_CASE("coordinate seeds") {
    auto [r, s] = Jet::seed(1.0, 0.0, {2, 5});
    CHECK(r.coeff(0, 0) == 1.0);
    CHECK(r.coeff(1, 0) == 1.0);
    CHECK(r.coeffs().cwiseAbs().sum() == 2.0);

    auto [r2, s2] = Jet::seed(2.0, 0.5, {2, 5});
    CHECK(s2.coeff(0, 0) == 0.5);
    CHECK(s2.coeff(0, 1) == 1.0);
    CHECK(s2.coeffs().cwiseAbs().sum() == 1.5);
    (void)r2;
    (void)s;
  }

  TEST_CASE("products and extraction") {
    auto [r, s] = Jet::seed(3.0, 0.0, {2, 5});
    CHECK(elementary(JetOp::Mul, r, std::optional<Jet>(r)).extract(2, 0) == doctest::Approx(2.0));
    CHECK((r * r).coeff(2, 0) == doctest::Approx(1.0));

    auto [r2, s2] = Jet::seed(2.0, 0.0, {2, 5});
    const Jet sq = r2 * r2;
    CHECK(sq.value() == 4.0);
    CHECK(sq.extract(1, 0) == 4.0);
    CHECK(sq.coeff(2, 0) == 1.0);

    auto [r3, s3] = Jet::seed(1.0, 1.0, {2, 5});
    CHECK(pow(s3, 3).extract(0, 3) == doctest::Approx(6.0));
    CHECK((r3 * s3).extract(1, 1) == doctest::Approx(1.0));

    const Jet c = Jet::constant(7.0, 1.0, 1.0, {2, 5});
    for (int i = 0; i <= 2; ++i) {
      for (int j = 0; j <= 5; ++j) {
        if (i + j > 0) CHECK(c.extract(i, j) == 0.0);
      }
    }
    CHECK_THROWS_AS(c.extract(3, 0), Error);
    (void)s;
    (void)s2;
  }

  TEST_CASE("sqrt and exp") {
    const Jet four = Jet::constant(4.0, 1.0, 0.0, {2, 5});
    const Jet root = sqrt(four);
    CHECK(root.value() == 2.0);
    CHECK(root.coeffs().cwiseAbs().sum() == 2.0);

    auto [r, s] = Jet::seed(1.0, 0.0, {2, 5});
    const Jet e = exp(s);
    const double expected[] = {1.0, 1.0, 0.5, 1.0 / 6, 1.0 / 24, 1.0 / 120};
    for (int j = 0; j <= 5; ++j) CHECK(e.coeff(0, j) == doctest::Approx(expected[j]).epsilon(1e-15));
    (void)r;
  }

  TEST_CASE("guards") {
    auto [r, s] = Jet::seed(1.0, 0.0, {2, 5});
    CHECK_THROWS_AS(r / s, Error);
    try {
      (void)sqrt(s - 1.0);
      FAIL("expected SqrtNonPositive");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SqrtNonPositive);
    }
    auto [r2, s2] = Jet::seed(1.5, 0.0, {2, 5});
    try {
      (void)(r + r2);
      FAIL("expected IncompatibleJets");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IncompatibleJets);
    }
    (void)s2;
  }

  TEST_CASE("binary operations truncate to the smaller caps") {
    auto [r, s] = Jet::seed(1.0, 0.2, {2, 5});
    const Jet narrow = s.truncated({1, 3});
    const Jet p = r * narrow;
    CHECK(p.caps() == JetCaps{1, 3});
  }

  TEST_CASE("ring laws and inverses") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(0.5, 1.5);
    for (int k = 0; k < 20; ++k) {
      auto [r, s] = Jet::seed(d(rng), d(rng) - 1.0, {2, 5});
      const Jet a = exp(r * s) + 1.0;
      const Jet b = sqrt(r + s * s);
      const Jet c = r * r - s;
      CHECK(max_rel(a * (b + c), a * b + a * c) < 1e-14);
      CHECK(max_rel((a * b) / b, a) < 1e-12);
      CHECK(max_rel(sqrt(a) * sqrt(a), a) < 1e-12);
    }
  }

  TEST_CASE("partials agree with central differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.8, 1.4);
    for (int pick = 0; pick < 8; ++pick) {
      const double r0 = d(rng), s0 = 0.5 * d(rng) - 0.3;
      auto [r, s] = Jet::seed(r0, s0, {2, 5});
      const Jet f = expression(r, s, pick);
      const auto v = [&](double rr, double ss) { return expression(rr, ss, pick); };
      const double h = 1e-5 * r0;
      const double fr = (v(r0 + h, s0) - v(r0 - h, s0)) / (2 * h);
      const double fs = (v(r0, s0 + h) - v(r0, s0 - h)) / (2 * h);
      const double H = 1e-3 * r0;
      const double frs =
          (v(r0 + H, s0 + H) - v(r0 + H, s0 - H) - v(r0 - H, s0 + H) + v(r0 - H, s0 - H)) / (4 * H * H);
      const double fss = (v(r0, s0 + H) - 2 * v(r0, s0) + v(r0, s0 - H)) / (H * H);
      const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1.0); };
      CHECK(rel(f.extract(1, 0), fr) < 1e-6);
      CHECK(rel(f.extract(0, 1), fs) < 1e-6);
      CHECK(rel(f.extract(1, 1), frs) < 1e-5);
      CHECK(rel(f.extract(0, 2), fss) < 1e-5);
    }
  }

  TEST_CASE("derivative and recentering helpers") {
    auto [r, s] = Jet::seed(1.2, 0.0, {2, 5});
    const Jet f = r * exp(s);
    CHECK(f.d_s().extract(1, 2) == doctest::Approx(f.extract(1, 3)));
    CHECK(f.d_r().value() == doctest::Approx(1.0));
    const Jet moved = f.recentered_s(1e-3);
    CHECK(moved.value() == doctest::Approx(1.2 * std::exp(1e-3)).epsilon(1e-12));
    const Jet deflated = (s * exp(s)).deflate_s();
    CHECK(deflated.value() == doctest::Approx(1.0));
  }
}
