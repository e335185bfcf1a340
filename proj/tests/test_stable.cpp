#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "longtail/errors.hpp"
#include "longtail/stable.hpp"
#include "longtail/statistics.hpp"
#include "oracle_values.hpp"

using namespace longtail;

TEST_CASE("cdf and density match high-precision references") {
  for (const auto& p : oracle::kStablePoints) {
    CAPTURE(p.alpha);
    CAPTURE(p.x);
    const StableLaw law(p.alpha, p.eta);
    CHECK(sas_cdf(law, p.x) == doctest::Approx(p.cdf).epsilon(1e-12));
    CHECK(sas_pdf(law, p.x) == doctest::Approx(p.pdf).epsilon(1e-11));
    CHECK(sas_cdf(law, -p.x) == doctest::Approx(1.0 - p.cdf).epsilon(1e-12));
  }
}

TEST_CASE("upper tail is relatively accurate far out") {
  const StableLaw law(1.5, 1.0);
  for (const auto& p : oracle::kTail15) {
    CAPTURE(p.x);
    CHECK(sas_tail(law, p.x) == doctest::Approx(p.tail).epsilon(1e-12));
  }
  CHECK(sas_pdf(law, 20.0) == doctest::Approx(oracle::kPdf15At20).epsilon(1e-12));
}

TEST_CASE("Fourier inversion and the integral representation agree") {
  // Two independent routes: detail::stable_cdf_any at alpha slightly above 1
  // forces Fourier inversion, the public path uses the Zolotarev integral.
  for (double a : {1.3, 1.5, 1.8}) {
    for (double x : {0.2, 0.9, 2.5, 4.0}) {
      CAPTURE(a);
      CAPTURE(x);
      const double via_public = sas_cdf(StableLaw(a, 1.0), x);
      const double via_fourier = 0.5 + detail::stable_fourier_sine(a, x);
      CHECK(via_public == doctest::Approx(via_fourier).epsilon(1e-10));
      CHECK(sas_pdf(StableLaw(a, 1.0), x) == doctest::Approx(detail::stable_fourier_cosine(a, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("normal special case") {
  const StableLaw law(2.0, 1.0);
  CHECK(sas_cdf(law, 1.0) == doctest::Approx(oracle::kPhiInvSqrt2).epsilon(1e-14));
  CHECK(sas_pdf(law, 0.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-14));
  CHECK(sas_quantile(law, 0.760250) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(law.tail_coefficient() == 0.0);
}

TEST_CASE("symmetry and centre") {
  for (double a : {1.1, 1.5, 1.9, 2.0}) {
    const StableLaw law(a, 1.7);
    CHECK(sas_cdf(law, 0.0) == 0.5);
    CHECK(sas_quantile(law, 0.5) == 0.0);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 20; ++i) {
      const double x = u(gen);
      CHECK(std::abs(sas_cdf(law, x) + sas_cdf(law, -x) - 1.0) < 1e-10);
      CHECK(sas_pdf(law, x) == doctest::Approx(sas_pdf(law, -x)).epsilon(1e-13));
      CHECK(sas_pdf(law, x) > 0.0);
    }
  }
}

TEST_CASE("Cauchy limit") {
  CHECK(std::abs(detail::stable_cdf_any(1.0001, 1.0, 1.0) - 0.75) < 1e-3);
  CHECK(detail::stable_cdf_any(1.0, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("cdf is strictly increasing") {
  // Compared through the smaller of F and 1 - F so rounding to 1 cannot tie.
  for (double a : {1.2, 1.6, 2.0}) {
    const StableLaw law(a, 1.0);
    double prev = 0.0;
    for (double x = -40.0; x <= 0.0; x += 0.25) {
      const double f = sas_cdf(law, x);
      CHECK(f > prev);
      prev = f;
    }
    prev = 0.5;
    for (double x = 0.25; x <= 40.0; x += 0.25) {
      const double t = sas_tail(law, x);
      CHECK(t < prev);
      CHECK(t > 0.0);
      prev = t;
    }
  }
}

TEST_CASE("density integrates to one") {
  for (double a : {1.2, 1.5, 1.9}) {
    const double eta = 1.3;
    const StableLaw law(a, eta);
    // Simpson on [-50 eta, 50 eta]
    const int m = 4000;
    const double lo = -50.0 * eta;
    const double h = 100.0 * eta / m;
    double s = sas_pdf(law, lo) + sas_pdf(law, -lo);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * sas_pdf(law, lo + i * h);
    const double mass = s * h / 3.0;
    CAPTURE(a);
    // The mass outside +-50 eta is 2 P[X > 50 eta], about 5e-3 at alpha = 1.2.
    CHECK(mass == doctest::Approx(1.0 - 2.0 * sas_tail(law, 50.0 * eta)).epsilon(1e-7));
    CHECK(mass <= 1.0);
    if (a >= 1.9) CHECK(mass >= 1.0 - 1e-4);
  }
}

TEST_CASE("density is the derivative of the cdf") {
  for (double a : {1.3, 1.5, 1.7}) {
    const StableLaw law(a, 1.0);
    for (double x : {-2.0, 0.3, 1.0, 4.5, 12.0}) {
      const double h = 1e-4;
      const double fd = (sas_cdf(law, x + h) - sas_cdf(law, x - h)) / (2.0 * h);
      CHECK(std::abs(fd - sas_pdf(law, x)) < 1e-5);
    }
  }
}

TEST_CASE("quantile inverts the cdf") {
  for (double a : {1.2, 1.5, 1.8, 2.0}) {
    const StableLaw law(a, 0.8);
    for (double p : {1e-6, 0.001, 0.05, 0.3, 0.5, 0.75, 0.99, 0.999999}) {
      CAPTURE(a);
      CAPTURE(p);
      CHECK(std::abs(sas_cdf(law, sas_quantile(law, p)) - p) < 1e-9);
    }
    CHECK(sas_upper_quantile(law, 0.01) == doctest::Approx(sas_quantile(law, 0.99)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sas_quantile(StableLaw(1.5, 1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(sas_quantile(StableLaw(1.5, 1.0), 1.0), InvalidArgument);
}

TEST_CASE("beta function") {
  CHECK(beta_function(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta_function(0.5, 0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(beta_function(0.5, 0.25) == doctest::Approx(oracle::kBetaHalfQuarter).epsilon(1e-12));
  CHECK(beta_function(2.5, 3.5) == doctest::Approx(oracle::kBeta25_35).epsilon(1e-12));
  CHECK_THROWS_AS(beta_function(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(beta_function(1.0, -2.0), InvalidArgument);
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS(StableLaw(1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(StableLaw(2.1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(StableLaw(1.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(sample_sas(StableLaw(1.5, 1.0), 0, 1), InvalidArgument);
}

TEST_CASE("tail coefficient") {
  const StableLaw law(1.5, 2.0);
  const double x = 1e5;
  CHECK(sas_tail(law, x) * std::pow(x, 1.5) == doctest::Approx(law.tail_coefficient()).epsilon(1e-4));
}

TEST_CASE("sampler") {
  SUBCASE("deterministic") {
    const auto a = sample_sas(StableLaw(1.5, 1.0), 100, 42);
    const auto b = sample_sas(StableLaw(1.5, 1.0), 100, 42);
    CHECK(a == b);
  }
  SUBCASE("alpha = 2 is normal") {
    const auto xs = sample_sas(StableLaw(2.0, 1.0 / std::sqrt(2.0)), 100000, 5);
    const double ks = ks_distance(xs, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
    CHECK(ks < 0.015);
  }
  SUBCASE("characteristic function") {
    const double eta = 1.0;
    const auto xs = sample_sas(StableLaw(1.5, eta), 100000, 9);
    for (double t : {0.5, 1.0, 2.0}) {
      double c = 0.0;
      for (double x : xs) c += std::cos(t * x);
      c /= static_cast<double>(xs.size());
      CHECK(std::abs(c - std::exp(-std::pow(eta * t, 1.5))) < 0.02);
    }
  }
}
