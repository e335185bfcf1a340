#include "longtail/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "longtail/errors.hpp"

namespace longtail {

namespace {

using std::numbers::pi;

constexpr double kSeriesRelTol = 1e-14;
constexpr int kSeriesMaxTerms = 80;
// exp(-37) is below double epsilon relative to the O(1) head of the integral.
constexpr double kCutoffExponent = 37.0;

double gk_integrate(const auto& f, double a, double b) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 12, 1e-12, &error);
  if (!std::isfinite(value)) throw NumericError("stable inversion integral is not finite");
  return value;
}

double cutoff(double alpha) { return std::pow(kCutoffExponent, 1.0 / alpha); }

// Power series in x^-alpha for unit scale, x > 0. It converges for alpha < 1
// and is asymptotic for alpha > 1: terms are accumulated while they shrink.
// `density` selects f(x) instead of P[X > x]. Returns NaN when the smallest
// term does not reach the tolerance.
double tail_series(double alpha, double x, bool density) {
  const double log_x = std::log(x);
  double sum = 0.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kSeriesMaxTerms; ++k) {
    const double ka = k * alpha;
    // |Gamma(k alpha)/k!| x^-k alpha (tail) or |Gamma(k alpha + 1)/k!| x^-(k alpha + 1) (density)
    const double log_mag = density ? boost::math::lgamma(ka + 1.0) - boost::math::lgamma(k + 1.0) -
                                         (ka + 1.0) * log_x
                                   : boost::math::lgamma(ka) - boost::math::lgamma(k + 1.0) - ka * log_x;
    const double mag = std::exp(log_mag);
    if (mag > prev_mag && k > 2) return std::numeric_limits<double>::quiet_NaN();
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * mag * std::sin(ka * pi / 2.0);
    if (mag <= kSeriesRelTol * std::abs(sum)) return sum / pi;
    prev_mag = mag;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// (1/pi) int_0^inf sin(tx) exp(-t^alpha) / t dt, split at the zeros of sin(tx).
double sine_inversion(double alpha, double x) {
  const double t_max = cutoff(alpha);
  auto f = [alpha, x](double t) {
    if (t == 0.0) return x;
    return std::sin(t * x) * std::exp(-std::pow(t, alpha)) / t;
  };
  const double period = pi / x;
  double sum = 0.0;
  double a = 0.0;
  while (a < t_max) {
    const double b = std::min(a + period, t_max);
    sum += gk_integrate(f, a, b);
    a = b;
  }
  return sum / pi;
}

// (1/pi) int_0^inf cos(tx) exp(-t^alpha) dt, split at the zeros of cos(tx).
double cosine_inversion(double alpha, double x) {
  const double t_max = cutoff(alpha);
  auto f = [alpha, x](double t) { return std::cos(t * x) * std::exp(-std::pow(t, alpha)); };
  if (x * t_max < pi) return gk_integrate(f, 0.0, t_max) / pi;
  double sum = 0.0;
  double a = 0.0;
  double b = 0.5 * pi / x;
  while (a < t_max) {
    b = std::min(b, t_max);
    sum += gk_integrate(f, a, b);
    a = b;
    b = a + pi / x;
  }
  return sum / pi;
}

// Zolotarev's representation for symmetric laws with 1 < alpha < 2 and x > 0:
//   P[X > x] = (1/pi) int_0^{pi/2} exp(-g(th)) dth,
//   f(x)     = e / (pi x) int_0^{pi/2} g(th) exp(-g(th)) dth,
// with e = alpha/(alpha-1), g = x^e V(th) and
//   V(th) = (cos th / sin(alpha th))^e cos((alpha-1) th) / cos th,
// decreasing from +inf to 0. The range is split where g = 1, where the density
// integrand peaks.
struct Zolotarev {
  double alpha;
  double e;
  double log_xe;

  Zolotarev(double a, double x) : alpha(a), e(a / (a - 1.0)), log_xe(e * std::log(x)) {}

  double log_g(double th) const {
    return log_xe + e * (std::log(std::cos(th)) - std::log(std::sin(alpha * th))) +
           std::log(std::cos((alpha - 1.0) * th)) - std::log(std::cos(th));
  }
  double g(double th) const {
    if (th <= 0.0) return std::numeric_limits<double>::infinity();
    if (th >= pi / 2.0) return 0.0;
    return std::exp(log_g(th));
  }
  double split() const {
    double lo = 0.0;
    double hi = pi / 2.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (log_g(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  template <class F>
  double integrate(F h) const {
    // g behaves like (pi/2 - th)^{1/(alpha-1)} at the right end: a power-type
    // endpoint that tanh-sinh absorbs and Gauss-Kronrod does not.
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    const double m = split();
    const double v = ts.integrate(h, 0.0, m, 1e-10) + ts.integrate(h, m, pi / 2.0, 1e-10);
    if (!std::isfinite(v)) throw NumericError("stable integral representation is not finite");
    return v;
  }
  double tail() const {
    return integrate([this](double th) { return std::exp(-g(th)); }) / pi;
  }
  double pdf(double x) const {
    return e / (pi * x) * integrate([this](double th) {
      const double v = g(th);
      return std::isinf(v) ? 0.0 : v * std::exp(-v);
    });
  }
};

bool use_zolotarev(double alpha) { return alpha > 1.0 + 1e-3 && alpha < 2.0; }

// Unit-scale upper tail for x > 0.
double unit_tail(double alpha, double x) {
  if (alpha == 2.0) return 0.5 * std::erfc(x / 2.0);
  if (alpha == 1.0) return std::atan(1.0 / x) / pi;
  if (x > 1.0) {
    const double s = tail_series(alpha, x, false);
    if (std::isfinite(s)) return s;
  }
  if (use_zolotarev(alpha)) return Zolotarev(alpha, x).tail();
  return 0.5 - sine_inversion(alpha, x);
}

double unit_pdf(double alpha, double x) {
  x = std::abs(x);
  if (alpha == 2.0) return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(pi));
  if (alpha == 1.0) return 1.0 / (pi * (1.0 + x * x));
  if (x > 1.0) {
    const double s = tail_series(alpha, x, true);
    if (std::isfinite(s)) return s;
  }
  if (x > 0.0 && use_zolotarev(alpha)) return Zolotarev(alpha, x).pdf(x);
  return cosine_inversion(alpha, x);
}

void check_alpha_any(double alpha, double eta) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("stable index must lie in (0, 2]");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("stable scale must be positive");
}

}  // namespace

namespace detail {

double stable_tail_any(double alpha, double eta, double x) {
  check_alpha_any(alpha, eta);
  const double z = x / eta;
  if (z == 0.0) return 0.5;
  if (z > 0.0) return unit_tail(alpha, z);
  return 1.0 - unit_tail(alpha, -z);
}

double stable_cdf_any(double alpha, double eta, double x) {
  check_alpha_any(alpha, eta);
  const double z = x / eta;
  if (z == 0.0) return 0.5;
  if (z < 0.0) return unit_tail(alpha, -z);
  return 1.0 - unit_tail(alpha, z);
}

double stable_pdf_any(double alpha, double eta, double x) {
  check_alpha_any(alpha, eta);
  return unit_pdf(alpha, x / eta) / eta;
}

double stable_fourier_sine(double alpha, double x) { return sine_inversion(alpha, x); }

double stable_fourier_cosine(double alpha, double x) { return cosine_inversion(alpha, x); }

}  // namespace detail

StableLaw::StableLaw(double alpha, double eta) : alpha_(alpha), eta_(eta) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw InvalidArgument("stable index must lie in (1, 2], got " + std::to_string(alpha));
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("stable scale must be positive");
}

double StableLaw::tail_coefficient() const {
  if (alpha_ == 2.0) return 0.0;
  return boost::math::tgamma(alpha_) * std::sin(pi * alpha_ / 2.0) / pi * std::pow(eta_, alpha_);
}

std::vector<double> sample_sas(const StableLaw& law, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("sample count must be positive");
  const double alpha = law.alpha();
  const double inv_alpha = 1.0 / alpha;
  const double power = (1.0 - alpha) / alpha;

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> angle(-pi / 2.0, pi / 2.0);
  std::exponential_distribution<double> expo(1.0);

  std::vector<double> out(count);
  for (auto& x : out) {
    const double v = angle(gen);
    double w = expo(gen);
    while (!(w > 0.0)) w = expo(gen);
    // Chambers-Mallows-Stuck, symmetric case.
    const double cv = std::cos(v);
    x = law.eta() * std::sin(alpha * v) / std::pow(cv, inv_alpha) *
        std::pow(std::cos(v - alpha * v) / w, power);
  }
  return out;
}

double sas_cdf(const StableLaw& law, double x) {
  return detail::stable_cdf_any(law.alpha(), law.eta(), x);
}

double sas_tail(const StableLaw& law, double x) {
  return detail::stable_tail_any(law.alpha(), law.eta(), x);
}

double sas_pdf(const StableLaw& law, double x) {
  return detail::stable_pdf_any(law.alpha(), law.eta(), x);
}

double sas_upper_quantile(const StableLaw& law, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  if (q == 0.5) return 0.0;
  if (q > 0.5) return -sas_upper_quantile(law, 1.0 - q);
  if (law.alpha() == 2.0) return 2.0 * law.eta() * boost::math::erfc_inv(2.0 * q);

  auto f = [&](double x) { return sas_tail(law, x) - q; };
  double hi = std::max(law.eta(), std::pow(law.tail_coefficient() / q, 1.0 / law.alpha()));
  int guard = 0;
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw NumericError("could not bracket stable quantile");
  }
  std::uintmax_t iterations = 200;
  const auto [lo_x, hi_x] = boost::math::tools::toms748_solve(
      f, 0.0, hi, 0.5 - q, f(hi), boost::math::tools::eps_tolerance<double>(50), iterations);
  return 0.5 * (lo_x + hi_x);
}

double sas_quantile(const StableLaw& law, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("probability must lie in (0, 1)");
  return sas_upper_quantile(law, 1.0 - p);
}

double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("beta function arguments must be positive");
  return std::exp(boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b));
}

}  // namespace longtail
