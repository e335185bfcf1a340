#pragma once

#include <cstdint>
#include <vector>

namespace longtail {

/// Symmetric alpha-stable law SaS(eta) with characteristic function
/// t -> exp(-eta^alpha |t|^alpha), alpha in (1, 2].
///
/// alpha = 2 is the centered normal law with variance 2 eta^2.
class StableLaw {
 public:
  StableLaw(double alpha, double eta);

  double alpha() const { return alpha_; }
  double eta() const { return eta_; }

  /// Tail constant C with P[X > x] ~ C x^-alpha (zero for alpha = 2).
  double tail_coefficient() const;

 private:
  double alpha_;
  double eta_;
};

/// Chambers-Mallows-Stuck draws, deterministic in `seed`.
std::vector<double> sample_sas(const StableLaw& law, std::size_t count, std::uint64_t seed);

/// CDF by Fourier inversion of the characteristic function, with the
/// convergent tail power series taking over far from the origin.
/// Absolute accuracy is 1e-8 or better.
double sas_cdf(const StableLaw& law, double x);

/// P[X > x], accurate in relative terms deep in the upper tail.
double sas_tail(const StableLaw& law, double x);

double sas_pdf(const StableLaw& law, double x);

/// Inverse CDF; throws InvalidArgument unless 0 < p < 1.
double sas_quantile(const StableLaw& law, double p);

/// Upper quantile: x with P[X > x] = q, for 0 < q < 1.
double sas_upper_quantile(const StableLaw& law, double q);

/// Euler beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
double beta_function(double a, double b);

namespace detail {

// Same kernels as above without the alpha in (1, 2] restriction; valid for
// alpha in (0, 2]. alpha = 1 takes the Cauchy closed form.
double stable_cdf_any(double alpha, double eta, double x);
double stable_tail_any(double alpha, double eta, double x);
double stable_pdf_any(double alpha, double eta, double x);

// Fourier inversion for unit scale and x > 0, kept as an independent route:
// (1/pi) int sin(tx) exp(-t^alpha)/t dt = F(x) - 1/2, and the density.
double stable_fourier_sine(double alpha, double x);
double stable_fourier_cosine(double alpha, double x);

}  // namespace detail

}  // namespace longtail
