#pragma once

#include <functional>
#include <span>
#include <string>

namespace longtail {

/// Kolmogorov-Smirnov distance sup_x |F_m(x) - F(x)| of a sample against a
/// continuous CDF.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Plug-in L^r norm (mean |x|^r)^(1/r), r >= 1.
double lr_norm_estimate(std::span<const double> samples, double r);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(value) on log(n). Requires >= 3 points and
/// positive values.
RateFit rate_fit(std::span<const double> ns, std::span<const double> values);

double median(std::span<const double> xs);

/// Median absolute deviation from the median.
double median_absolute_deviation(std::span<const double> xs);

/// MAD divided by the MAD of the reference law with unit scale, i.e. a
/// scale estimate calibrated to that law. For SaS(alpha, 1) the reference
/// MAD is its 0.75 quantile.
double calibrated_scale(std::span<const double> xs, double reference_mad);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

}  // namespace longtail
