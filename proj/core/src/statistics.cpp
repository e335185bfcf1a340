#include "longtail/statistics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "longtail/errors.hpp"

namespace longtail {

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("KS distance needs at least one sample");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double lr_norm_estimate(std::span<const double> samples, double r) {
  if (!(r >= 1.0)) throw InvalidArgument("L^r norm needs r >= 1");
  if (samples.empty()) throw InvalidArgument("L^r norm of an empty sample");
  double acc = 0.0;
  for (double x : samples) acc += std::pow(std::abs(x), r);
  return std::pow(acc / static_cast<double>(samples.size()), 1.0 / r);
}

RateFit rate_fit(std::span<const double> ns, std::span<const double> values) {
  if (ns.size() != values.size() || ns.size() < 3) {
    throw InvalidArgument("rate fit needs at least three (n, value) pairs");
  }
  const std::size_t m = ns.size();
  std::vector<double> lx(m);
  std::vector<double> ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(ns[i] > 0.0) || !(values[i] > 0.0)) throw InvalidArgument("rate fit needs positive n and values");
    lx[i] = std::log(ns[i]);
    ly[i] = std::log(values[i]);
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("rate fit needs at least two distinct n");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double median_absolute_deviation(std::span<const double> xs) {
  const double m = median(xs);
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = std::abs(xs[i] - m);
  return median(dev);
}

double calibrated_scale(std::span<const double> xs, double reference_mad) {
  if (!(reference_mad > 0.0)) throw InvalidArgument("reference MAD must be positive");
  return median_absolute_deviation(xs) / reference_mad;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace longtail
