#include "longtail/pot.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "longtail/errors.hpp"
#include "longtail/statistics.hpp"

namespace longtail {

namespace {

// int_0^Y h(y) dy in unit-length adaptive pieces; h decays at least
// exponentially, so the pieces beyond Y are negligible by construction.
template <class F>
double integrate_log_scale(F h, double y_max) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(y_max)));
  double total = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double a = y_max * k / pieces;
    const double b = y_max * (k + 1) / pieces;
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(h, a, b, 10, 1e-12, &err);
    if (!std::isfinite(v)) throw NumericError("centering quadrature did not converge");
    total += v;
  }
  return total;
}

}  // namespace

std::size_t exceedance_count(std::span<const double> xs, double u) {
  return static_cast<std::size_t>(std::count_if(xs.begin(), xs.end(), [u](double x) { return x > u; }));
}

double hill_sum(std::span<const double> xs, double u) {
  if (!(u > 0.0)) throw InvalidArgument("Hill sum needs a positive threshold");
  double acc = 0.0;
  for (double x : xs) {
    if (x > u) acc += std::log(x / u);
  }
  return acc;
}

double order_statistic(std::span<const double> xs, std::size_t m) {
  if (m < 1 || m > xs.size()) throw InvalidArgument("order statistic rank out of range");
  std::vector<double> v(xs.begin(), xs.end());
  const auto nth = v.begin() + static_cast<std::ptrdiff_t>(m - 1);
  std::nth_element(v.begin(), nth, v.end());
  return *nth;
}

double hill_random(std::span<const double> xs, std::size_t k) {
  const std::size_t n = xs.size();
  if (k < 1 || k + 1 > n) throw InvalidArgument("random-threshold Hill sum needs 1 <= k <= n - 1");
  std::vector<double> v(xs.begin(), xs.end());
  // After selection v[n-k-1] = X_{n-k:n} and the k values above it hold the top k.
  const auto pivot = v.begin() + static_cast<std::ptrdiff_t>(n - k - 1);
  std::nth_element(v.begin(), pivot, v.end());
  const double threshold = *pivot;
  if (!(threshold > 0.0)) throw InvalidArgument("order statistic X_{n-k:n} is not positive; reduce k");
  double acc = 0.0;
  for (auto it = pivot + 1; it != v.end(); ++it) acc += std::log(*it / threshold);
  return acc;
}

CenteringTerms centering_terms(const MarginalLaw& marginal, double u) {
  if (!(u > 0.0)) throw InvalidArgument("centering needs a positive threshold");
  CenteringTerms c;
  c.tail_prob = marginal.tail(u);
  c.density = marginal.pdf(u);
  if (!(c.tail_prob > 0.0)) throw NumericError("tail probability at the threshold is zero");

  if (marginal.kind() == MarginalKind::MonteCarloEmpirical) {
    // Exact moments of the empirical law.
    const auto xs = marginal.sample();
    double g = 0.0;
    double slope = 0.0;
    for (double x : xs) {
      if (x > u) {
        g += std::log(x / u);
        slope += 1.0 / x;
      }
    }
    c.mean_G = g / static_cast<double>(xs.size());
    c.slope_G = slope / static_cast<double>(xs.size());
  } else {
    // Substituting x = u e^y: mean_G = int_0^inf P(u e^y) dy, slope_G = int_0^inf f(u e^y) dy.
    double y_max = 0.0;
    if (marginal.kind() == MarginalKind::GaussianExact) {
      const double var = marginal.variance();
      y_max = std::log(std::sqrt(u * u + 150.0 * var) / u);
    } else {
      const double eta = marginal.stable_law().eta();
      const double a = marginal.stable_law().alpha();
      y_max = std::log(std::max(1.0, 10.0 * eta / u)) + 70.0 / a;
    }
    c.mean_G = integrate_log_scale([&](double y) { return marginal.tail(u * std::exp(y)); }, y_max);
    c.slope_G = integrate_log_scale([&](double y) { return marginal.pdf(u * std::exp(y)); }, y_max);
  }
  if (!(c.mean_G > 0.0) || !(c.slope_G > 0.0)) throw NumericError("centering integrals are not positive");
  c.conditional_log_mean = c.mean_G / c.tail_prob;
  c.xi_at_u = u * c.density / c.tail_prob;
  return c;
}

AsymptoticCentering asymptotic_centering(double tail_prob, double density, double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("tail index must be positive");
  return {tail_prob / nu, density / (nu + 1.0)};
}

double reduction_residual(std::span<const double> path, const CenteringTerms& centering, double u,
                          FunctionalKind kind) {
  if (!(u > 0.0)) throw InvalidArgument("reduction residual needs a positive threshold");
  double sum_x = 0.0;
  double sum_g = 0.0;
  for (double x : path) {
    sum_x += x;
    if (x > u) sum_g += kind == FunctionalKind::Count ? 1.0 : std::log(x / u);
  }
  const double n = static_cast<double>(path.size());
  // d/dx E[G(X_0 + x)] at 0: f(u) for the indicator, E[1{X_0 > u}/X_0] for the log-excess.
  if (kind == FunctionalKind::Count) return (sum_g - n * centering.tail_prob) - centering.density * sum_x;
  return (sum_g - n * centering.mean_G) - centering.slope_G * sum_x;
}

double reduction_residual(std::span<const double> path, const MarginalLaw& marginal, double u,
                          FunctionalKind kind) {
  if (!marginal.exact()) throw InvalidArgument("reduction residual needs an exact marginal law");
  return reduction_residual(path, centering_terms(marginal, u), u, kind);
}

std::string_view to_string(CorollaryId id) {
  switch (id) {
    case CorollaryId::HeavyDetCount:
      return "HeavyDetCount";
    case CorollaryId::HeavyDetHill:
      return "HeavyDetHill";
    case CorollaryId::HeavyRandHill:
      return "HeavyRandHill";
    case CorollaryId::LightDetCount:
      return "LightDetCount";
    case CorollaryId::LightDetHill:
      return "LightDetHill";
    case CorollaryId::LightRandHill:
      return "LightRandHill";
  }
  return "unknown";
}

CorollaryId corollary_from_string(std::string_view name) {
  for (auto id : {CorollaryId::HeavyDetCount, CorollaryId::HeavyDetHill, CorollaryId::HeavyRandHill,
                  CorollaryId::LightDetCount, CorollaryId::LightDetHill, CorollaryId::LightRandHill}) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("unknown corollary id: " + std::string(name));
}

bool is_heavy(CorollaryId id) {
  return id == CorollaryId::HeavyDetCount || id == CorollaryId::HeavyDetHill || id == CorollaryId::HeavyRandHill;
}

bool uses_random_threshold(CorollaryId id) {
  return id == CorollaryId::HeavyRandHill || id == CorollaryId::LightRandHill;
}

double predicted_limit_scale(CorollaryId id, double nu) {
  switch (id) {
    case CorollaryId::HeavyDetCount:
      return nu;
    case CorollaryId::HeavyDetHill:
      return nu * nu / (nu + 1.0);
    case CorollaryId::HeavyRandHill:
      return nu / (nu + 1.0);
    case CorollaryId::LightDetCount:
    case CorollaryId::LightDetHill:
      return 1.0;
    case CorollaryId::LightRandHill:
      return 0.0;
  }
  return 0.0;
}

StatisticContext make_statistic_context(const TheoryReport& theory, const ThresholdSchedule& schedule,
                                        const MarginalLaw& marginal, double nu, std::size_t n,
                                        bool random_threshold) {
  if (n < 2) throw InvalidArgument("PoT statistics need n >= 2");
  StatisticContext ctx;
  ctx.theory = &theory;
  ctx.schedule = &schedule;
  ctx.marginal = &marginal;
  ctx.nu = nu;
  ctx.n = n;
  ctx.u = schedule.threshold(n);
  ctx.centering = centering_terms(marginal, ctx.u);
  if (random_threshold) {
    ctx.k = ThresholdSchedule::random_k(n, ctx.centering.tail_prob);
    if (ctx.k < 1 || ctx.k + 1 > n) {
      throw InvalidArgument("random threshold needs 1 <= floor(n P[X_0 > u_n]) <= n - 1");
    }
    ctx.q_threshold = marginal.upper_quantile(static_cast<double>(ctx.k) / static_cast<double>(n));
  }
  return ctx;
}

PotStatistic normalized_statistic(CorollaryId id, std::span<const double> path, const StatisticContext& ctx) {
  if (path.size() != ctx.n) throw InvalidArgument("path length does not match the statistic context");
  const bool random = uses_random_threshold(id);
  if (random && ctx.k == 0) throw InvalidArgument("context was built without a random threshold");

  const auto& th = *ctx.theory;
  const double nd = static_cast<double>(ctx.n);
  const bool heavy = is_heavy(id);
  const double rate = heavy ? std::pow(nd, 1.0 - (th.d + 1.0 / th.alpha)) : std::pow(nd, 0.5 - th.d);
  const double level = random ? ctx.q_threshold : ctx.u;
  const double level_factor = heavy ? level : std::pow(level, 1.0 - ctx.schedule->beta);
  const double np = nd * ctx.centering.tail_prob;

  PotStatistic s;
  s.corollary = id;
  s.n = ctx.n;
  s.predicted_limit_scale = predicted_limit_scale(id, ctx.nu);
  s.admissible = ctx.schedule->admissible;

  if (id == CorollaryId::HeavyDetCount || id == CorollaryId::LightDetCount) {
    const auto count = exceedance_count(path, ctx.u);
    s.u_or_k = ctx.u;
    s.threshold = ctx.u;
    s.raw_value = static_cast<double>(count);
    s.exceedance = count > 0;
    s.centered_scaled_value = rate * level_factor * (s.raw_value / np - 1.0);
    return s;
  }
  if (random) {
    s.u_or_k = static_cast<double>(ctx.k);
    s.threshold = order_statistic(path, ctx.n - ctx.k);
    s.raw_value = hill_random(path, ctx.k);
  } else {
    s.u_or_k = ctx.u;
    s.threshold = ctx.u;
    s.exceedance = exceedance_count(path, ctx.u) > 0;
    s.raw_value = hill_sum(path, ctx.u);
  }
  s.centered_scaled_value = rate * level_factor * (s.raw_value / np - ctx.centering.conditional_log_mean);
  return s;
}

PotStatistic normalized_statistic(CorollaryId id, std::span<const double> path, const TheoryReport& theory,
                                  const ThresholdSchedule& schedule, const MarginalLaw& marginal, double nu) {
  const auto ctx =
      make_statistic_context(theory, schedule, marginal, nu, path.size(), uses_random_threshold(id));
  return normalized_statistic(id, path, ctx);
}

std::string_view pot_csv_header() { return "corollary_id,n,u_or_k,raw,centered_scaled,predicted_scale,admissible"; }

std::string to_csv_row(const PotStatistic& s) {
  std::string row;
  row += to_string(s.corollary);
  row += ',' + std::to_string(s.n);
  row += ',' + format_double(s.u_or_k);
  row += ',' + format_double(s.raw_value);
  row += ',' + format_double(s.centered_scaled_value);
  row += ',' + format_double(s.predicted_limit_scale);
  row += s.admissible ? ",true" : ",false";
  return row;
}

}  // namespace longtail
