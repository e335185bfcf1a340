#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "longtail/limit_theory.hpp"
#include "longtail/linear_process.hpp"

namespace longtail {

/// #{t : x_t > u}.
std::size_t exceedance_count(std::span<const double> xs, double u);

/// sum_t log(x_t / u) 1{x_t > u}; requires u > 0.
double hill_sum(std::span<const double> xs, double u);

/// m-th smallest value (1-based), expected O(n) selection.
double order_statistic(std::span<const double> xs, std::size_t m);

/// sum_{i=1}^{k} log(X_{n-i+1:n} / X_{n-k:n}) for 1 <= k <= n-1. Throws
/// InvalidArgument when X_{n-k:n} <= 0.
double hill_random(std::span<const double> xs, std::size_t k);

/// Exact centering and normalisation quantities of the PoT functionals at u.
struct CenteringTerms {
  double tail_prob = 0.0;             // P[X_0 > u]
  double density = 0.0;               // f_{X_0}(u)
  double mean_G = 0.0;                // E[log(X_0/u)_+] = int_u^inf P[X_0>x]/x dx
  double slope_G = 0.0;               // int_u^inf f(x)/x dx
  double conditional_log_mean = 0.0;  // E[log(X_0/u) | X_0 > u]
  double xi_at_u = 0.0;               // u f(u) / P[X_0 > u]
};

CenteringTerms centering_terms(const MarginalLaw& marginal, double u);

/// Karamata surrogates for regularly varying tails: mean_G ~ P/nu and
/// slope_G ~ f(u)/(nu+1).
struct AsymptoticCentering {
  double mean_G = 0.0;
  double slope_G = 0.0;
};
AsymptoticCentering asymptotic_centering(double tail_prob, double density, double nu);

enum class FunctionalKind { Count, Hill };

/// sum_t (G(X_t) - E[G(X_0)]) - G'(0) sum_t X_t for G = 1{x > u} or
/// G = log(x/u)_+.
double reduction_residual(std::span<const double> path, const CenteringTerms& centering, double u,
                          FunctionalKind kind);
double reduction_residual(std::span<const double> path, const MarginalLaw& marginal, double u,
                          FunctionalKind kind);

enum class CorollaryId {
  HeavyDetCount,
  HeavyDetHill,
  HeavyRandHill,
  LightDetCount,
  LightDetHill,
  LightRandHill,
};
std::string_view to_string(CorollaryId id);
CorollaryId corollary_from_string(std::string_view name);
bool is_heavy(CorollaryId id);
bool uses_random_threshold(CorollaryId id);

/// Limit multiple of Z: nu, nu^2/(nu+1), nu/(nu+1), 1, 1, 0.
double predicted_limit_scale(CorollaryId id, double nu);

struct PotStatistic {
  CorollaryId corollary = CorollaryId::HeavyDetCount;
  std::size_t n = 0;
  double u_or_k = 0.0;      // u_n, or k for random thresholds
  double threshold = 0.0;   // u_n (deterministic) or X_{n-k:n}
  double raw_value = 0.0;   // count or Hill sum
  double centered_scaled_value = 0.0;
  double predicted_limit_scale = 0.0;
  bool admissible = true;
  bool exceedance = true;   // false when no observation exceeded the threshold
};

/// Tail and centering at u_n, reusable across replications of one n.
struct StatisticContext {
  const TheoryReport* theory = nullptr;
  const ThresholdSchedule* schedule = nullptr;
  const MarginalLaw* marginal = nullptr;
  double nu = 2.0;
  std::size_t n = 0;
  double u = 0.0;
  CenteringTerms centering;
  std::size_t k = 0;           // random-threshold count
  double q_threshold = 0.0;    // q_{X_0}(1 - k/n)
};

StatisticContext make_statistic_context(const TheoryReport& theory, const ThresholdSchedule& schedule,
                                        const MarginalLaw& marginal, double nu, std::size_t n,
                                        bool random_threshold);

PotStatistic normalized_statistic(CorollaryId id, std::span<const double> path,
                                  const StatisticContext& context);

/// Convenience form computing the context on the fly.
PotStatistic normalized_statistic(CorollaryId id, std::span<const double> path,
                                  const TheoryReport& theory, const ThresholdSchedule& schedule,
                                  const MarginalLaw& marginal, double nu);

/// CSV header and row: corollary_id,n,u_or_k,raw,centered_scaled,predicted_scale,admissible.
std::string_view pot_csv_header();
std::string to_csv_row(const PotStatistic& stat);

}  // namespace longtail
