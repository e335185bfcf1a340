#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "longtail/innovations.hpp"
#include "longtail/stable.hpp"

namespace longtail {

/// Causal linear process X_t = sum_{j=0}^{J} a_j eps_{t-j} with
/// a_j = c_a (j + 1)^-(1 - d).
struct ProcessSpec {
  double d = 0.1;
  double c_a = 1.0;
  InnovationSpec innovation;
  std::size_t horizon = 1024;  // J

  double alpha() const { return innovation.alpha(); }

  /// Requires 0 < d < 1 - 1/alpha, c_a != 0 and a valid innovation law.
  void validate() const;
};

/// Single coefficient a_j = c_a (j + 1)^-(1 - d).
double coefficient(double c_a, double d, std::size_t j);

/// a_0 .. a_J.
std::vector<double> coefficients(const ProcessSpec& spec);

/// Smallest power of two J such that the discarded tail sum_{j > J} |a_j|^alpha
/// is at most rel_tol * sum_{j <= J} |a_j|^alpha. Throws InvalidArgument when
/// (1 - d) alpha <= 1 (divergent tail) or when J would exceed `max_horizon`.
std::size_t truncation_horizon(double d, double alpha, double rel_tol = 1e-3,
                               std::size_t max_horizon = std::size_t{1} << 62);

enum class Kernel { Direct, Fft };

/// Output t = 0..n-1 of the truncated convolution, where innovation index
/// t + J - j feeds lag j. `innovations` must hold n + J values.
std::vector<double> convolve_direct(std::span<const double> coeffs,
                                    std::span<const double> innovations, std::size_t n);

/// Overlap-free FFT convolution with a cached kernel spectrum. One instance
/// may be shared read-only; `apply` allocates its own work buffers.
class FftConvolver {
 public:
  FftConvolver(std::span<const double> coeffs, std::size_t n);
  ~FftConvolver();
  FftConvolver(FftConvolver&&) noexcept;
  FftConvolver& operator=(FftConvolver&&) noexcept;
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  std::vector<double> apply(std::span<const double> innovations) const;
  std::size_t fft_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reusable path generator for one (spec, n): coefficients and the kernel
/// spectrum are computed once.
class PathSimulator {
 public:
  PathSimulator(ProcessSpec spec, std::size_t n, Kernel kernel = Kernel::Fft);

  std::vector<double> simulate(std::uint64_t seed) const;
  /// Path from caller-provided innovations (n + J values).
  std::vector<double> from_innovations(std::span<const double> innovations) const;

  const ProcessSpec& spec() const { return spec_; }
  std::size_t length() const { return n_; }
  std::span<const double> coeffs() const { return coeffs_; }

 private:
  ProcessSpec spec_;
  std::size_t n_;
  Kernel kernel_;
  std::vector<double> coeffs_;
  std::shared_ptr<const FftConvolver> fft_;
};

/// X_1..X_n from n + J innovations drawn once from `seed`.
std::vector<double> simulate_path(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                                  Kernel kernel = Kernel::Fft);

/// Weights b with sum_t X_t = sum_i b_i eps_i over the n + J innovations of
/// the truncated kernel, indexed like the innovation array of simulate_path.
std::vector<double> partial_sum_weights(const ProcessSpec& spec, std::size_t n);

/// Partial-sum weights of the untruncated process restricted to the n + J
/// innovations of the simulation window.
std::vector<double> untruncated_window_weights(const ProcessSpec& spec, std::size_t n);

/// sum over innovations older than the window (lag distance >= J before X_1)
/// of |B|^p, where B are the untruncated partial-sum weights.
double remote_past_power_sum(double d, double c_a, std::size_t n, std::size_t horizon, double p);

/// sum_k |B_{n,k}|^p over every innovation of the untruncated process.
double untruncated_weight_power_sum(double d, double c_a, std::size_t n, double p);

enum class MarginalKind { GaussianExact, StableExact, MonteCarloEmpirical };

/// Law of a linear functional sum_i w_i eps_i of the innovations: the
/// stationary marginal of X_0 or the law of a partial sum.
class MarginalLaw {
 public:
  static MarginalLaw gaussian(double variance);
  static MarginalLaw stable(double alpha, double scale);
  /// Empirical law from a sample; `tail_index` is carried for labelling.
  static MarginalLaw empirical(std::vector<double> sample, double tail_index);

  MarginalKind kind() const { return kind_; }
  bool exact() const { return kind_ != MarginalKind::MonteCarloEmpirical; }
  double variance() const;
  StableLaw stable_law() const;
  double tail_index() const { return tail_index_; }
  std::size_t sample_size() const { return sample_.size(); }
  std::span<const double> sample() const { return sample_; }

  double cdf(double x) const;
  double tail(double x) const;
  double pdf(double x) const;
  /// x with P[X > x] = q.
  double upper_quantile(double q) const;

 private:
  MarginalKind kind_ = MarginalKind::GaussianExact;
  double param_ = 1.0;  // variance or stable scale
  double alpha_ = 2.0;
  double tail_index_ = 0.0;
  std::vector<double> sample_;  // sorted ascending
};

std::string_view to_string(MarginalKind kind);

/// Stationary law of X_0 for the truncated process. Student-t innovations
/// fall back to a Monte Carlo sample of `mc_sample_size` path values.
MarginalLaw marginal_law(const ProcessSpec& spec, std::size_t mc_sample_size = 200000,
                         std::uint64_t mc_seed = 0x5eed);

enum class PastCompletion { Truncated, Untruncated };

/// Exact law of sum_{t=1}^n X_t (Gaussian or stable innovations only).
MarginalLaw partial_sum_law(const ProcessSpec& spec, std::size_t n,
                            PastCompletion completion = PastCompletion::Truncated);

/// Draws sum_{t=1}^n X_t by summing a simulated path. With
/// PastCompletion::Untruncated the missing long-memory contribution is added
/// exactly in law: the kernel lags beyond J applied to the window's own
/// innovations, plus one independent draw aggregating the remote past.
class PartialSumSampler {
 public:
  PartialSumSampler(ProcessSpec spec, std::size_t n, Kernel kernel = Kernel::Fft);

  struct Draw {
    double truncated = 0.0;
    double untruncated = 0.0;
  };
  Draw sample(std::uint64_t seed) const;

 private:
  PathSimulator sim_;
  std::vector<double> correction_;  // untruncated minus truncated weights
  double remote_scale_ = 0.0;       // stable scale or standard deviation
};

}  // namespace longtail
