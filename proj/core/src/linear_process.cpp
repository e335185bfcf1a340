#include "longtail/linear_process.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <random>
#include <string>

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "longtail/errors.hpp"
#include "longtail/seeding.hpp"

namespace longtail {

namespace {

// b^e - a^e for 0 < a <= b without cancellation.
double power_diff(double a, double b, double e) {
  return std::pow(a, e) * std::expm1(e * std::log1p((b - a) / a));
}

// Euler-Maclaurin antiderivative: sum_{i=a}^{b-1} i^-s = F(b) - F(a) up to
// O(a^{-s-7}), usable for a >= 20 and any s > 0 (s = 1 excluded).
double em_sum(double a, double b, double s) {
  auto corrections = [s](double x) {
    const double x1 = std::pow(x, -s);
    return -0.5 * x1 - s * x1 / (12.0 * x) + s * (s + 1) * (s + 2) * x1 / (720.0 * x * x * x) -
           s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * x1 / (30240.0 * std::pow(x, 5));
  };
  return power_diff(a, b, 1.0 - s) / (1.0 - s) + corrections(b) - corrections(a);
}

// sum_{m >= M} m^-p for p > 1 (Hurwitz zeta at integer offset).
double hurwitz_tail(double p, std::size_t M) {
  constexpr std::size_t kDirect = 20;
  double direct = 0.0;
  std::size_t m = std::max<std::size_t>(M, 1);
  for (; m < kDirect; ++m) direct += std::pow(static_cast<double>(m), -p);
  const double x = static_cast<double>(m);
  const double x1 = std::pow(x, -p);
  const double em = x * x1 / (p - 1.0) + 0.5 * x1 + p * x1 / (12.0 * x) -
                    p * (p + 1) * (p + 2) * x1 / (720.0 * x * x * x) +
                    p * (p + 1) * (p + 2) * (p + 3) * (p + 4) * x1 / (30240.0 * std::pow(x, 5));
  return direct + em;
}

// Prefix sums P[m] = sum_{j < m} a_j for m = 0..len.
std::vector<double> coefficient_prefix(double c_a, double d, std::size_t len) {
  std::vector<double> prefix(len + 1, 0.0);
  double acc = 0.0;
  double comp = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    const double y = coefficient(c_a, d, j) - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
    prefix[j + 1] = acc;
  }
  return prefix;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

void check_length(std::size_t n) {
  if (n == 0) throw InvalidArgument("path length n must be positive");
}

}  // namespace

void ProcessSpec::validate() const {
  innovation.validate();
  const double a = alpha();
  if (!(d > 0.0 && d < 1.0 - 1.0 / a)) {
    throw InvalidArgument("memory parameter d = " + std::to_string(d) + " outside (0, 1 - 1/alpha) = (0, " +
                          std::to_string(1.0 - 1.0 / a) + ")");
  }
  if (c_a == 0.0 || !std::isfinite(c_a)) throw InvalidArgument("coefficient constant c_a must be nonzero");
}

double coefficient(double c_a, double d, std::size_t j) {
  return c_a * std::pow(static_cast<double>(j + 1), d - 1.0);
}

std::vector<double> coefficients(const ProcessSpec& spec) {
  std::vector<double> a(spec.horizon + 1);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = coefficient(spec.c_a, spec.d, j);
  return a;
}

std::size_t truncation_horizon(double d, double alpha, double rel_tol, std::size_t max_horizon) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("rel_tol must lie in (0, 1)");
  const double p = (1.0 - d) * alpha;
  if (!(d > 0.0) || !(p > 1.0)) {
    throw InvalidArgument("tail series sum |a_j|^alpha diverges: need (1 - d) alpha > 1");
  }
  // |a_j|^alpha = |c_a|^alpha (j+1)^-p; the constant cancels in the ratio.
  const double total = boost::math::zeta(p);
  for (std::size_t J = 1; J <= max_horizon; J <<= 1) {
    const double tail = hurwitz_tail(p, J + 2);
    if (tail <= rel_tol * (total - tail)) return J;
    if (J > (max_horizon >> 1)) break;
  }
  throw InvalidArgument("truncation horizon exceeds the allowed maximum");
}

std::vector<double> convolve_direct(std::span<const double> coeffs, std::span<const double> innovations,
                                    std::size_t n) {
  const std::size_t J = coeffs.size() - 1;
  if (innovations.size() < n + J) throw InvalidArgument("need n + J innovations");
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double* e = innovations.data() + t + J;
    double acc = 0.0;
    for (std::size_t j = 0; j <= J; ++j) acc += coeffs[j] * *(e - j);
    out[t] = acc;
  }
  return out;
}

struct FftConvolver::Impl {
  std::size_t n = 0;
  std::size_t horizon = 0;
  std::size_t size = 0;
  fftw_complex* kernel = nullptr;  // spectrum of the zero-padded kernel, scaled by 1/size
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (kernel) fftw_free(kernel);
  }
};

FftConvolver::FftConvolver(std::span<const double> coeffs, std::size_t n) : impl_(std::make_unique<Impl>()) {
  check_length(n);
  auto& s = *impl_;
  s.n = n;
  s.horizon = coeffs.size() - 1;
  s.size = next_pow2(n + s.horizon);
  const std::size_t spec_len = s.size / 2 + 1;

  double* real = fftw_alloc_real(s.size);
  s.kernel = fftw_alloc_complex(spec_len);
  {
    std::lock_guard lock(fftw_planner_mutex());
    const int len = static_cast<int>(s.size);
    s.forward = fftw_plan_dft_r2c_1d(len, real, s.kernel, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_c2r_1d(len, s.kernel, real, FFTW_ESTIMATE);
  }
  std::fill(real, real + s.size, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), real);
  fftw_execute_dft_r2c(s.forward, real, s.kernel);
  const double inv = 1.0 / static_cast<double>(s.size);
  for (std::size_t k = 0; k < spec_len; ++k) {
    s.kernel[k][0] *= inv;
    s.kernel[k][1] *= inv;
  }
  fftw_free(real);
}

FftConvolver::~FftConvolver() = default;
FftConvolver::FftConvolver(FftConvolver&&) noexcept = default;
FftConvolver& FftConvolver::operator=(FftConvolver&&) noexcept = default;

std::size_t FftConvolver::fft_size() const { return impl_->size; }

std::vector<double> FftConvolver::apply(std::span<const double> innovations) const {
  const auto& s = *impl_;
  if (innovations.size() < s.n + s.horizon) throw InvalidArgument("need n + J innovations");
  const std::size_t spec_len = s.size / 2 + 1;
  double* real = fftw_alloc_real(s.size);
  fftw_complex* freq = fftw_alloc_complex(spec_len);

  // Circular convolution of length >= n + J; outputs J..J+n-1 never wrap.
  std::copy_n(innovations.begin(), s.n + s.horizon, real);
  std::fill(real + s.n + s.horizon, real + s.size, 0.0);
  fftw_execute_dft_r2c(s.forward, real, freq);
  for (std::size_t k = 0; k < spec_len; ++k) {
    const double re = freq[k][0] * s.kernel[k][0] - freq[k][1] * s.kernel[k][1];
    const double im = freq[k][0] * s.kernel[k][1] + freq[k][1] * s.kernel[k][0];
    freq[k][0] = re;
    freq[k][1] = im;
  }
  fftw_execute_dft_c2r(s.backward, freq, real);
  std::vector<double> out(real + s.horizon, real + s.horizon + s.n);
  fftw_free(freq);
  fftw_free(real);
  return out;
}

PathSimulator::PathSimulator(ProcessSpec spec, std::size_t n, Kernel kernel)
    : spec_(std::move(spec)), n_(n), kernel_(kernel) {
  spec_.validate();
  check_length(n);
  coeffs_ = coefficients(spec_);
  if (kernel_ == Kernel::Fft) fft_ = std::make_shared<const FftConvolver>(coeffs_, n_);
}

std::vector<double> PathSimulator::from_innovations(std::span<const double> innovations) const {
  if (kernel_ == Kernel::Fft) return fft_->apply(innovations);
  return convolve_direct(coeffs_, innovations, n_);
}

std::vector<double> PathSimulator::simulate(std::uint64_t seed) const {
  const auto innovations = sample_innovations(spec_.innovation, n_ + spec_.horizon, seed);
  return from_innovations(innovations);
}

std::vector<double> simulate_path(const ProcessSpec& spec, std::size_t n, std::uint64_t seed, Kernel kernel) {
  check_length(n);
  return PathSimulator(spec, n, kernel).simulate(seed);
}

std::vector<double> partial_sum_weights(const ProcessSpec& spec, std::size_t n) {
  check_length(n);
  const std::size_t J = spec.horizon;
  const auto prefix = coefficient_prefix(spec.c_a, spec.d, J + 1);
  std::vector<double> b(n + J);
  // Innovation index i sits at time s = i - J + 1 and feeds X_t with lag t - s in [0, J].
  for (std::size_t i = 0; i < b.size(); ++i) {
    const long long s = static_cast<long long>(i) - static_cast<long long>(J) + 1;
    const long long t_lo = std::max<long long>(1, s);
    const long long t_hi = std::min<long long>(static_cast<long long>(n), s + static_cast<long long>(J));
    b[i] = prefix[static_cast<std::size_t>(t_hi - s + 1)] - prefix[static_cast<std::size_t>(t_lo - s)];
  }
  return b;
}

std::vector<double> untruncated_window_weights(const ProcessSpec& spec, std::size_t n) {
  check_length(n);
  const std::size_t J = spec.horizon;
  const auto prefix = coefficient_prefix(spec.c_a, spec.d, n + J);
  std::vector<double> b(n + J);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const long long s = static_cast<long long>(i) - static_cast<long long>(J) + 1;
    const long long t_lo = std::max<long long>(1, s);
    b[i] = prefix[static_cast<std::size_t>(static_cast<long long>(n) - s + 1)] -
           prefix[static_cast<std::size_t>(t_lo - s)];
  }
  return b;
}

double remote_past_power_sum(double d, double c_a, std::size_t n, std::size_t horizon, double p) {
  check_length(n);
  const double s = 1.0 - d;
  if (!(s * p > 1.0)) throw InvalidArgument("remote past diverges: need (1 - d) p > 1");
  const double scale = std::pow(std::abs(c_a), p);
  const double nd = static_cast<double>(n);

  // Innovation q steps before X_1 carries B(q) = c_a sum_{i=q+2}^{n+q+1} i^-s.
  // Exact prefix sums below Q, Euler-Maclaurin in both indices above.
  const std::size_t Q = std::max<std::size_t>(horizon, 16 * n + 64);
  double exact = 0.0;
  if (horizon < Q) {
    std::vector<double> prefix(n + Q + 2, 0.0);  // prefix[m] = sum_{i=1}^{m} i^-s
    double acc = 0.0;
    double comp = 0.0;
    for (std::size_t i = 1; i < prefix.size(); ++i) {
      const double y = std::pow(static_cast<double>(i), -s) - comp;
      const double t = acc + y;
      comp = (t - acc) - y;
      acc = t;
      prefix[i] = acc;
    }
    for (std::size_t q = horizon; q < Q; ++q) exact += std::pow(prefix[n + q + 1] - prefix[q + 1], p);
  }

  // Smooth continuation of |B(q)|^p / |c_a|^p to real q >= Q.
  auto g = [&](double q) { return std::pow(em_sum(q + 2.0, nd + q + 2.0, s), p); };
  // sum_{q >= Q} g(q) = int_{Q-1/2}^inf g + O(g'(Q)); integrate in log q.
  const double q0 = static_cast<double>(Q) - 0.5;
  const double y_max = std::log(1e9 * nd / q0 + 1.0) + 1.0;
  auto integrand = [&](double y) {
    const double q = q0 * std::exp(y);
    return g(q) * q;
  };
  double err = 0.0;
  double head = 0.0;
  const int pieces = 16;
  for (int k = 0; k < pieces; ++k) {
    const double a = y_max * k / pieces;
    const double b = y_max * (k + 1) / pieces;
    head += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 10, 1e-13, &err);
  }
  // Beyond q_max the summand is c q^-(sp) to relative O(n / q_max).
  const double q_max = q0 * std::exp(y_max);
  const double far = g(q_max) * q_max / (s * p - 1.0);
  return scale * (exact + head + far);
}

double untruncated_weight_power_sum(double d, double c_a, std::size_t n, double p) {
  check_length(n);
  // Innovations at times 1..n carry A(n - s + 1) = sum_{j <= n - s} a_j.
  const auto prefix = coefficient_prefix(c_a, d, n);
  double inside = 0.0;
  for (std::size_t m = 1; m <= n; ++m) inside += std::pow(std::abs(prefix[m]), p);
  return inside + remote_past_power_sum(d, c_a, n, 0, p);
}

std::string_view to_string(MarginalKind kind) {
  switch (kind) {
    case MarginalKind::GaussianExact:
      return "GaussianExact";
    case MarginalKind::StableExact:
      return "StableExact";
    case MarginalKind::MonteCarloEmpirical:
      return "MonteCarloEmpirical";
  }
  return "unknown";
}

MarginalLaw MarginalLaw::gaussian(double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("variance must be positive");
  MarginalLaw law;
  law.kind_ = MarginalKind::GaussianExact;
  law.param_ = variance;
  law.alpha_ = 2.0;
  law.tail_index_ = std::numeric_limits<double>::infinity();
  return law;
}

MarginalLaw MarginalLaw::stable(double alpha, double scale) {
  StableLaw check(alpha, scale);
  MarginalLaw law;
  law.kind_ = MarginalKind::StableExact;
  law.param_ = scale;
  law.alpha_ = alpha;
  law.tail_index_ = alpha < 2.0 ? alpha : std::numeric_limits<double>::infinity();
  return law;
}

MarginalLaw MarginalLaw::empirical(std::vector<double> sample, double tail_index) {
  if (sample.size() < 2) throw InvalidArgument("empirical law needs at least two values");
  MarginalLaw law;
  law.kind_ = MarginalKind::MonteCarloEmpirical;
  std::sort(sample.begin(), sample.end());
  law.sample_ = std::move(sample);
  law.tail_index_ = tail_index;
  law.alpha_ = std::min(tail_index, 2.0);
  return law;
}

double MarginalLaw::variance() const {
  if (kind_ == MarginalKind::GaussianExact) return param_;
  if (kind_ == MarginalKind::StableExact) {
    return alpha_ == 2.0 ? 2.0 * param_ * param_ : std::numeric_limits<double>::infinity();
  }
  const double m = static_cast<double>(sample_.size());
  const double mean = std::accumulate(sample_.begin(), sample_.end(), 0.0) / m;
  double ss = 0.0;
  for (double v : sample_) ss += (v - mean) * (v - mean);
  return ss / (m - 1.0);
}

StableLaw MarginalLaw::stable_law() const {
  if (kind_ == MarginalKind::StableExact) return StableLaw(alpha_, param_);
  if (kind_ == MarginalKind::GaussianExact) return StableLaw(2.0, std::sqrt(param_ / 2.0));
  throw InvalidArgument("empirical marginal has no closed-form stable law");
}

double MarginalLaw::tail(double x) const {
  switch (kind_) {
    case MarginalKind::GaussianExact:
      return 0.5 * std::erfc(x / std::sqrt(2.0 * param_));
    case MarginalKind::StableExact:
      return sas_tail(StableLaw(alpha_, param_), x);
    case MarginalKind::MonteCarloEmpirical: {
      const auto it = std::upper_bound(sample_.begin(), sample_.end(), x);
      return static_cast<double>(sample_.end() - it) / static_cast<double>(sample_.size());
    }
  }
  return 0.0;
}

double MarginalLaw::cdf(double x) const {
  if (kind_ == MarginalKind::StableExact) return sas_cdf(StableLaw(alpha_, param_), x);
  return 1.0 - tail(x);
}

double MarginalLaw::pdf(double x) const {
  switch (kind_) {
    case MarginalKind::GaussianExact:
      return std::exp(-0.5 * x * x / param_) / std::sqrt(2.0 * std::numbers::pi * param_);
    case MarginalKind::StableExact:
      return sas_pdf(StableLaw(alpha_, param_), x);
    case MarginalKind::MonteCarloEmpirical: {
      // Box kernel with an IQR-based bandwidth; robust for infinite variance.
      const std::size_t m = sample_.size();
      const double iqr = sample_[3 * m / 4] - sample_[m / 4];
      const double h = 0.9 * (iqr / 1.34) * std::pow(static_cast<double>(m), -0.2);
      const auto lo = std::lower_bound(sample_.begin(), sample_.end(), x - h);
      const auto hi = std::upper_bound(sample_.begin(), sample_.end(), x + h);
      return static_cast<double>(hi - lo) / (2.0 * h * static_cast<double>(m));
    }
  }
  return 0.0;
}

double MarginalLaw::upper_quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  if (kind_ == MarginalKind::GaussianExact) return std::sqrt(param_) * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * q);
  if (kind_ == MarginalKind::StableExact) return sas_upper_quantile(StableLaw(alpha_, param_), q);
  const std::size_t m = sample_.size();
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 - q) * static_cast<double>(m)));
  return sample_[std::clamp<std::size_t>(rank, 1, m) - 1];
}

MarginalLaw marginal_law(const ProcessSpec& spec, std::size_t mc_sample_size, std::uint64_t mc_seed) {
  spec.validate();
  const auto a = coefficients(spec);
  const auto& inn = spec.innovation;
  switch (inn.family) {
    case Family::Gaussian: {
      double ss = 0.0;
      for (double v : a) ss += v * v;
      return MarginalLaw::gaussian(inn.variance() * ss);
    }
    case Family::SymmetricStable: {
      double sp = 0.0;
      for (double v : a) sp += std::pow(std::abs(v), inn.tail_index);
      return MarginalLaw::stable(inn.tail_index, inn.scale * std::pow(sp, 1.0 / inn.tail_index));
    }
    case Family::StudentT:
      return MarginalLaw::empirical(simulate_path(spec, mc_sample_size, mc_seed), inn.tail_index);
  }
  throw InvalidArgument("unsupported innovation family");
}

MarginalLaw partial_sum_law(const ProcessSpec& spec, std::size_t n, PastCompletion completion) {
  spec.validate();
  const auto& inn = spec.innovation;
  if (inn.family == Family::StudentT) {
    throw InvalidArgument("partial sums of Student-t innovations have no closed-form law");
  }
  const double p = inn.family == Family::Gaussian ? 2.0 : inn.tail_index;
  double power_sum = 0.0;
  if (completion == PastCompletion::Truncated) {
    for (double b : partial_sum_weights(spec, n)) power_sum += std::pow(std::abs(b), p);
  } else {
    power_sum = untruncated_weight_power_sum(spec.d, spec.c_a, n, p);
  }
  if (inn.family == Family::Gaussian) return MarginalLaw::gaussian(inn.variance() * power_sum);
  return MarginalLaw::stable(p, inn.scale * std::pow(power_sum, 1.0 / p));
}

PartialSumSampler::PartialSumSampler(ProcessSpec spec, std::size_t n, Kernel kernel)
    : sim_(std::move(spec), n, kernel) {
  const auto& sp = sim_.spec();
  if (sp.innovation.family == Family::StudentT) {
    throw InvalidArgument("remote-past completion needs Gaussian or stable innovations");
  }
  correction_ = untruncated_window_weights(sp, n);
  const auto truncated = partial_sum_weights(sp, n);
  for (std::size_t i = 0; i < correction_.size(); ++i) correction_[i] -= truncated[i];

  const bool gaussian = sp.innovation.family == Family::Gaussian;
  const double p = gaussian ? 2.0 : sp.innovation.tail_index;
  const double remote = remote_past_power_sum(sp.d, sp.c_a, n, sp.horizon, p);
  remote_scale_ = sp.innovation.scale * std::pow(remote, 1.0 / p);
}

PartialSumSampler::Draw PartialSumSampler::sample(std::uint64_t seed) const {
  const auto& sp = sim_.spec();
  const auto innovations = sample_innovations(sp.innovation, sim_.length() + sp.horizon, seed);
  const auto path = sim_.from_innovations(innovations);

  Draw draw;
  draw.truncated = std::accumulate(path.begin(), path.end(), 0.0);
  double correction = 0.0;
  for (std::size_t i = 0; i < correction_.size(); ++i) correction += correction_[i] * innovations[i];

  // Innovations older than the window are independent of everything drawn
  // above; their aggregate is a single draw from the closed-form law.
  double remote = 0.0;
  const auto stream = substream(seed, 1);
  if (sp.innovation.family == Family::Gaussian) {
    std::mt19937_64 gen(stream);
    remote = std::normal_distribution<double>(0.0, remote_scale_)(gen);
  } else {
    remote = sample_sas(StableLaw(sp.innovation.tail_index, remote_scale_), 1, stream).front();
  }
  draw.untruncated = draw.truncated + correction + remote;
  return draw;
}

}  // namespace longtail
