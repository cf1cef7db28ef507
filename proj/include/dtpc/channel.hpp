#pragma once

// Discrete-time Poisson channel, the gamma input family, exact samplers for
// both, and the mismatched minimum-distance decoder metric.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "dtpc/rng.hpp"
#include "dtpc/special_functions.hpp"

namespace dtpc {

// Average input energy per channel use. Validated once at construction so the
// hot paths can take it for granted.
struct EnergyBudget {
  double eps_s;
  explicit EnergyBudget(double value) : eps_s(value) {
    if (!(std::isfinite(value) && value > 0.0))
      throw std::domain_error("EnergyBudget: eps_s must be positive and finite");
  }
};

// Gamma input density with shape nu and mean eps_s:
//   p(x) = (nu/eps_s)^nu x^(nu-1) exp(-nu x / eps_s) / Gamma(nu).
struct GammaInput {
  double nu;
  double eps_s;
  GammaInput(double shape, double mean) : nu(shape), eps_s(mean) {
    if (!(std::isfinite(shape) && shape > 0.0))
      throw std::domain_error("GammaInput: nu must be positive and finite");
    if (!(std::isfinite(mean) && mean > 0.0))
      throw std::domain_error("GammaInput: eps_s must be positive and finite");
  }
};

// Decoder parameters: metric coefficient a, tilt s, and the exponential
// weighting rate applied to the input density inside the metric denominator.
struct DecoderConfig {
  double a;
  double s;
  double weight_rate;
  explicit DecoderConfig(double metric_coeff, double tilt, double weighting = 0.0)
      : a(metric_coeff), s(tilt), weight_rate(weighting) {
    if (!(std::isfinite(a) && a > 0.0))
      throw std::domain_error("DecoderConfig: a must be positive");
    if (!(std::isfinite(s) && s >= 0.0))
      throw std::domain_error("DecoderConfig: s must be nonnegative");
    if (!(std::isfinite(weight_rate) && weight_rate >= 0.0))
      throw std::domain_error("DecoderConfig: weight_rate must be nonnegative");
  }
};

struct ChannelSample {
  double x;
  std::int64_t y;
};

inline double log_poisson_pmf(std::int64_t y, double x) {
  if (y < 0) throw std::domain_error("log_poisson_pmf: y must be >= 0");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("log_poisson_pmf: x must be finite and >= 0");
  if (x == 0.0)
    return y == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -x + static_cast<double>(y) * std::log(x) - log_factorial(y);
}

inline double poisson_pmf(std::int64_t y, double x) {
  if (y < 0) throw std::domain_error("poisson_pmf: y must be >= 0");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("poisson_pmf: x must be finite and >= 0");
  if (x == 0.0) return y == 0 ? 1.0 : 0.0;
  return std::exp(log_poisson_pmf(y, x));
}

inline double gamma_density(double x, const GammaInput& input) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("gamma_density: x must be positive and finite");
  const double nu = input.nu;
  const double rate = nu / input.eps_s;
  return std::exp(nu * std::log(rate) + (nu - 1.0) * std::log(x) - rate * x -
                  log_gamma(nu));
}

// Smallest y beyond which the Poisson(x) tail is below 1e-12, by the Chernoff
// bound P(Y >= k) <= exp(k - x - k log(k/x)); never less than x + 12 sqrt(x) + 20.
inline std::int64_t poisson_truncation_limit(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("poisson_truncation_limit: x must be finite and >= 0");
  auto k = static_cast<std::int64_t>(std::ceil(x + 12.0 * std::sqrt(x) + 20.0));
  if (x > 0.0) {
    const double log_tail_target = std::log(1e-12);
    auto chernoff_exponent = [x](std::int64_t kk) {
      const double dk = static_cast<double>(kk);
      return dk - x - dk * std::log(dk / x);
    };
    while (chernoff_exponent(k) > log_tail_target) ++k;
  }
  return k;
}

// Exact gamma(1/2) sampler: eps_s * Z^2 for standard normal Z. Draws whose
// magnitude would underflow the densities downstream (x < 1e-300 eps_s, an
// event of probability ~1e-150) are redrawn.
inline double sample_gamma_input(const GammaInput& input, RngStream& rng) {
  if (input.nu != 0.5)
    throw std::domain_error("sample_gamma_input: only the nu = 1/2 family is sampled");
  for (;;) {
    const double z = rng.normal();
    const double x = input.eps_s * z * z;
    if (x >= 1e-300 * input.eps_s) return x;
  }
}

namespace detail {

// Inversion by sequential search; used for small means where the expected
// number of iterations is ~x.
inline std::int64_t sample_poisson_inversion(double x, RngStream& rng) {
  const double u = rng.uniform();
  double pmf = std::exp(-x);
  double cdf = pmf;
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    pmf *= x / static_cast<double>(k);
    cdf += pmf;
    if (k > 2000) break;  // beyond double-precision tail mass for x < 10
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler (W. Hormann, "The transformed
// rejection method for generating Poisson random variables", 1993). Exact for
// means >= 10.
inline std::int64_t sample_poisson_ptrs(double x, RngStream& rng) {
  const double log_x = std::log(x);
  const double b = 0.931 + 2.53 * std::sqrt(x);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + x + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || kf > 9.0e15 || (us < 0.013 && v > us)) continue;
    const double log_accept = std::log(v * inv_alpha / (a / (us * us) + b));
    if (log_accept <= kf * log_x - x - log_gamma(kf + 1.0))
      return static_cast<std::int64_t>(kf);
  }
}

}  // namespace detail

inline std::int64_t sample_poisson(double x, RngStream& rng) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("sample_poisson: x must be finite and >= 0");
  if (x == 0.0) return 0;
  return x < 10.0 ? detail::sample_poisson_inversion(x, rng)
                  : detail::sample_poisson_ptrs(x, rng);
}

inline ChannelSample sample_channel(const GammaInput& input, RngStream& rng) {
  const double x = sample_gamma_input(input, rng);
  return {x, sample_poisson(x, rng)};
}

enum class DistanceForm { full, reduced };

// Decoder distance d(x, y) = (y - sqrt(a) x)^2 / x. The reduced form drops the
// -2 sqrt(a) y cross term, which is the same for every candidate codeword
// symbol and therefore never changes a comparison between codewords.
inline double decoder_distance(double x, std::int64_t y, double a,
                               DistanceForm form = DistanceForm::full) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("decoder_distance: x must be positive and finite");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::domain_error("decoder_distance: a must be positive and finite");
  if (y < 0) throw std::domain_error("decoder_distance: y must be >= 0");
  const double dy = static_cast<double>(y);
  if (form == DistanceForm::full) {
    const double r = dy - std::sqrt(a) * x;
    return r * r / x;
  }
  return dy * dy / x + a * x;
}

// log q(x,y)^s for the decoding metric q(x,y) = exp(-a x - y^2 / x).
inline double metric_value(double x, std::int64_t y, const DecoderConfig& cfg) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("metric_value: x must be positive and finite");
  if (y < 0) throw std::domain_error("metric_value: y must be >= 0");
  const double dy = static_cast<double>(y);
  return cfg.s * (-cfg.a * x - dy * dy / x);
}

}  // namespace dtpc
