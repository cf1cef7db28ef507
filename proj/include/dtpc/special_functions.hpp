#pragma once

// Log-gamma and digamma. Self-contained so the library never depends on the
// non-reentrant corners of libm (lgamma writes signgam).

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dtpc {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Lanczos approximation, g = 7 with 9 coefficients (Godfrey's set).
// Absolute error on log Gamma is a few 1e-14 over the positive reals.
inline double log_gamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::domain_error("log_gamma: argument must be positive and finite");
  static constexpr double coeff[9] = {
      0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
      771.32342877765313,     -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z < 0.5) {
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(kPi / std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  const double zm1 = z - 1.0;
  double series = coeff[0];
  for (int i = 1; i < 9; ++i) series += coeff[i] / (zm1 + i);
  const double t = zm1 + 7.5;  // g + 1/2
  return 0.5 * std::log(2.0 * kPi) + (zm1 + 0.5) * std::log(t) - t +
         std::log(series);
}

inline double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  return log_gamma(static_cast<double>(n) + 1.0);
}

// Recurrence shift to z >= 10, then the asymptotic series through z^-14;
// truncation error there is below 1e-16.
inline double digamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::domain_error("digamma: argument must be positive and finite");
  double shift = 0.0;
  while (z < 10.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  const double w = 1.0 / (z * z);
  const double tail =
      w * (1.0 / 12.0 -
           w * (1.0 / 120.0 -
                w * (1.0 / 252.0 -
                     w * (1.0 / 240.0 -
                          w * (1.0 / 132.0 -
                               w * (691.0 / 32760.0 - w * (1.0 / 12.0)))))));
  return shift + std::log(z) - 0.5 / z - tail;
}

}  // namespace dtpc
