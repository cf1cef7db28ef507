#pragma once

// Closed-form achievable rates and capacity bounds for the Poisson channel
// with a gamma(1/2, eps_s) input, the exact mutual information of that input,
// and quadrature/summation cross-checks for all of them.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dtpc/channel.hpp"
#include "dtpc/quadrature.hpp"
#include "dtpc/special_functions.hpp"

namespace dtpc {

// Rate target: half the logarithm of one plus the energy.
inline double theorem_rate(double eps_s) {
  if (!(eps_s >= 0.0) || !std::isfinite(eps_s))
    throw std::domain_error("theorem_rate: eps_s must be finite and >= 0");
  return 0.5 * std::log1p(eps_s);
}

namespace detail {
inline void check_eps_s(double eps_s, const char* who) {
  if (!(eps_s > 0.0) || !std::isfinite(eps_s))
    throw std::domain_error(std::string(who) + ": eps_s must be positive and finite");
}
}  // namespace detail

// Generalized mutual information of the minimum-distance decoder with metric
// coefficient a at tilt s, in nats:
//   -s((a+1) eps_s + 1) + sqrt(2 eps_s s (1 + 2 a eps_s s))
//   + (1/2) log(1 + 2 a eps_s s).
inline double gmi_closed_form(double eps_s, double a, double s) {
  detail::check_eps_s(eps_s, "gmi_closed_form");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::domain_error("gmi_closed_form: a must be positive and finite");
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::domain_error("gmi_closed_form: s must be finite and >= 0");
  const double c = 1.0 + 2.0 * a * eps_s * s;
  return -s * ((a + 1.0) * eps_s + 1.0) + std::sqrt(2.0 * eps_s * s * c) +
         0.5 * std::log1p(2.0 * a * eps_s * s);
}

// The two non-logarithmic terms of gmi_closed_form. At the tilt s_hat they
// cancel exactly, leaving only the log term.
inline double gmi_nonlog_terms(double eps_s, double a, double s) {
  detail::check_eps_s(eps_s, "gmi_nonlog_terms");
  const double c = 1.0 + 2.0 * a * eps_s * s;
  return -s * ((a + 1.0) * eps_s + 1.0) + std::sqrt(2.0 * eps_s * s * c);
}

// Tilt at which the linear and square-root terms of the GMI cancel:
//   s_hat = 2 eps_s / ((a-1)^2 eps_s^2 + 2 eps_s (a+1) + 1).
inline double s_hat(double eps_s, double a) {
  detail::check_eps_s(eps_s, "s_hat");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::domain_error("s_hat: a must be positive and finite");
  const double am1 = a - 1.0;
  return 2.0 * eps_s /
         (am1 * am1 * eps_s * eps_s + 2.0 * eps_s * (a + 1.0) + 1.0);
}

struct GmiEvaluation {
  double eps_s;
  double a;
  double s;
  double value;
};

// Evaluate the GMI at explicit (a, s), defaulting to the matched coefficient
// a = 1 + 1/eps_s and the cancelling tilt s_hat.
inline GmiEvaluation evaluate_gmi(double eps_s,
                                  std::optional<double> a = std::nullopt,
                                  std::optional<double> s = std::nullopt) {
  detail::check_eps_s(eps_s, "evaluate_gmi");
  const double coeff = a ? *a : 1.0 + 1.0 / eps_s;
  const double tilt = s ? *s : s_hat(eps_s, coeff);
  return {eps_s, coeff, tilt, gmi_closed_form(eps_s, coeff, tilt)};
}

// s_hat is a stationary point by construction, not a proven maximizer; this
// scans a log-spaced grid of tilts around it and reports the best seen.
struct TiltScanResult {
  double best_s;
  double best_value;
};

inline TiltScanResult scan_gmi_tilt(double eps_s, double a,
                                    double lo_factor = 0.1,
                                    double hi_factor = 10.0, int points = 121) {
  if (points < 2) throw std::invalid_argument("scan_gmi_tilt: points must be >= 2");
  const double centre = s_hat(eps_s, a);
  const double lo = std::log(centre * lo_factor);
  const double hi = std::log(centre * hi_factor);
  TiltScanResult best{centre * lo_factor, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < points; ++i) {
    const double s = std::exp(lo + (hi - lo) * i / (points - 1));
    const double v = gmi_closed_form(eps_s, a, s);
    if (v > best.best_value) best = {s, v};
  }
  return best;
}

// Rival capacity lower bound (after Lapidoth & Moser 2009):
//   (1 + eps_s) log(1 + 1/eps_s) + (1/2) log eps_s - 1 - sqrt(pi / (24 eps_s)).
inline double lapidoth_moser_bound(double eps_s) {
  detail::check_eps_s(eps_s, "lapidoth_moser_bound");
  return (1.0 + eps_s) * std::log1p(1.0 / eps_s) + 0.5 * std::log(eps_s) -
         1.0 - std::sqrt(kPi / (24.0 * eps_s));
}

// Closed form of the weighted metric denominator
//   D(y) = E[ exp(-w X) q(X, y)^s ]
// under the gamma(1/2) input; with c = 1 + 2 eps_s (a s + w) it equals
//   exp(-y sqrt(2 s c / eps_s)) / sqrt(c).
inline double log_weighted_metric_denominator(std::int64_t y, double eps_s,
                                              const DecoderConfig& cfg) {
  if (y < 0)
    throw std::domain_error("log_weighted_metric_denominator: y must be >= 0");
  detail::check_eps_s(eps_s, "log_weighted_metric_denominator");
  const double c = 1.0 + 2.0 * eps_s * (cfg.a * cfg.s + cfg.weight_rate);
  return -static_cast<double>(y) * std::sqrt(2.0 * cfg.s * c / eps_s) -
         0.5 * std::log(c);
}

inline double weighted_metric_denominator(std::int64_t y, double eps_s,
                                          const DecoderConfig& cfg) {
  return std::exp(log_weighted_metric_denominator(y, eps_s, cfg));
}

// Mismatched-decoding rate with unit metric coefficient and input weighting
// e^{-(s/eps_s) x}. Same three-term shape as the GMI with the weighting
// folded in; c = 1 + 2 s (1 + eps_s).
inline double lm_closed_form(double eps_s, double s) {
  detail::check_eps_s(eps_s, "lm_closed_form");
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::domain_error("lm_closed_form: s must be finite and >= 0");
  const double c = 1.0 + 2.0 * s * (1.0 + eps_s);
  return -2.0 * s * (1.0 + eps_s) + std::sqrt(2.0 * eps_s * s * c) +
         0.5 * std::log1p(2.0 * s * (1.0 + eps_s));
}

inline double lm_nonlog_terms(double eps_s, double s) {
  detail::check_eps_s(eps_s, "lm_nonlog_terms");
  const double c = 1.0 + 2.0 * s * (1.0 + eps_s);
  return -2.0 * s * (1.0 + eps_s) + std::sqrt(2.0 * eps_s * s * c);
}

// Tilt at which the non-logarithmic terms of lm_closed_form cancel, found by
// bisection on their sign change (they are positive below the root and
// negative above it).
inline double lm_cancellation_tilt(double eps_s) {
  detail::check_eps_s(eps_s, "lm_cancellation_tilt");
  double lo = 0.0;  // nonlog terms -> 0+ like sqrt(s)
  double hi = 1.0;
  int doublings = 0;
  while (lm_nonlog_terms(eps_s, hi) > 0.0) {
    hi *= 2.0;
    if (++doublings > 60)
      throw ConvergenceError("lm_cancellation_tilt: no sign change found");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (lm_nonlog_terms(eps_s, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// lm_closed_form evaluated at its cancellation tilt; this must reproduce
// theorem_rate(eps_s) exactly, which the tests assert.
inline double lm_rate_check(double eps_s) {
  return lm_closed_form(eps_s, lm_cancellation_tilt(eps_s));
}

// Exact mutual information of the gamma(nu, eps_s) input, as a single
// u-integral over (0,1) plus closed-form terms.
inline double exact_mi_gamma(double eps_s, double nu, double tol = 1e-9,
                             int max_subdivisions = 2000) {
  detail::check_eps_s(eps_s, "exact_mi_gamma");
  if (!(nu > 0.0 && nu <= 4.0))
    throw std::domain_error("exact_mi_gamma: nu must lie in (0, 4]");
  if (!(tol >= 1e-10))
    throw std::domain_error("exact_mi_gamma: tol must be >= 1e-10");
  IntegrationRequest req;
  req.integrand = [eps_s, nu](double u) { return mi_integrand(eps_s, nu, u); };
  req.lower = 0.0;
  req.upper = 1.0;
  req.rel_tol = tol;
  req.abs_tol = 1e-12;
  req.max_subdivisions = max_subdivisions;
  const IntegrationResult r = integrate_adaptive(req);
  if (!r.converged)
    throw ConvergenceError("exact_mi_gamma: u-integral did not converge");
  return r.value + (eps_s + nu) * std::log((eps_s + nu) / nu) +
         eps_s * (digamma(nu + 1.0) - 1.0);
}

// Output marginal of the gamma(nu, eps_s) input through the Poisson channel;
// integrating the conditional law against the input density gives a negative
// binomial:
//   P_Y(y) = Gamma(y + nu) / (y! Gamma(nu)) (nu/(nu+eps_s))^nu (eps_s/(nu+eps_s))^y.
inline double log_output_marginal(std::int64_t y, double eps_s, double nu) {
  if (y < 0) throw std::domain_error("log_output_marginal: y must be >= 0");
  detail::check_eps_s(eps_s, "log_output_marginal");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::domain_error("log_output_marginal: nu must be positive and finite");
  const double dy = static_cast<double>(y);
  return log_gamma(dy + nu) - log_factorial(y) - log_gamma(nu) +
         nu * std::log(nu / (nu + eps_s)) + dy * std::log(eps_s / (nu + eps_s));
}

inline double output_marginal(std::int64_t y, double eps_s, double nu) {
  return std::exp(log_output_marginal(y, eps_s, nu));
}

// Direct mutual-information evaluation used as an oracle for exact_mi_gamma:
// I = sum_y int p(x) W(y|x) log(W(y|x)/P_Y(y)) dx, with the y-sum truncated
// once the marginal tail is negligible and each inner integral split around
// the conditional bump at x ~ y.
inline double exact_mi_direct(double eps_s, double nu, double tol = 1e-9,
                              int max_subdivisions = 2000) {
  detail::check_eps_s(eps_s, "exact_mi_direct");
  if (!(nu > 0.0 && nu <= 4.0))
    throw std::domain_error("exact_mi_direct: nu must lie in (0, 4]");
  const GammaInput input(nu, eps_s);
  const double sd = std::sqrt(eps_s + eps_s * eps_s / nu);
  const double y_floor = eps_s + 10.0 * sd + 30.0;
  double total = 0.0;
  for (std::int64_t y = 0;; ++y) {
    const double log_py = log_output_marginal(y, eps_s, nu);
    const double dy = static_cast<double>(y);
    auto integrand = [&input, y, log_py](double x) {
      const double log_w = log_poisson_pmf(y, x);
      if (log_w == -std::numeric_limits<double>::infinity()) return 0.0;
      return gamma_density(x, input) * std::exp(log_w) * (log_w - log_py);
    };
    // Split around the conditional bump so the first panel cannot overlook it.
    const double bump_lo = dy - 10.0 * std::sqrt(dy) - 10.0;
    const double bump_hi = dy + 10.0 * std::sqrt(dy) + 20.0;
    double cuts[3];
    int n_cuts = 0;
    if (bump_lo > 0.0) cuts[n_cuts++] = bump_lo;
    cuts[n_cuts++] = bump_hi;
    cuts[n_cuts++] = std::numeric_limits<double>::infinity();
    double lower = 0.0;
    double term = 0.0;
    for (int i = 0; i < n_cuts; ++i) {
      IntegrationRequest req;
      req.integrand = integrand;
      req.lower = lower;
      req.upper = cuts[i];
      req.rel_tol = std::max(1e-11, 0.01 * tol);
      req.abs_tol = 1e-18;
      req.max_subdivisions = max_subdivisions;
      const IntegrationResult r = integrate_adaptive(req);
      if (!r.converged)
        throw ConvergenceError("exact_mi_direct: inner integral did not converge");
      term += r.value;
      lower = cuts[i];
    }
    total += term;
    if (dy > y_floor && log_py < std::log(1e-17)) break;
  }
  return total;
}

// Identifiers for the quantities a bounds sweep can tabulate.
enum class BoundId { theorem_rate, gmi, lm, lapidoth_moser, exact_mi, mc_gmi, mc_lm };

struct BoundPoint {
  double eps_s;
  BoundId bound_id;
  double value;
};

inline const char* to_string(BoundId id) {
  switch (id) {
    case BoundId::theorem_rate: return "theorem-rate";
    case BoundId::gmi: return "gmi";
    case BoundId::lm: return "lm";
    case BoundId::lapidoth_moser: return "lapidoth-moser";
    case BoundId::exact_mi: return "exact-mi";
    case BoundId::mc_gmi: return "mc-gmi";
    case BoundId::mc_lm: return "mc-lm";
  }
  return "unknown";
}

inline std::optional<BoundId> bound_id_from_string(std::string_view name) {
  if (name == "theorem-rate") return BoundId::theorem_rate;
  if (name == "gmi") return BoundId::gmi;
  if (name == "lm") return BoundId::lm;
  if (name == "lapidoth-moser") return BoundId::lapidoth_moser;
  if (name == "exact-mi") return BoundId::exact_mi;
  if (name == "mc-gmi") return BoundId::mc_gmi;
  if (name == "mc-lm") return BoundId::mc_lm;
  return std::nullopt;
}

}  // namespace dtpc
