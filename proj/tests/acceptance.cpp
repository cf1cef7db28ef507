// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Each check states its tolerance inline; nothing here adapts thresholds to
// the observed values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dtpc/analytic.hpp"
#include "dtpc/channel.hpp"
#include "dtpc/montecarlo.hpp"
#include "dtpc/quadrature.hpp"
#include "dtpc/rng.hpp"
#include "dtpc/sweep.hpp"

using namespace dtpc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

bool run_criterion(int index, const char* title,
                   const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] %d %s: %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL",
              index, title, outcome.detail.c_str(), seconds);
  std::fflush(stdout);
  return outcome.pass;
}

std::vector<double> energy_grid() {
  return make_grid(0.01, 100.0, 40, GridScale::log);
}

double quadrature_denominator(std::int64_t y, double eps, const DecoderConfig& cfg) {
  IntegrationRequest req;
  const GammaInput input(0.5, eps);
  const double dy = static_cast<double>(y);
  req.integrand = [&, dy](double x) {
    return std::exp(-cfg.weight_rate * x + cfg.s * (-cfg.a * x - dy * dy / x)) *
           gamma_density(x, input);
  };
  req.lower = 0.0;
  req.upper = std::numeric_limits<double>::infinity();
  req.rel_tol = 1e-11;
  req.abs_tol = 1e-300;
  const IntegrationResult r = integrate_adaptive(req);
  if (!r.converged) throw ConvergenceError("denominator quadrature stalled");
  return r.value;
}

Outcome criterion_rate_identity() {
  double worst = 0.0;
  for (double eps : energy_grid()) {
    const double a = 1.0 + 1.0 / eps;
    const double dev = std::fabs(gmi_closed_form(eps, a, s_hat(eps, a)) -
                                 theorem_rate(eps));
    worst = std::max(worst, dev);
  }
  return {worst <= 1e-12,
          fmt("max |gmi - half log(1+eps)| = %.2e (tol 1e-12) over 40 points",
              worst)};
}

Outcome criterion_cancellation() {
  double worst_identity = 0.0;
  double worst_sum = 0.0;
  for (double eps : energy_grid()) {
    const double a = 1.0 + 1.0 / eps;
    const double s = s_hat(eps, a);
    worst_identity = std::max(worst_identity, std::fabs(2.0 * a * s - 1.0));
    worst_sum = std::max(worst_sum, std::fabs(gmi_nonlog_terms(eps, a, s)));
  }
  const bool pass = worst_identity <= 1e-14 && worst_sum <= 1e-12;
  return {pass,
          fmt("max |2 a s_hat - 1| = %.2e (tol 1e-14), max |non-log sum| = "
              "%.2e (tol 1e-12)",
              worst_identity, worst_sum)};
}

Outcome criterion_denominator() {
  double worst = 0.0;
  for (double eps : {0.1, 1.0, 10.0}) {
    const double a = 1.0 + 1.0 / eps;
    const double centre = s_hat(eps, a);
    for (double s : {0.5 * centre, centre, 2.0 * centre}) {
      for (double w : {0.0, s / eps}) {
        const DecoderConfig cfg(a, s, w);
        for (std::int64_t y : {std::int64_t(0), std::int64_t(1),
                               std::int64_t(5), std::int64_t(20)}) {
          const double closed = weighted_metric_denominator(y, eps, cfg);
          const double direct = quadrature_denominator(y, eps, cfg);
          worst = std::max(worst, std::fabs(direct - closed) / closed);
        }
      }
    }
  }
  return {worst <= 1e-8,
          fmt("max relative error %.2e (tol 1e-8) over 72 denominator points",
              worst)};
}

Outcome criterion_mi_oracle() {
  double worst = 0.0;
  for (double eps : {0.1, 1.0, 10.0}) {
    for (double nu : {0.5, 1.0, 2.0}) {
      const double integral = exact_mi_gamma(eps, nu, 1e-10);
      const double summed = exact_mi_direct(eps, nu, 1e-9);
      worst = std::max(worst,
                       std::fabs(integral - summed) / std::fabs(summed));
    }
  }
  return {worst <= 1e-6,
          fmt("max relative disagreement %.2e (tol 1e-6) over 9 (eps, nu) "
              "points",
              worst)};
}

Outcome criterion_dominance() {
  double min_mi_gap = std::numeric_limits<double>::infinity();
  double min_rival_gap = std::numeric_limits<double>::infinity();
  for (double eps : energy_grid()) {
    const double rate = theorem_rate(eps);
    min_mi_gap = std::min(min_mi_gap, exact_mi_gamma(eps, 0.5) - rate);
    min_rival_gap = std::min(min_rival_gap, rate - lapidoth_moser_bound(eps));
  }
  const double rival_at_one = lapidoth_moser_bound(1.0);
  const double rival_dev = std::fabs(rival_at_one - 0.024493);
  const bool pass =
      min_mi_gap >= 0.0 && min_rival_gap >= 0.0 && rival_dev <= 1e-6;
  return {pass,
          fmt("min(MI - rate) = %.2e, min(rate - rival) = %.2e, rival(1) = "
              "%.9f (|dev| = %.1e, tol 1e-6)",
              min_mi_gap, min_rival_gap, rival_at_one, rival_dev)};
}

Outcome criterion_monte_carlo() {
  const double target = 0.3465736;
  const McEstimate gmi = estimate_gmi_mc(1.0, 2.0, 0.25, 1000000, 7);
  const double gmi_dev = std::fabs(gmi.mean - target);
  const double lm_tilt = lm_cancellation_tilt(1.0);
  const McEstimate lm = estimate_lm_mc(1.0, lm_tilt, 1000000, 9);
  const double lm_dev = std::fabs(lm.mean - target);
  const bool pass =
      gmi_dev <= 4.0 * gmi.std_error && lm_dev <= 4.0 * lm.std_error;
  return {pass,
          fmt("gmi dev %.2e vs 4 se = %.2e (seed 7); weighted dev %.2e vs 4 "
              "se = %.2e (seed 9)",
              gmi_dev, 4.0 * gmi.std_error, lm_dev, 4.0 * lm.std_error)};
}

Outcome criterion_decoder() {
  std::string detail;
  bool pass = true;

  // Error rate must not rise with blocklength at a rate under the bound.
  const int ladder[] = {8, 12, 16, 20};
  double prev = 1.0;
  std::string rates;
  for (const int n : ladder) {
    const CodingResult r = run_random_coding(10.0, 1.1, 0.6, n, 200, 1);
    rates += fmt("%s%d/200", rates.empty() ? "" : ", ", r.errors);
    if (r.error_rate() > prev + 1e-12) pass = false;
    prev = r.error_rate();
  }
  detail += "ladder errors {" + rates + "}";

  // Paired full/reduced runs must decide identically, trial by trial.
  std::vector<std::uint64_t> reduced_decisions, full_decisions;
  CodingOptions reduced;
  reduced.decisions = &reduced_decisions;
  CodingOptions full;
  full.form = DistanceForm::full;
  full.decisions = &full_decisions;
  run_random_coding(10.0, 1.1, 0.6, 12, 200, 1, reduced);
  run_random_coding(10.0, 1.1, 0.6, 12, 200, 1, full);
  const bool paired = reduced_decisions == full_decisions;
  if (!paired) pass = false;
  detail += paired ? "; paired decisions identical" : "; paired decisions DIFFER";

  // Far above every bound the decoder must fail essentially always. The
  // specified geometry (rate 3, n = 12) implies ceil(e^36) = 4.3e15 candidate
  // codewords per trial; scanning them is far beyond desk scale, so the run
  // uses an explicit 2^22-candidate budget per trial, which can only
  // under-count errors. The threshold is asserted against that lower bound.
  CodingOptions budgeted;
  budgeted.max_codebook = std::uint64_t(1) << 53;
  budgeted.scan_limit = std::uint64_t(1) << 22;
  const CodingResult hot = run_random_coding(10.0, 1.1, 3.0, 12, 200, 1, budgeted);
  const bool hot_pass = hot.error_rate() > 0.9;
  if (!hot_pass) pass = false;
  detail += fmt("; rate-3 error rate >= %.3f (lower bound: %d/200 errors "
                "within a 2^22-candidate scan budget per trial; the full "
                "%.1e-codeword scan is infeasible), threshold 0.9 %s",
                hot.error_rate(), hot.errors,
                static_cast<double>(hot.codebook_size),
                hot_pass ? "met" : "NOT met at this budget");
  return {pass, detail};
}

Outcome criterion_samplers() {
  bool pass = true;
  std::string detail;
  const std::int64_t n = 1000000;
  const double dn = static_cast<double>(n);

  for (double x : {0.5, 10.0, 200.0}) {
    RngStream rng(7000 + static_cast<std::uint64_t>(x), 0);
    double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double y = static_cast<double>(sample_poisson(x, rng));
      s1 += y;
      s2 += y * y;
      q1 += (y - x) * (y - x);
      const double d2 = y * y - (x * x + x);
      q2 += d2 * d2;
    }
    const double se1 = std::sqrt(q1 / dn / dn);
    const double se2 = std::sqrt(q2 / dn / dn);
    const double dev1 = std::fabs(s1 / dn - x);
    const double dev2 = std::fabs(s2 / dn - (x * x + x));
    if (dev1 > 4.0 * se1 || dev2 > 4.0 * se2) pass = false;
    detail += fmt("%spoisson(%g) z = (%.2f, %.2f)", detail.empty() ? "" : "; ",
                  x, dev1 / se1, dev2 / se2);
  }

  const double eps = 1.0;
  const GammaInput input(0.5, eps);
  RngStream rng(8000, 0);
  double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = sample_gamma_input(input, rng);
    s1 += x;
    s2 += x * x;
    q1 += (x - eps) * (x - eps);
    const double d2 = x * x - 3.0 * eps * eps;
    q2 += d2 * d2;
  }
  const double se1 = std::sqrt(q1 / dn / dn);
  const double se2 = std::sqrt(q2 / dn / dn);
  const double dev1 = std::fabs(s1 / dn - eps);
  const double dev2 = std::fabs(s2 / dn - 3.0 * eps * eps);
  if (dev1 > 4.0 * se1 || dev2 > 4.0 * se2) pass = false;
  detail += fmt("; gamma z = (%.2f, %.2f); all |z| < 4 required", dev1 / se1,
                dev2 / se2);
  return {pass, detail};
}

}  // namespace

int main() {
  bool all = true;
  all &= run_criterion(1, "closed-form rate identity", criterion_rate_identity);
  all &= run_criterion(2, "tilt cancellation structure", criterion_cancellation);
  all &= run_criterion(3, "metric denominator closed form vs quadrature",
                       criterion_denominator);
  all &= run_criterion(4, "exact mutual information vs marginal-sum oracle",
                       criterion_mi_oracle);
  all &= run_criterion(5, "dominance ordering of the bounds",
                       criterion_dominance);
  all &= run_criterion(6, "Monte Carlo estimators vs closed form",
                       criterion_monte_carlo);
  all &= run_criterion(7, "random-coding decoder behaviour", criterion_decoder);
  all &= run_criterion(8, "sampler moment fidelity", criterion_samplers);
  std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
  return all ? 0 : 1;
}
