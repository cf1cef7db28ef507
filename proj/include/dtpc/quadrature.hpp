#pragma once

// Globally adaptive Gauss-Kronrod (G7, K15) integration. The rule is open --
// endpoints are never evaluated -- so integrable endpoint singularities are
// handled by bisection toward the endpoint. A semi-infinite upper limit is
// mapped onto (0, 1) via x = lower + t / (1 - t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dtpc {

struct IntegrationRequest {
  std::function<double(double)> integrand;
  double lower = 0.0;
  double upper = 1.0;  // may be +infinity
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
};

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = false;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// QUADPACK dqk15 abscissae/weights. Even indices are Kronrod-only points,
// odd indices plus the centre form the embedded 7-point Gauss rule.
inline constexpr double kGk15Nodes[8] = {
    0.99145537112081263920685469752633, 0.94910791234275852452618968404785,
    0.86486442335976907278971278864093, 0.74153118559939443986386477328079,
    0.58608723546769113029414483825873, 0.40584515137739716690660641207696,
    0.20778495500789846760068940377324, 0.0};
inline constexpr double kGk15KronrodW[8] = {
    0.02293532201052922496373200805897, 0.06309209262997855329070066318920,
    0.10479001032225018383987632254152, 0.14065325971552591874518959051024,
    0.16900472663926790282658342659855, 0.19035057806478540991325640242101,
    0.20443294007529889241416199923465, 0.20948214108472782801299917489171};
inline constexpr double kGk15GaussW[4] = {
    0.12948496616886969327061143267908, 0.27970539148927666790146777142378,
    0.38183005050511894495036977548898, 0.41795918367346938775510204081633};

struct PanelEstimate {
  double value;
  double error;
};

template <class F>
PanelEstimate gk15_panel(const F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv1[8];
  double fv2[8];
  const double fc = f(centre);
  fv1[7] = fc;
  fv2[7] = fc;
  double res_kronrod = kGk15KronrodW[7] * fc;
  double res_gauss = kGk15GaussW[3] * fc;
  double res_abs = kGk15KronrodW[7] * std::fabs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kGk15Nodes[j];
    fv1[j] = f(centre - dx);
    fv2[j] = f(centre + dx);
    res_kronrod += kGk15KronrodW[j] * (fv1[j] + fv2[j]);
    res_abs += kGk15KronrodW[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    if (j % 2 == 1) res_gauss += kGk15GaussW[j / 2] * (fv1[j] + fv2[j]);
  }
  const double mean = 0.5 * res_kronrod;
  double res_asc = kGk15KronrodW[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j)
    res_asc += kGk15KronrodW[j] *
               (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  res_abs *= std::fabs(half);
  res_asc *= std::fabs(half);
  double err = std::fabs((res_kronrod - res_gauss) * half);
  if (res_asc != 0.0 && err != 0.0)
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  const double round_unit = 50.0 * std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / round_unit)
    err = std::max(err, round_unit * res_abs);
  return {res_kronrod * half, err};
}

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

inline IntegrationResult integrate_finite(
    const std::function<double(double)>& f, double lower, double upper,
    double rel_tol, double abs_tol, int max_subdivisions) {
  std::vector<Segment> heap;  // max-heap on error
  std::vector<Segment> finished;
  {
    const PanelEstimate first = gk15_panel(f, lower, upper);
    heap.push_back({lower, upper, first.value, first.error});
  }
  double total_value = heap[0].value;
  double total_error = heap[0].error;
  int splits = 0;
  auto within_tolerance = [&] {
    return total_error <= std::max(abs_tol, rel_tol * std::fabs(total_value));
  };
  while (!heap.empty() && splits < max_subdivisions && !within_tolerance()) {
    std::pop_heap(heap.begin(), heap.end());
    const Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval is at floating-point resolution; keep its contribution but
      // stop refining it.
      finished.push_back(worst);
      continue;
    }
    const PanelEstimate left = gk15_panel(f, worst.a, mid);
    const PanelEstimate right = gk15_panel(f, mid, worst.b);
    ++splits;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push_back({worst.a, mid, left.value, left.error});
    std::push_heap(heap.begin(), heap.end());
    heap.push_back({mid, worst.b, right.value, right.error});
    std::push_heap(heap.begin(), heap.end());
  }
  // Recompute the totals in left-to-right order so the result does not depend
  // on the heap's internal ordering.
  finished.insert(finished.end(), heap.begin(), heap.end());
  std::sort(finished.begin(), finished.end(),
            [](const Segment& s1, const Segment& s2) { return s1.a < s2.a; });
  IntegrationResult result;
  for (const Segment& seg : finished) {
    result.value += seg.value;
    result.error_estimate += seg.error;
  }
  result.subdivisions_used = splits;
  result.converged =
      result.error_estimate <=
      std::max(abs_tol, rel_tol * std::fabs(result.value));
  return result;
}

}  // namespace detail

inline IntegrationResult integrate_adaptive(const IntegrationRequest& req) {
  if (!req.integrand)
    throw std::invalid_argument("integrate_adaptive: integrand not set");
  if (!std::isfinite(req.lower))
    throw std::invalid_argument("integrate_adaptive: lower limit must be finite");
  if (!(req.lower < req.upper))
    throw std::invalid_argument("integrate_adaptive: need lower < upper");
  if (!(req.rel_tol > 0.0) || !(req.abs_tol > 0.0))
    throw std::invalid_argument("integrate_adaptive: tolerances must be positive");
  if (req.max_subdivisions < 1)
    throw std::invalid_argument("integrate_adaptive: max_subdivisions must be >= 1");
  if (std::isinf(req.upper)) {
    const double lo = req.lower;
    const auto& f = req.integrand;
    auto mapped = [lo, &f](double t) {
      const double complement = 1.0 - t;
      const double x = lo + t / complement;
      return f(x) / (complement * complement);
    };
    return detail::integrate_finite(mapped, 0.0, 1.0, req.rel_tol, req.abs_tol,
                                    req.max_subdivisions);
  }
  return detail::integrate_finite(req.integrand, req.lower, req.upper,
                                  req.rel_tol, req.abs_tol,
                                  req.max_subdivisions);
}

// Integrand of the u-integral in the exact mutual-information expression for
// the gamma(nu, eps_s) input:
//
//   ( eps_s - (1 - (nu/(nu + eps_s (1-u)))^nu) u^(nu-1) / (1-u) ) / log u .
//
// Both endpoints need care: at u -> 0 the u^(nu-1) factor is an integrable
// singularity for nu < 1 (handled by the open rule), and at u -> 1 the
// numerator and log u vanish together. Near 1 the ratio is evaluated from a
// series in t = 1 - u; elsewhere expm1/log1p keep full precision.
inline double mi_integrand(double eps_s, double nu, double u) {
  if (!(eps_s >= 0.0) || !std::isfinite(eps_s))
    throw std::domain_error("mi_integrand: eps_s must be finite and >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::domain_error("mi_integrand: nu must be positive and finite");
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("mi_integrand: u must lie in (0, 1)");
  const double t = 1.0 - u;
  if (t < 1e-8) {
    // Numerator = c1 t + c2 t^2 + c3 t^3 + O(t^4), from the product of the
    // expansions of (1 - (1 + eps_s t / nu)^-nu)/t and u^(nu-1).
    const double e = eps_s;
    const double a1 = -(nu + 1.0) * e * e / (2.0 * nu);
    const double a2 = (nu + 1.0) * (nu + 2.0) * e * e * e / (6.0 * nu * nu);
    const double a3 =
        -(nu + 1.0) * (nu + 2.0) * (nu + 3.0) * e * e * e * e /
        (24.0 * nu * nu * nu);
    const double b1 = 1.0 - nu;
    const double b2 = (nu - 1.0) * (nu - 2.0) * 0.5;
    const double b3 = -(nu - 1.0) * (nu - 2.0) * (nu - 3.0) / 6.0;
    const double c1 = -(a1 + e * b1);
    const double c2 = -(a2 + a1 * b1 + e * b2);
    const double c3 = -(a3 + a2 * b1 + a1 * b2 + e * b3);
    return t * (c1 + t * (c2 + t * c3)) / std::log1p(-t);
  }
  const double log_u = std::log(u);
  // 1 - (nu / (nu + eps_s t))^nu, kept accurate for small eps_s * t.
  const double one_minus_pow = -std::expm1(-nu * std::log1p(eps_s * t / nu));
  const double u_pow = std::pow(u, nu - 1.0);
  return (eps_s - one_minus_pow / t * u_pow) / log_u;
}

}  // namespace dtpc
