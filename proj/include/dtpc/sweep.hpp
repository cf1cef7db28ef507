#pragma once

// Bound sweeps over an energy grid and their CSV serialization.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtpc/analytic.hpp"
#include "dtpc/montecarlo.hpp"

namespace dtpc {

enum class GridScale { log, linear };

struct SweepSpec {
  double eps_min = 0.01;
  double eps_max = 100.0;
  int points = 40;
  GridScale scale = GridScale::log;
  std::vector<BoundId> quantities;
  std::int64_t mc_samples = 1000000;
  std::uint64_t seed = 1;
  double nu = 0.5;           // input shape used by exact-mi
  double tol = 1e-9;         // quadrature relative tolerance
  int max_subdivisions = 2000;
  int threads = 0;
};

// One CSV row; absent optionals serialize as empty fields, an absent value
// (failed evaluation) serializes as the sentinel "NA".
struct CsvRow {
  double eps_s = 0.0;
  BoundId quantity = BoundId::theorem_rate;
  std::optional<double> value;
  std::optional<double> std_error;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
};

struct SweepResult {
  std::vector<CsvRow> rows;
  bool any_failure = false;
};

inline std::vector<double> make_grid(double lo, double hi, int points,
                                     GridScale scale) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("make_grid: need 0 < lo < hi");
  if (points < 2) throw std::invalid_argument("make_grid: points must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    grid[static_cast<std::size_t>(i)] =
        scale == GridScale::log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                                : lo + f * (hi - lo);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

// Evaluates every requested quantity at every grid point. Rows are laid out
// point-major in grid order; each Monte Carlo row gets its own sub-seed
// derived from (spec.seed, row index), recorded in the row.
inline SweepResult run_bounds_sweep(const SweepSpec& spec) {
  if (spec.quantities.empty())
    throw std::invalid_argument("run_bounds_sweep: no quantities requested");
  if (spec.mc_samples < 1000)
    throw std::invalid_argument("run_bounds_sweep: mc_samples must be >= 1000");
  const std::vector<double> grid =
      make_grid(spec.eps_min, spec.eps_max, spec.points, spec.scale);
  const std::size_t per_point = spec.quantities.size();
  SweepResult result;
  result.rows.resize(grid.size() * per_point);
  std::vector<std::uint8_t> failed(result.rows.size(), 0);
  detail::parallel_for_indexed(
      static_cast<std::int64_t>(grid.size()), spec.threads,
      [&](std::int64_t point) {
        const double eps_s = grid[static_cast<std::size_t>(point)];
        for (std::size_t q = 0; q < per_point; ++q) {
          const std::size_t row_index =
              static_cast<std::size_t>(point) * per_point + q;
          CsvRow row;
          row.eps_s = eps_s;
          row.quantity = spec.quantities[q];
          std::uint64_t mix_state =
              spec.seed + 0x9E3779B97F4A7C15ull *
                              (static_cast<std::uint64_t>(row_index) + 1);
          const std::uint64_t row_seed = splitmix64(mix_state);
          try {
            switch (row.quantity) {
              case BoundId::theorem_rate:
                row.value = theorem_rate(eps_s);
                break;
              case BoundId::gmi:
                row.value = evaluate_gmi(eps_s).value;
                break;
              case BoundId::lm:
                row.value = lm_rate_check(eps_s);
                break;
              case BoundId::lapidoth_moser:
                row.value = lapidoth_moser_bound(eps_s);
                break;
              case BoundId::exact_mi:
                row.value = exact_mi_gamma(eps_s, spec.nu, spec.tol,
                                           spec.max_subdivisions);
                break;
              case BoundId::mc_gmi: {
                const GmiEvaluation point_eval = evaluate_gmi(eps_s);
                const McEstimate est =
                    estimate_gmi_mc(eps_s, point_eval.a, point_eval.s,
                                    spec.mc_samples, row_seed, 1);
                row.value = est.mean;
                row.std_error = est.std_error;
                row.samples = est.n_samples;
                row.seed = est.seed;
                break;
              }
              case BoundId::mc_lm: {
                const double tilt = lm_cancellation_tilt(eps_s);
                const McEstimate est = estimate_lm_mc(eps_s, tilt,
                                                      spec.mc_samples,
                                                      row_seed, 1);
                row.value = est.mean;
                row.std_error = est.std_error;
                row.samples = est.n_samples;
                row.seed = est.seed;
                break;
              }
            }
          } catch (const ConvergenceError&) {
            row.value = std::nullopt;
            failed[row_index] = 1;
          }
          result.rows[row_index] = row;
        }
      });
  for (const std::uint8_t f : failed)
    if (f) result.any_failure = true;
  return result;
}

inline std::string format_significant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline constexpr double kLog2 = 0.6931471805599453094172321214581766;

// Header is fixed; rates are written in nats unless bits is set, in which
// case values and standard errors are divided by log 2 at print time.
inline void write_csv(std::ostream& os, const std::vector<CsvRow>& rows,
                      bool bits = false) {
  const double unit = bits ? kLog2 : 1.0;
  os << "eps_s,quantity,value,stderr,samples,seed\n";
  for (const CsvRow& row : rows) {
    os << format_significant(row.eps_s) << ',' << to_string(row.quantity)
       << ',';
    os << (row.value ? format_significant(*row.value / unit) : "NA");
    os << ',';
    if (row.std_error) os << format_significant(*row.std_error / unit);
    os << ',';
    if (row.samples) os << *row.samples;
    os << ',';
    if (row.seed) os << *row.seed;
    os << '\n';
  }
}

}  // namespace dtpc
