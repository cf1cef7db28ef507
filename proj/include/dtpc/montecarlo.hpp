#pragma once

// Monte Carlo estimators for the mismatched-decoder rates and a random-coding
// experiment driving the minimum-distance decoder over the sampled channel.
//
// Determinism contract: every work unit (sample chunk, simulation trial)
// derives its own counter-based stream from (seed, unit index), and partial
// results are merged in unit-index order, so results are bit-identical
// regardless of how many worker threads execute the units.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dtpc/analytic.hpp"
#include "dtpc/channel.hpp"
#include "dtpc/rng.hpp"

namespace dtpc {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

template <class Fn>
void parallel_for_indexed(std::int64_t count, int threads, Fn&& fn) {
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  threads = static_cast<int>(
      std::min<std::int64_t>(threads, std::max<std::int64_t>(count, 1)));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        fn(i);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::int64_t kMcChunkSize = 1 << 16;

// Runs per_sample(stream) n_samples times, chunked; chunk i draws from
// RngStream(seed, i). Merging the per-chunk partial sums in index order makes
// the estimate independent of the thread count.
template <class PerSample>
McEstimate run_chunked_mc(std::int64_t n_samples, std::uint64_t seed,
                          PerSample&& per_sample, int threads = 0) {
  const std::int64_t n_chunks = (n_samples + kMcChunkSize - 1) / kMcChunkSize;
  struct ChunkStats {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<ChunkStats> stats(static_cast<std::size_t>(n_chunks));
  parallel_for_indexed(n_chunks, threads, [&](std::int64_t chunk) {
    RngStream stream(seed, static_cast<std::uint64_t>(chunk));
    const std::int64_t count =
        std::min(kMcChunkSize, n_samples - chunk * kMcChunkSize);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t k = 0; k < count; ++k) {
      const double v = per_sample(stream);
      sum += v;
      sum_sq += v * v;
    }
    stats[static_cast<std::size_t>(chunk)] = {sum, sum_sq};
  });
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const ChunkStats& cs : stats) {
    sum += cs.sum;
    sum_sq += cs.sum_sq;
  }
  McEstimate est;
  est.n_samples = n_samples;
  est.seed = seed;
  est.mean = sum / static_cast<double>(n_samples);
  const double dn = static_cast<double>(n_samples);
  const double variance =
      std::max(0.0, (sum_sq - sum * sum / dn) / (dn - 1.0));
  est.std_error = std::sqrt(variance / dn);
  return est;
}

inline void check_mc_args(double s, std::int64_t n_samples, const char* who) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::domain_error(std::string(who) + ": s must be finite and >= 0");
  if (n_samples < 1000)
    throw std::invalid_argument(std::string(who) +
                                ": need at least 1000 samples");
}

}  // namespace detail

// Sample-mean estimate of the GMI at (a, s): each sample draws (X, Y) from
// the channel and evaluates s log q(X,Y) - log E_X'[q(X',Y)^s] with the
// denominator in closed form.
inline McEstimate estimate_gmi_mc(double eps_s, double a, double s,
                                  std::int64_t n_samples, std::uint64_t seed,
                                  int threads = 0) {
  const EnergyBudget budget(eps_s);
  detail::check_mc_args(s, n_samples, "estimate_gmi_mc");
  const DecoderConfig cfg(a, s, 0.0);
  const GammaInput input(0.5, eps_s);
  const double c = 1.0 + 2.0 * a * eps_s * s;
  const double y_coeff = std::sqrt(2.0 * s * c / eps_s);
  const double log_c_half = 0.5 * std::log(c);
  auto per_sample = [=](RngStream& rng) {
    const ChannelSample sample = sample_channel(input, rng);
    const double dy = static_cast<double>(sample.y);
    return s * (-a * sample.x - dy * dy / sample.x) + dy * y_coeff +
           log_c_half;
  };
  return detail::run_chunked_mc(n_samples, seed, per_sample, threads);
}

// Sample-mean estimate of the weighted-input rate at tilt s (unit metric
// coefficient, input weighting e^{-(s/eps_s) x} folded into numerator and
// denominator).
inline McEstimate estimate_lm_mc(double eps_s, double s,
                                 std::int64_t n_samples, std::uint64_t seed,
                                 int threads = 0) {
  const EnergyBudget budget(eps_s);
  detail::check_mc_args(s, n_samples, "estimate_lm_mc");
  const GammaInput input(0.5, eps_s);
  const double weight_rate = s / eps_s;
  const double c = 1.0 + 2.0 * s * (1.0 + eps_s);
  const double y_coeff = std::sqrt(2.0 * s * c / eps_s);
  const double log_c_half = 0.5 * std::log(c);
  auto per_sample = [=](RngStream& rng) {
    const ChannelSample sample = sample_channel(input, rng);
    const double dy = static_cast<double>(sample.y);
    return -weight_rate * sample.x +
           s * (-sample.x - dy * dy / sample.x) + dy * y_coeff + log_c_half;
  };
  return detail::run_chunked_mc(n_samples, seed, per_sample, threads);
}

struct CodingResult {
  double eps_s = 0.0;
  double a = 0.0;
  double rate = 0.0;
  int n = 0;
  std::uint64_t codebook_size = 0;
  int trials = 0;
  int errors = 0;
  std::uint64_t seed = 0;
  // True when a per-trial scan budget stopped at least one trial before the
  // whole codebook was examined; errors is then a lower bound.
  bool scan_truncated = false;
  double error_rate() const {
    return static_cast<double>(errors) / static_cast<double>(trials);
  }
};

struct CodebookSizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CodingOptions {
  // Refuses codebooks larger than this unless raised explicitly.
  std::uint64_t max_codebook = std::uint64_t(1) << 22;
  DistanceForm form = DistanceForm::reduced;
  int threads = 0;
  // Per-trial budget on how many competing codewords are examined; 0 means
  // the whole codebook. A truncated scan can only miss errors, so the error
  // count becomes a lower bound (flagged via CodingResult::scan_truncated).
  std::uint64_t scan_limit = 0;
  // When set, every trial scans the whole codebook and records the winning
  // codeword index here (0 = the transmitted one); early exit is disabled so
  // the argmin is available.
  std::vector<std::uint64_t>* decisions = nullptr;
};

inline std::uint64_t codebook_size_for(double rate, int n) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw std::domain_error("codebook_size_for: rate must be finite and >= 0");
  if (n < 2) throw std::invalid_argument("codebook_size_for: need n >= 2");
  const double exponent = rate * n;
  if (exponent > 42.0)
    throw CodebookSizeError(
        "codebook_size_for: rate*n = " + std::to_string(exponent) +
        " overflows the codeword index space");
  return static_cast<std::uint64_t>(std::ceil(std::exp(exponent)));
}

// Random-coding experiment: per trial, codeword 0 is transmitted over the
// sampled channel and the decoder picks the codeword with the smallest total
// distance to the observation. A trial counts as an error when any other
// codeword's total is <= the transmitted one's (ties are errors).
//
// Every codeword is regenerated on the fly from its own stream
// (trial_seed, 1 + codeword index), so memory is O(n) regardless of the
// codebook size and the codebook is identical whether or not the scan stops
// early. Distances are nonnegative per symbol, so a candidate is abandoned as
// soon as its partial sum passes the best total it would have to beat.
inline CodingResult run_random_coding(double eps_s, double a, double rate,
                                      int n, int trials, std::uint64_t seed,
                                      const CodingOptions& opts = {}) {
  const EnergyBudget budget(eps_s);
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::domain_error("run_random_coding: a must be positive and finite");
  if (trials < 1)
    throw std::invalid_argument("run_random_coding: trials must be >= 1");
  const std::uint64_t codebook = codebook_size_for(rate, n);
  if (codebook > opts.max_codebook)
    throw CodebookSizeError(
        "run_random_coding: n = " + std::to_string(n) + " gives " +
        std::to_string(codebook) + " codewords, above the limit of " +
        std::to_string(opts.max_codebook) +
        " (raise max_codebook to run anyway)");
  const GammaInput input(0.5, eps_s);
  const bool record = opts.decisions != nullptr;
  if (record) opts.decisions->assign(static_cast<std::size_t>(trials), 0);
  std::uint64_t scan_end = codebook;
  bool truncated = false;
  if (opts.scan_limit > 0 && opts.scan_limit < codebook - 1) {
    scan_end = opts.scan_limit + 1;
    truncated = true;
  }
  std::vector<std::uint8_t> trial_error(static_cast<std::size_t>(trials), 0);

  detail::parallel_for_indexed(trials, opts.threads, [&](std::int64_t trial) {
    std::uint64_t mix_state =
        seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(trial + 1);
    const std::uint64_t trial_seed = splitmix64(mix_state);

    std::vector<double> y(static_cast<std::size_t>(n));
    double transmitted_total = 0.0;
    {
      RngStream codeword_stream(trial_seed, 1);
      RngStream noise_stream(trial_seed, 0);
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) x[j] = sample_gamma_input(input, codeword_stream);
      for (int j = 0; j < n; ++j) {
        const std::int64_t yi = sample_poisson(x[j], noise_stream);
        y[j] = static_cast<double>(yi);
        transmitted_total += decoder_distance(x[j], yi, a, opts.form);
      }
    }

    const double sqrt_a = std::sqrt(a);
    const bool full = opts.form == DistanceForm::full;
    bool error = false;
    double best_total = transmitted_total;
    std::uint64_t winner = 0;
    for (std::uint64_t m = 1; m < scan_end; ++m) {
      RngStream candidate_stream(trial_seed, 1 + m);
      const double prune_at = record ? best_total : transmitted_total;
      double total = 0.0;
      bool abandoned = false;
      for (int j = 0; j < n; ++j) {
        const double x = sample_gamma_input(input, candidate_stream);
        if (full) {
          const double r = y[j] - sqrt_a * x;
          total += r * r / x;
        } else {
          total += y[j] * y[j] / x + a * x;
        }
        if (total > prune_at) {
          abandoned = true;
          break;
        }
      }
      if (abandoned) continue;
      if (total <= transmitted_total) error = true;
      if (record) {
        if (total < best_total) {
          best_total = total;
          winner = m;
        }
      } else if (error) {
        break;
      }
    }
    trial_error[static_cast<std::size_t>(trial)] = error ? 1 : 0;
    if (record) (*opts.decisions)[static_cast<std::size_t>(trial)] = winner;
  });

  CodingResult result;
  result.eps_s = eps_s;
  result.a = a;
  result.rate = rate;
  result.n = n;
  result.codebook_size = codebook;
  result.trials = trials;
  result.seed = seed;
  result.scan_truncated = truncated;
  for (const std::uint8_t e : trial_error) result.errors += e;
  return result;
}

}  // namespace dtpc
