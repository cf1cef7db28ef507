#pragma once

// Command-line front end. Subcommands evaluate single points or sweep the
// bounds over an energy grid; everything is reproducible from the reported
// seeds. Exit codes: 0 success, 1 usage or validation failure, 2 quadrature
// non-convergence.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dtpc/montecarlo.hpp"
#include "dtpc/sweep.hpp"

namespace dtpc {

namespace cli_detail {

struct RatePrinter {
  std::ostream& out;
  double unit;
  void line(const std::string& name, double v) const {
    out << name << ' ' << format_significant(v / unit) << '\n';
  }
  void raw(const std::string& name, const std::string& v) const {
    out << name << ' ' << v << '\n';
  }
};

inline const std::vector<std::string>& quantity_names() {
  static const std::vector<std::string> names = {
      "theorem-rate", "gmi", "lm", "lapidoth-moser",
      "exact-mi",     "mc-gmi", "mc-lm"};
  return names;
}

}  // namespace cli_detail

inline int run_cli(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Capacity lower bounds for the discrete-time Poisson channel"};
  app.require_subcommand(1);
  bool bits = false;
  app.add_flag("--bits", bits, "print rates in bits instead of nats");

  // --- bounds ---
  auto* bounds = app.add_subcommand("bounds", "sweep bounds over an energy grid");
  SweepSpec spec;
  std::vector<std::string> quantity_args = {"theorem-rate", "gmi", "lm",
                                            "lapidoth-moser", "exact-mi"};
  std::string scale_name = "log";
  std::string bounds_out_path;
  bounds->add_option("--eps-min", spec.eps_min, "grid lower end")
      ->check(CLI::PositiveNumber);
  bounds->add_option("--eps-max", spec.eps_max, "grid upper end")
      ->check(CLI::PositiveNumber);
  bounds->add_option("--points", spec.points, "grid size")
      ->check(CLI::Range(2, 1000000));
  bounds->add_option("--scale", scale_name, "grid spacing")
      ->check(CLI::IsMember({"log", "linear"}));
  bounds->add_option("--quantities", quantity_args, "comma-separated quantities")
      ->delimiter(',')
      ->check(CLI::IsMember(cli_detail::quantity_names()));
  bounds->add_option("--out", bounds_out_path, "CSV output path");
  bounds->add_option("--samples", spec.mc_samples, "Monte Carlo samples per row")
      ->check(CLI::Range(std::int64_t(1000), std::int64_t(1) << 40));
  bounds->add_option("--seed", spec.seed, "Monte Carlo master seed");
  bounds->add_option("--nu", spec.nu, "input shape for exact-mi")
      ->check(CLI::Range(1e-6, 4.0));
  bounds->add_option("--tol", spec.tol, "quadrature relative tolerance")
      ->check(CLI::Range(1e-10, 1e-2));
  bounds->add_option("--max-subdiv", spec.max_subdivisions,
                     "quadrature subdivision limit")
      ->check(CLI::Range(1, 1000000));
  bounds->add_option("--threads", spec.threads, "worker threads (0 = auto)");

  // --- gmi ---
  auto* gmi = app.add_subcommand("gmi", "closed-form GMI at one energy");
  double point_eps = 1.0;
  std::optional<double> opt_a;
  std::optional<double> opt_s;
  bool do_scan = false;
  gmi->add_option("--eps", point_eps, "energy per channel use")
      ->required()
      ->check(CLI::PositiveNumber);
  gmi->add_option("--a", opt_a, "metric coefficient (default 1 + 1/eps)")
      ->check(CLI::PositiveNumber);
  gmi->add_option("--s", opt_s, "tilt (default s_hat)")
      ->check(CLI::NonNegativeNumber);
  gmi->add_flag("--scan", do_scan, "also scan tilts around s_hat");

  // --- mi ---
  auto* mi = app.add_subcommand("mi", "exact mutual information at one energy");
  double mi_nu = 0.5;
  double mi_tol = 1e-9;
  int mi_max_subdiv = 2000;
  mi->add_option("--eps", point_eps, "energy per channel use")
      ->required()
      ->check(CLI::PositiveNumber);
  mi->add_option("--nu", mi_nu, "input shape")->check(CLI::Range(1e-6, 4.0));
  mi->add_option("--tol", mi_tol, "quadrature relative tolerance")
      ->check(CLI::Range(1e-10, 1e-2));
  mi->add_option("--max-subdiv", mi_max_subdiv, "quadrature subdivision limit")
      ->check(CLI::Range(1, 1000000));

  // --- lm ---
  auto* lm = app.add_subcommand(
      "lm", "weighted-input rate at its cancellation tilt");
  lm->add_option("--eps", point_eps, "energy per channel use")
      ->required()
      ->check(CLI::PositiveNumber);
  lm->add_option("--s", opt_s, "tilt (default: cancellation tilt)")
      ->check(CLI::NonNegativeNumber);

  // --- mc-gmi ---
  auto* mc_gmi = app.add_subcommand("mc-gmi", "Monte Carlo GMI estimate");
  std::int64_t mc_samples = 1000000;
  std::uint64_t mc_seed = 1;
  int mc_threads = 0;
  mc_gmi->add_option("--eps", point_eps, "energy per channel use")
      ->required()
      ->check(CLI::PositiveNumber);
  mc_gmi->add_option("--a", opt_a, "metric coefficient (default 1 + 1/eps)")
      ->check(CLI::PositiveNumber);
  mc_gmi->add_option("--s", opt_s, "tilt (default s_hat)")
      ->check(CLI::NonNegativeNumber);
  mc_gmi->add_option("--samples", mc_samples, "sample count")
      ->check(CLI::Range(std::int64_t(1000), std::int64_t(1) << 40));
  mc_gmi->add_option("--seed", mc_seed, "stream seed");
  mc_gmi->add_option("--threads", mc_threads, "worker threads (0 = auto)");

  // --- mc-lm ---
  auto* mc_lm = app.add_subcommand("mc-lm", "Monte Carlo weighted-rate estimate");
  mc_lm->add_option("--eps", point_eps, "energy per channel use")
      ->required()
      ->check(CLI::PositiveNumber);
  mc_lm->add_option("--s", opt_s, "tilt (default: cancellation tilt)")
      ->check(CLI::NonNegativeNumber);
  mc_lm->add_option("--samples", mc_samples, "sample count")
      ->check(CLI::Range(std::int64_t(1000), std::int64_t(1) << 40));
  mc_lm->add_option("--seed", mc_seed, "stream seed");
  mc_lm->add_option("--threads", mc_threads, "worker threads (0 = auto)");

  // --- simulate ---
  auto* simulate = app.add_subcommand(
      "simulate", "random-coding error rates of the min-distance decoder");
  double sim_rate = 0.5;
  std::vector<int> sim_n;
  int sim_trials = 200;
  std::uint64_t sim_seed = 1;
  std::uint64_t sim_max_codebook = std::uint64_t(1) << 22;
  std::string sim_form = "reduced";
  std::string sim_out_path;
  int sim_threads = 0;
  simulate->add_option("--eps", point_eps, "energy per channel use")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--a", opt_a, "metric coefficient (default 1 + 1/eps)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--rate", sim_rate, "code rate in nats per channel use")
      ->required()
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--n", sim_n, "blocklengths (repeatable)")
      ->required()
      ->check(CLI::Range(2, 1000000));
  simulate->add_option("--trials", sim_trials, "trials per blocklength")
      ->check(CLI::Range(1, 1000000));
  simulate->add_option("--seed", sim_seed, "trial seed");
  simulate->add_option("--max-codebook", sim_max_codebook,
                       "refuse codebooks larger than this");
  std::uint64_t sim_scan_limit = 0;
  simulate->add_option(
      "--scan-limit", sim_scan_limit,
      "per-trial budget on competing codewords scanned (0 = all; a "
      "truncated scan makes the error count a lower bound)");
  simulate->add_option("--form", sim_form, "distance form")
      ->check(CLI::IsMember({"reduced", "full"}));
  simulate->add_option("--out", sim_out_path, "CSV output path");
  simulate->add_option("--threads", sim_threads, "worker threads (0 = auto)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 1;
  }

  const double unit = bits ? kLog2 : 1.0;
  try {
    if (bounds->parsed()) {
      spec.scale = scale_name == "log" ? GridScale::log : GridScale::linear;
      spec.quantities.clear();
      for (const std::string& name : quantity_args) {
        const std::optional<BoundId> id = bound_id_from_string(name);
        if (!id) {
          err << "unknown quantity: " << name << '\n';
          return 1;
        }
        spec.quantities.push_back(*id);
      }
      const SweepResult result = run_bounds_sweep(spec);
      if (bounds_out_path.empty()) {
        write_csv(out, result.rows, bits);
      } else {
        std::ofstream file(bounds_out_path);
        if (!file) {
          err << "cannot open " << bounds_out_path << " for writing\n";
          return 1;
        }
        write_csv(file, result.rows, bits);
        out << "wrote " << result.rows.size() << " rows (" << spec.points
            << " points x " << spec.quantities.size() << " quantities) to "
            << bounds_out_path << '\n';
      }
      if (result.any_failure) {
        err << "one or more quadrature evaluations did not converge; "
               "affected rows carry the value NA\n";
        return 2;
      }
      return 0;
    }

    if (gmi->parsed()) {
      const GmiEvaluation eval = evaluate_gmi(point_eps, opt_a, opt_s);
      cli_detail::RatePrinter printer{out, unit};
      printer.raw("eps_s", format_significant(point_eps));
      printer.raw("a", format_significant(eval.a));
      printer.raw("s", format_significant(eval.s));
      printer.line("gmi", eval.value);
      printer.line("theorem-rate", theorem_rate(point_eps));
      if (do_scan) {
        const TiltScanResult scan = scan_gmi_tilt(point_eps, eval.a);
        printer.raw("scan-best-s", format_significant(scan.best_s));
        printer.line("scan-best-gmi", scan.best_value);
      }
      return 0;
    }

    if (mi->parsed()) {
      const double value = exact_mi_gamma(point_eps, mi_nu, mi_tol, mi_max_subdiv);
      cli_detail::RatePrinter printer{out, unit};
      printer.raw("eps_s", format_significant(point_eps));
      printer.raw("nu", format_significant(mi_nu));
      printer.line("exact-mi", value);
      printer.line("theorem-rate", theorem_rate(point_eps));
      return 0;
    }

    if (lm->parsed()) {
      const double tilt = opt_s ? *opt_s : lm_cancellation_tilt(point_eps);
      cli_detail::RatePrinter printer{out, unit};
      printer.raw("eps_s", format_significant(point_eps));
      printer.raw("s", format_significant(tilt));
      printer.line("lm", lm_closed_form(point_eps, tilt));
      printer.line("theorem-rate", theorem_rate(point_eps));
      printer.line("lapidoth-moser", lapidoth_moser_bound(point_eps));
      return 0;
    }

    if (mc_gmi->parsed()) {
      const GmiEvaluation eval = evaluate_gmi(point_eps, opt_a, opt_s);
      const McEstimate est = estimate_gmi_mc(point_eps, eval.a, eval.s,
                                             mc_samples, mc_seed, mc_threads);
      cli_detail::RatePrinter printer{out, unit};
      printer.raw("eps_s", format_significant(point_eps));
      printer.raw("a", format_significant(eval.a));
      printer.raw("s", format_significant(eval.s));
      printer.line("mc-gmi", est.mean);
      printer.line("stderr", est.std_error);
      printer.raw("samples", std::to_string(est.n_samples));
      printer.raw("seed", std::to_string(est.seed));
      printer.line("gmi", eval.value);
      return 0;
    }

    if (mc_lm->parsed()) {
      const double tilt = opt_s ? *opt_s : lm_cancellation_tilt(point_eps);
      const McEstimate est =
          estimate_lm_mc(point_eps, tilt, mc_samples, mc_seed, mc_threads);
      cli_detail::RatePrinter printer{out, unit};
      printer.raw("eps_s", format_significant(point_eps));
      printer.raw("s", format_significant(tilt));
      printer.line("mc-lm", est.mean);
      printer.line("stderr", est.std_error);
      printer.raw("samples", std::to_string(est.n_samples));
      printer.raw("seed", std::to_string(est.seed));
      printer.line("lm", lm_closed_form(point_eps, tilt));
      return 0;
    }

    if (simulate->parsed()) {
      const double a = opt_a ? *opt_a : 1.0 + 1.0 / point_eps;
      CodingOptions opts;
      opts.max_codebook = sim_max_codebook;
      opts.form = sim_form == "full" ? DistanceForm::full : DistanceForm::reduced;
      opts.threads = sim_threads;
      opts.scan_limit = sim_scan_limit;
      std::vector<CodingResult> results;
      results.reserve(sim_n.size());
      for (const int n : sim_n)
        results.push_back(run_random_coding(point_eps, a, sim_rate, n,
                                            sim_trials, sim_seed, opts));
      out << "eps_s " << format_significant(point_eps) << '\n';
      out << "a " << format_significant(a) << '\n';
      out << "rate " << format_significant(sim_rate / unit)
          << (bits ? " bits\n" : "\n");
      for (const CodingResult& r : results)
        out << "n " << r.n << " codebook " << r.codebook_size << " trials "
            << r.trials << " errors " << r.errors << " error-rate "
            << format_significant(r.error_rate())
            << (r.scan_truncated ? " (scan truncated; lower bound)" : "")
            << '\n';
      if (!sim_out_path.empty()) {
        std::ofstream file(sim_out_path);
        if (!file) {
          err << "cannot open " << sim_out_path << " for writing\n";
          return 1;
        }
        file << "eps_s,a,rate,n,codebook,trials,errors,error_rate,seed\n";
        for (const CodingResult& r : results)
          file << format_significant(r.eps_s) << ',' << format_significant(r.a)
               << ',' << format_significant(r.rate) << ',' << r.n << ','
               << r.codebook_size << ',' << r.trials << ',' << r.errors << ','
               << format_significant(r.error_rate()) << ',' << r.seed << '\n';
      }
      return 0;
    }
  } catch (const ConvergenceError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const CodebookSizeError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
  err << "no subcommand given\n";
  return 1;
}

inline int run_cli(int argc, char** argv, std::ostream& out,
                   std::ostream& err) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(std::move(args), out, err);
}

}  // namespace dtpc
