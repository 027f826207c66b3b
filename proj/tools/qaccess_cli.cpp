// qaccess: runs one experiment and writes its rows as CSV or JSON.
//
//   qaccess --experiment walk-critical --qubits 1,2 --steps 3,10,30 --trials 100 --seed 42
//   qaccess --config run.toml --out run.csv
//
// Exit status: 0 success, 2 usage error, 1 runtime failure.

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qaccess/error.hpp"
#include "qaccess/experiment.hpp"

namespace {

constexpr int kUsageExit = 2;
constexpr int kRuntimeExit = 1;

bool is_usage(qaccess::ErrorKind kind) {
  using qaccess::ErrorKind;
  return kind == ErrorKind::Usage || kind == ErrorKind::Validation ||
         kind == ErrorKind::InsufficientPoints || kind == ErrorKind::InvalidDimension;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert-space accessibility experiments", "qaccess"};
  app.set_config("--config", "", "key=value file with the same keys as the flags");
  app.set_version_flag("--version", QACCESS_VERSION);

  std::string kind = "walk-critical", format = "csv", protocol = "fresh-scan";
  qaccess::ExperimentConfig cfg;
  int trials = 0;
  std::int64_t samples = 0;

  app.add_option("--experiment", kind,
                 "walk-critical | percolation-critical | concentration | accessibility | fit")
      ->capture_default_str();
  app.add_option("--qubits", cfg.qubits, "qubit counts N")->delimiter(',');
  app.add_option("--steps", cfg.steps, "step counts M (points for percolation)")->delimiter(',');
  auto* trials_opt = app.add_option("--trials", trials, "walk trials per (N, M)");
  auto* samples_opt = app.add_option("--samples", samples, "samples per configuration");
  app.add_option("--epsilon", cfg.epsilon, "paper | <float>")->capture_default_str();
  app.add_flag("--exact-step", cfg.exact_step, "rescale each step to the exact FS length");
  app.add_option("--protocol", protocol, "fresh-scan | frozen-bisection")->capture_default_str();
  app.add_option("--seed", cfg.seed, "64-bit master seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "OpenMP threads, 0 = runtime default")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "output path (default: standard output)");
  app.add_option("--format", format, "csv | json")->capture_default_str();
  app.add_flag("--fit", cfg.fit, "append power-law fit summaries");
  app.add_option("--j-over-h", cfg.j_over_h, "coupling J/h in Hz")->capture_default_str();
  app.add_option("--t-d", cfg.t_d, "decoherence time in s")->capture_default_str();
  app.add_option("--t-f", cfg.t_f, "annealing time in s")->capture_default_str();
  app.add_option("--c", cfg.c, "criterion constant C")->capture_default_str();
  app.add_option("--input", cfg.input, "result file to fit (fit experiment)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    const auto k = qaccess::parse_experiment_kind(kind);
    if (!k) throw qaccess::Error(qaccess::ErrorKind::Usage, "experiment: unknown kind '" + kind + "'");
    cfg.kind = *k;
    const auto f = qaccess::parse_output_format(format);
    if (!f) throw qaccess::Error(qaccess::ErrorKind::Usage, "format: expected csv or json");
    cfg.format = *f;
    const auto p = qaccess::parse_search_protocol(protocol);
    if (!p) throw qaccess::Error(qaccess::ErrorKind::Usage, "protocol: unknown '" + protocol + "'");
    cfg.protocol = *p;
    if (trials_opt->count() > 0) cfg.trials = trials;
    if (samples_opt->count() > 0) cfg.samples = samples;

    const qaccess::ResultSet results = qaccess::run_experiment(cfg);
    qaccess::emit(results, cfg.format, cfg.out);
  } catch (const qaccess::Error& e) {
    fmt::print(stderr, "qaccess: {} error: {}\n", qaccess::to_string(e.kind()), e.what());
    return is_usage(e.kind()) ? kUsageExit : kRuntimeExit;
  } catch (const std::exception& e) {
    fmt::print(stderr, "qaccess: {}\n", e.what());
    return kRuntimeExit;
  }
  return 0;
}
