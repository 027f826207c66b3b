#include "qaccess/experiment.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "qaccess/accessibility.hpp"
#include "qaccess/analysis.hpp"
#include "qaccess/error.hpp"
#include "qaccess/percolation.hpp"

#ifndef QACCESS_VERSION
#define QACCESS_VERSION "0.0.0"
#endif

namespace qaccess {

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::WalkCritical: return "walk-critical";
    case ExperimentKind::PercolationCritical: return "percolation-critical";
    case ExperimentKind::Concentration: return "concentration";
    case ExperimentKind::Accessibility: return "accessibility";
    case ExperimentKind::Fit: return "fit";
  }
  return "unknown";
}

std::string_view to_string(OutputFormat format) noexcept {
  return format == OutputFormat::Json ? "json" : "csv";
}

std::string_view to_string(SearchProtocol protocol) noexcept {
  return protocol == SearchProtocol::FrozenBisection ? "frozen-bisection" : "fresh-scan";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::WalkCritical, ExperimentKind::PercolationCritical,
                 ExperimentKind::Concentration, ExperimentKind::Accessibility,
                 ExperimentKind::Fit})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

std::optional<SearchProtocol> parse_search_protocol(std::string_view name) {
  if (name == "fresh-scan") return SearchProtocol::FreshScan;
  if (name == "frozen-bisection") return SearchProtocol::FrozenBisection;
  return std::nullopt;
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  switch (kind) {
    case ExperimentKind::WalkCritical:
      if (c.qubits.empty()) c.qubits = {1};
      if (c.steps.empty()) c.steps = {3, 10, 30, 100};
      if (!c.trials) c.trials = 100;
      break;
    case ExperimentKind::PercolationCritical:
      if (c.qubits.empty()) c.qubits = {7};
      if (c.steps.empty()) c.steps = {2, 5, 10, 20, 50, 100, 200};
      if (!c.samples) c.samples = 30;
      break;
    case ExperimentKind::Concentration:
      if (c.qubits.empty()) c.qubits = {4, 6, 8};
      if (!c.samples) c.samples = 100000;
      break;
    case ExperimentKind::Accessibility:
      if (c.qubits.empty()) c.qubits = {100};
      break;
    case ExperimentKind::Fit:
      c.fit = true;
      break;
  }
  return c;
}

std::optional<double> ExperimentConfig::fixed_epsilon() const {
  if (epsilon == "paper") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(epsilon, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != epsilon.size() || !std::isfinite(v) || !(v > 0.0))
    throw Error(ErrorKind::Usage,
                fmt::format("epsilon: expected 'paper' or a positive number, got '{}'", epsilon));
  return v;
}

namespace {

[[noreturn]] void usage(std::string_view field, const std::string& why) {
  throw Error(ErrorKind::Usage, fmt::format("{}: {}", field, why));
}

void check_range(std::string_view field, const std::vector<int>& values, int lo, int hi) {
  if (values.empty()) usage(field, "list must not be empty");
  for (int v : values)
    if (v < lo || v > hi) usage(field, fmt::format("{} outside [{}, {}]", v, lo, hi));
}

}  // namespace

void ExperimentConfig::validate() const {
  const ExperimentConfig c = resolved();
  if (c.workers < 0) usage("workers", "must be >= 0");
  (void)c.fixed_epsilon();
  if (c.fit && (c.kind == ExperimentKind::Concentration || c.kind == ExperimentKind::Accessibility))
    usage("fit", fmt::format("no fit is defined for {}", to_string(c.kind)));

  switch (c.kind) {
    case ExperimentKind::WalkCritical:
      // The dense 2(D-1) metric walk is practical up to D = 2^7.
      check_range("qubits", c.qubits, 1, 7);
      check_range("steps", c.steps, 1, 1 << 20);
      if (*c.trials < 1) usage("trials", "must be >= 1");
      if (auto e = c.fixed_epsilon(); e && *e >= kHalfPi) usage("epsilon", "must be < pi/2");
      break;
    case ExperimentKind::PercolationCritical:
      check_range("qubits", c.qubits, 1, 16);
      if (c.steps.empty()) usage("steps", "list must not be empty");
      for (int m : c.steps)
        if (m < 2)
          throw Error(ErrorKind::InsufficientPoints,
                      fmt::format("steps: percolation needs at least 2 points, got {}", m));
      if (*c.samples < 1) usage("samples", "must be >= 1");
      if (c.samples > std::int64_t{1} << 30) usage("samples", "too large");
      if (c.fixed_epsilon()) usage("epsilon", "percolation uses epsilon = delta_s");
      break;
    case ExperimentKind::Concentration:
      check_range("qubits", c.qubits, 1, 20);
      if (*c.samples < 1000) usage("samples", "concentration needs at least 1000");
      break;
    case ExperimentKind::Accessibility: {
      check_range("qubits", c.qubits, 1, 1 << 30);
      DeviceParams p{static_cast<double>(c.qubits.front()), c.j_over_h, c.t_d, c.t_f, c.c};
      try {
        p.validate();
      } catch (const Error& e) {
        usage("device", e.what());
      }
      break;
    }
    case ExperimentKind::Fit:
      if (c.input.empty()) usage("input", "the fit experiment needs an input result file");
      break;
  }
}

namespace {

std::string join(const std::vector<int>& v) {
  return fmt::format("{}", fmt::join(v, " "));
}

std::vector<std::pair<std::string, std::string>> config_metadata(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> m = {
      {"version", QACCESS_VERSION},
      {"experiment", std::string(to_string(c.kind))},
      {"seed", std::to_string(c.seed)},
      {"qubits", join(c.qubits)},
      {"steps", join(c.steps)},
      {"trials", c.trials ? std::to_string(*c.trials) : ""},
      {"samples", c.samples ? std::to_string(*c.samples) : ""},
      {"epsilon", c.epsilon},
      {"exact_step", c.exact_step ? "true" : "false"},
      {"protocol", std::string(to_string(c.protocol))},
      {"workers", std::to_string(c.workers)},
      {"format", std::string(to_string(c.format))},
      {"fit", c.fit ? "true" : "false"},
      {"j_over_h_hz", fmt::format("{:.17g}", c.j_over_h)},
      {"t_d_s", fmt::format("{:.17g}", c.t_d)},
      {"t_f_s", fmt::format("{:.17g}", c.t_f)},
      {"c", fmt::format("{:.17g}", c.c)},
      {"input", c.input},
  };
  if (c.fit) m.emplace_back("fit_weighting", "unweighted OLS on group means");
  return m;
}

template <class F>
auto with_context(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", where, e.what()));
  }
}

void run_walk_rows(const ExperimentConfig& c, ResultSet& rs) {
  const auto eps = c.fixed_epsilon();
  for (int n : c.qubits)
    for (int m : c.steps) {
      CriticalSearchConfig sc;
      sc.qubits = n;
      sc.steps = m;
      sc.trials = *c.trials;
      sc.epsilon_mode = eps ? EpsilonMode::Fixed : EpsilonMode::Paper;
      sc.epsilon = eps.value_or(0.0);
      sc.exact_step = c.exact_step;
      sc.protocol = c.protocol;
      sc.workers = c.workers;
      const CriticalStepResult r =
          with_context(fmt::format("walk-critical N={} M={}", n, m),
                       [&] { return critical_step_length(sc, c.seed); });
      for (std::size_t t = 0; t < r.trials.size(); ++t)
        rs.rows.push_back({std::int64_t{n}, std::int64_t{m}, static_cast<std::int64_t>(t),
                           r.trials[t].value, r.trials[t].censored});
    }
}

void run_percolation_rows(const ExperimentConfig& c, ResultSet& rs) {
  for (int n : c.qubits)
    for (int m : c.steps) {
      const PercolationResult r = with_context(
          fmt::format("percolation-critical N={} M={}", n, m), [&] {
            return critical_threshold_experiment(n, m, static_cast<int>(*c.samples), c.seed,
                                                 c.workers);
          });
      for (std::size_t s = 0; s < r.samples.size(); ++s) {
        const auto& v = r.samples[s];
        rs.rows.push_back({std::int64_t{n}, std::int64_t{m}, static_cast<std::int64_t>(s),
                           v ? Cell{*v} : Cell{}, !v.has_value()});
      }
    }
}

void run_concentration_rows(const ExperimentConfig& c, ResultSet& rs) {
  const auto eps = c.fixed_epsilon();
  for (int n : c.qubits) {
    const std::int64_t dim = std::int64_t{1} << n;
    const double e = eps.value_or(1.0 / static_cast<double>(dim));
    const ConcentrationReport r =
        with_context(fmt::format("concentration D={}", dim), [&] {
          return empirical_concentration(dim, e, *c.samples, c.seed, c.workers);
        });
    rs.rows.push_back({dim, r.epsilon, r.bound, r.empirical_probability, r.samples});
  }
}

void run_accessibility_rows(const ExperimentConfig& c, ResultSet& rs) {
  for (int n : c.qubits) {
    const DeviceParams p{static_cast<double>(n), c.j_over_h, c.t_d, c.t_f, c.c};
    const QuantumnessReport r = with_context(fmt::format("accessibility N={}", n),
                                             [&] { return evaluate_device(p); });
    rs.rows.push_back({std::int64_t{n}, c.j_over_h, c.t_d, c.t_f, r.index, r.passes, r.n_max});
  }
}

std::optional<double> finite(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

FitSummary power_law_summary(std::string model, std::string group, const PowerLawFit& f) {
  return {std::move(model),
          std::move(group),
          {{"A", finite(f.A)},
           {"B", finite(f.B)},
           {"se_A", finite(f.se_A)},
           {"se_B", finite(f.se_B)},
           {"rss", finite(f.rss)},
           {"points", static_cast<double>(f.points)}}};
}

FitSummary scaling_summary(std::string model, const PowerLawFit& f) {
  return {std::move(model),
          "all",
          {{"prefactor", finite(f.A)},
           {"exponent", finite(f.B)},
           {"se_prefactor", finite(f.se_A)},
           {"se_exponent", finite(f.se_B)},
           {"rss", finite(f.rss)},
           {"points", static_cast<double>(f.points)}}};
}

// Mean of the non-null values in column 3 keyed by (column 0, column 1).
std::map<std::int64_t, std::map<std::int64_t, double>> group_means(const ResultSet& rs) {
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, int>> acc;
  for (const auto& row : rs.rows) {
    const bool dropped = std::get<bool>(row.at(4));  // censored / is_none
    if (dropped || !std::holds_alternative<double>(row.at(3))) continue;
    auto& a = acc[{std::get<std::int64_t>(row.at(0)), std::get<std::int64_t>(row.at(1))}];
    a.first += std::get<double>(row.at(3));
    ++a.second;
  }
  std::map<std::int64_t, std::map<std::int64_t, double>> out;
  for (const auto& [key, a] : acc) out[key.first][key.second] = a.first / a.second;
  return out;
}

}  // namespace

std::vector<FitSummary> fit_results(const ResultSet& rs) {
  const bool walk = rs.kind == ExperimentKind::WalkCritical;
  if (!walk && rs.kind != ExperimentKind::PercolationCritical)
    throw Error(ErrorKind::Fit,
                fmt::format("no fit is defined for {} results", to_string(rs.kind)));

  std::vector<FitSummary> out;
  std::vector<FitPoint> amplitudes, exponents;
  for (const auto& [n, by_m] : group_means(rs)) {
    std::vector<FitPoint> pts;
    for (const auto& [m, mean] : by_m) pts.push_back({static_cast<double>(m), mean});
    if (pts.size() < 2) continue;
    const PowerLawFit f = fit_power_law(pts);
    // Walk groups are labelled by qubit count, percolation groups by dimension.
    const double x = walk ? static_cast<double>(n) : std::ldexp(1.0, static_cast<int>(n));
    out.push_back(power_law_summary(walk ? "walk-power-law" : "percolation-power-law",
                                    walk ? fmt::format("N={}", n) : fmt::format("D={}", x), f));
    amplitudes.push_back({x, f.A});
    exponents.push_back({x, f.B});
  }
  if (out.empty())
    throw Error(ErrorKind::Fit, "no group has two or more distinct step counts");

  if (walk) {
    if (amplitudes.size() >= 2) {
      out.push_back(scaling_summary("walk-amplitude-scaling", fit_exponent_scaling(amplitudes)));
      out.push_back(scaling_summary("walk-exponent-scaling", fit_exponent_scaling(exponents)));
    }
    return out;
  }
  if (amplitudes.size() >= 4) {
    const SaturatingFit s = fit_saturating_power_law(amplitudes);
    out.push_back({"percolation-amplitude-saturation",
                   "all",
                   {{"gamma", finite(s.gamma)},
                    {"alpha", finite(s.alpha)},
                    {"beta", finite(s.beta)},
                    {"se_gamma", finite(s.se_gamma)},
                    {"se_alpha", finite(s.se_alpha)},
                    {"se_beta", finite(s.se_beta)},
                    {"converged", s.converged ? 1.0 : 0.0},
                    {"valid", s.valid() ? 1.0 : 0.0}}});
  }
  if (exponents.size() >= 2) {
    bool positive = true;
    for (const auto& p : exponents) positive = positive && p.y > 0.0;
    if (positive)
      out.push_back(
          scaling_summary("percolation-exponent-scaling", fit_exponent_scaling(exponents)));
  }
  return out;
}

ResultSet run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ExperimentConfig c = config.resolved();
  const auto start = std::chrono::steady_clock::now();

  ResultSet rs;
  rs.kind = c.kind;
  rs.metadata = config_metadata(c);
  switch (c.kind) {
    case ExperimentKind::WalkCritical: run_walk_rows(c, rs); break;
    case ExperimentKind::PercolationCritical: run_percolation_rows(c, rs); break;
    case ExperimentKind::Concentration: run_concentration_rows(c, rs); break;
    case ExperimentKind::Accessibility: run_accessibility_rows(c, rs); break;
    case ExperimentKind::Fit: {
      const ResultSet input = read_results(c.input);
      auto fits = with_context(fmt::format("fit of {}", c.input),
                               [&] { return fit_results(input); });
      for (const auto& f : fits)
        for (const auto& [name, value] : f.parameters)
          rs.rows.push_back({f.model, f.group, name, value ? Cell{*value} : Cell{}});
      rs.fits = std::move(fits);
      break;
    }
  }
  if (c.fit && c.kind != ExperimentKind::Fit)
    rs.fits = with_context(std::string(to_string(c.kind)) + " fit",
                           [&] { return fit_results(rs); });

  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  rs.metadata.emplace_back("wall_clock_s", fmt::format("{:.6f}", wall.count()));
  return rs;
}

}  // namespace qaccess
