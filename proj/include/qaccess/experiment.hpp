#pragma once

// Experiment runner behind the command-line tool: configuration, dispatch
// to the numerical modules, and CSV / JSON persistence of the results.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qaccess/walk.hpp"

namespace qaccess {

enum class ExperimentKind { WalkCritical, PercolationCritical, Concentration, Accessibility, Fit };
enum class OutputFormat { Csv, Json };

std::string_view to_string(ExperimentKind kind) noexcept;
std::string_view to_string(OutputFormat format) noexcept;
std::string_view to_string(SearchProtocol protocol) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
std::optional<OutputFormat> parse_output_format(std::string_view name);
std::optional<SearchProtocol> parse_search_protocol(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::WalkCritical;
  // Empty lists and unset counts take per-kind defaults (see resolved()).
  std::vector<int> qubits;
  std::vector<int> steps;  // walk: steps M; percolation: points M
  std::optional<int> trials;
  std::optional<std::int64_t> samples;
  std::string epsilon = "paper";  // "paper" or a positive number
  bool exact_step = false;
  SearchProtocol protocol = SearchProtocol::FreshScan;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
  bool fit = false;
  // Device parameters for the accessibility kind, SI units.
  double j_over_h = 5e9;
  double t_d = 10e-9;
  double t_f = 5e-6;
  double c = 1.0;
  std::string input;  // result file consumed by the fit kind

  /// Copy with the per-kind defaults filled in.
  ExperimentConfig resolved() const;
  /// Throws Error(Usage) naming the offending field, or
  /// Error(InsufficientPoints) for percolation with fewer than two points.
  void validate() const;
  /// nullopt in paper mode.
  std::optional<double> fixed_epsilon() const;
};

using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

enum class ColumnType { Int, Real, Bool, Text };

struct FitSummary {
  std::string model;
  std::string group;
  std::vector<std::pair<std::string, std::optional<double>>> parameters;

  bool operator==(const FitSummary&) const = default;
};

struct ResultSet {
  ExperimentKind kind = ExperimentKind::WalkCritical;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::vector<Cell>> rows;
  std::optional<std::vector<FitSummary>> fits;  // present iff a fit was requested

  std::string_view meta(std::string_view key) const;
  bool operator==(const ResultSet&) const = default;
};

struct Column {
  std::string_view name;
  ColumnType type;
};

/// Fixed column layout of each experiment kind.
std::span<const Column> columns(ExperimentKind kind);

ResultSet run_experiment(const ExperimentConfig& config);

/// Fits derived from walk or percolation rows: per-group power laws in M and
/// the scaling of their coefficients across groups.
std::vector<FitSummary> fit_results(const ResultSet& results);

std::string to_csv(const ResultSet& results);
std::string to_json(const ResultSet& results);
ResultSet parse_csv(std::string_view text);
ResultSet parse_json(std::string_view text);

/// Writes to `path` (standard output when empty); throws Error(File).
void emit(const ResultSet& results, OutputFormat format, const std::string& path);
/// Reads a file written by emit, detecting the format from its content.
ResultSet read_results(const std::string& path);

}  // namespace qaccess
