#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "qaccess/error.hpp"
#include "qaccess/experiment.hpp"

namespace qaccess {

namespace {

using ColumnType::Bool;
using ColumnType::Int;
using ColumnType::Real;
using ColumnType::Text;

constexpr Column kWalk[] = {{"qubits", Int},
                            {"steps", Int},
                            {"trial", Int},
                            {"critical_delta_s", Real},
                            {"censored", Bool}};
constexpr Column kPercolation[] = {{"qubits", Int},
                                   {"points", Int},
                                   {"sample", Int},
                                   {"critical_delta_s", Real},
                                   {"is_none", Bool}};
constexpr Column kConcentration[] = {{"dimension", Int},
                                     {"epsilon", Real},
                                     {"bound", Real},
                                     {"empirical", Real},
                                     {"samples", Int}};
constexpr Column kAccessibility[] = {{"qubits", Int}, {"j_over_h_hz", Real}, {"t_d_s", Real},
                                     {"t_f_s", Real},  {"index", Real},       {"passes", Bool},
                                     {"n_max", Real}};
constexpr Column kFit[] = {
    {"model", Text}, {"group", Text}, {"parameter", Text}, {"value", Real}};

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string csv_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string json_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      return std::isfinite(v) ? format_real(v) : "null";
    }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return json_string(v); }
  };
  return std::visit(Visitor{}, cell);
}

std::string fit_json(const FitSummary& f) {
  std::string s = fmt::format("{{\"model\":{},\"group\":{},\"parameters\":{{",
                              json_string(f.model), json_string(f.group));
  for (std::size_t i = 0; i < f.parameters.size(); ++i) {
    const auto& [name, value] = f.parameters[i];
    s += fmt::format("{}{}:{}", i ? "," : "", json_string(name),
                     value ? format_real(*value) : "null");
  }
  return s + "}}";
}

[[noreturn]] void bad_file(const std::string& why) { throw Error(ErrorKind::File, why); }

Cell parse_cell(std::string_view text, ColumnType type) {
  if (text.empty()) return std::monostate{};
  switch (type) {
    case Int: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size())
        bad_file(fmt::format("bad integer '{}'", text));
      return v;
    }
    case Real: {
      double v = 0.0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size())
        bad_file(fmt::format("bad number '{}'", text));
      return v;
    }
    case Bool:
      if (text == "true") return true;
      if (text == "false") return false;
      bad_file(fmt::format("bad boolean '{}'", text));
    case Text:
      return std::string(text);
  }
  return std::monostate{};
}

Cell json_to_cell(const nlohmann::json& j, ColumnType type) {
  if (j.is_null()) return std::monostate{};
  switch (type) {
    case Int: return j.get<std::int64_t>();
    case Real: return j.get<double>();
    case Bool: return j.get<bool>();
    case Text: return j.get<std::string>();
  }
  return std::monostate{};
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

ExperimentKind kind_from_metadata(const ResultSet& rs) {
  const auto kind = parse_experiment_kind(rs.meta("experiment"));
  if (!kind) bad_file(fmt::format("unknown experiment '{}'", rs.meta("experiment")));
  return *kind;
}

FitSummary fit_from_json(const nlohmann::ordered_json& j) {
  FitSummary f{j.at("model").get<std::string>(), j.at("group").get<std::string>(), {}};
  for (const auto& [name, value] : j.at("parameters").items())
    f.parameters.emplace_back(name, value.is_null() ? std::nullopt
                                                    : std::optional<double>(value.get<double>()));
  return f;
}

}  // namespace

std::span<const Column> columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::WalkCritical: return kWalk;
    case ExperimentKind::PercolationCritical: return kPercolation;
    case ExperimentKind::Concentration: return kConcentration;
    case ExperimentKind::Accessibility: return kAccessibility;
    case ExperimentKind::Fit: return kFit;
  }
  return {};
}

std::string_view ResultSet::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return v;
  return {};
}

// Layout: "# key=value" metadata lines, the header, the rows, then one
// "# fit {json}" line per fit summary.
std::string to_csv(const ResultSet& rs) {
  std::string s;
  for (const auto& [k, v] : rs.metadata) s += fmt::format("# {}={}\n", k, v);
  const auto cols = columns(rs.kind);
  for (std::size_t i = 0; i < cols.size(); ++i) s += fmt::format("{}{}", i ? "," : "", cols[i].name);
  s += '\n';
  for (const auto& row : rs.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += csv_cell(row[i]);
    }
    s += '\n';
  }
  if (rs.fits) {
    s += "# fits\n";
    for (const auto& f : *rs.fits) s += "# fit " + fit_json(f) + '\n';
  }
  return s;
}

std::string to_json(const ResultSet& rs) {
  std::string s = "{\n  \"metadata\": {";
  for (std::size_t i = 0; i < rs.metadata.size(); ++i)
    s += fmt::format("{}\n    {}: {}", i ? "," : "", json_string(rs.metadata[i].first),
                     json_string(rs.metadata[i].second));
  s += "\n  },\n  \"rows\": [";
  const auto cols = columns(rs.kind);
  for (std::size_t r = 0; r < rs.rows.size(); ++r) {
    s += r ? ",\n    {" : "\n    {";
    for (std::size_t i = 0; i < cols.size(); ++i)
      s += fmt::format("{}\"{}\": {}", i ? ", " : "", cols[i].name, json_cell(rs.rows[r][i]));
    s += '}';
  }
  s += rs.rows.empty() ? "]" : "\n  ]";
  if (rs.fits) {
    s += ",\n  \"fits\": [";
    for (std::size_t i = 0; i < rs.fits->size(); ++i)
      s += fmt::format("{}\n    {}", i ? "," : "", fit_json((*rs.fits)[i]));
    s += rs.fits->empty() ? "]" : "\n  ]";
  }
  return s + "\n}\n";
}

ResultSet parse_csv(std::string_view text) {
  ResultSet rs;
  bool header_seen = false;
  std::span<const Column> cols;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    if (line.starts_with("# fit ")) {
      if (!rs.fits) bad_file(fmt::format("line {}: fit before the fit block", line_no));
      rs.fits->push_back(fit_from_json(nlohmann::ordered_json::parse(line.substr(6))));
    } else if (line == "# fits") {
      rs.fits.emplace();
    } else if (line.starts_with("# ")) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) bad_file(fmt::format("line {}: bad metadata", line_no));
      rs.metadata.emplace_back(std::string(line.substr(2, eq - 2)),
                               std::string(line.substr(eq + 1)));
    } else if (!header_seen) {
      rs.kind = kind_from_metadata(rs);
      cols = columns(rs.kind);
      const auto names = split(line, ',');
      bool match = names.size() == cols.size();
      for (std::size_t i = 0; match && i < cols.size(); ++i) match = names[i] == cols[i].name;
      if (!match) bad_file(fmt::format("line {}: unexpected header '{}'", line_no, line));
      header_seen = true;
    } else {
      const auto fields = split(line, ',');
      if (fields.size() != cols.size())
        bad_file(fmt::format("line {}: expected {} fields", line_no, cols.size()));
      std::vector<Cell> row;
      for (std::size_t i = 0; i < cols.size(); ++i) row.push_back(parse_cell(fields[i], cols[i].type));
      rs.rows.push_back(std::move(row));
    }
  }
  if (!header_seen) bad_file("missing header");
  return rs;
}

ResultSet parse_json(std::string_view text) {
  ResultSet rs;
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    for (const auto& [k, v] : j.at("metadata").items())
      rs.metadata.emplace_back(k, v.get<std::string>());
    rs.kind = kind_from_metadata(rs);
    const auto cols = columns(rs.kind);
    for (const auto& r : j.at("rows")) {
      std::vector<Cell> row;
      for (const auto& c : cols) row.push_back(json_to_cell(r.at(std::string(c.name)), c.type));
      rs.rows.push_back(std::move(row));
    }
    if (j.contains("fits")) {
      rs.fits.emplace();
      for (const auto& f : j.at("fits")) rs.fits->push_back(fit_from_json(f));
    }
  } catch (const nlohmann::json::exception& e) {
    bad_file(fmt::format("malformed result JSON: {}", e.what()));
  }
  return rs;
}

void emit(const ResultSet& results, OutputFormat format, const std::string& path) {
  const std::string text = format == OutputFormat::Json ? to_json(results) : to_csv(results);
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) bad_file(fmt::format("cannot open '{}' for writing", path));
  out << text;
  out.close();
  if (!out) bad_file(fmt::format("write to '{}' failed", path));
}

ResultSet read_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_file(fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') return parse_json(text);
    return parse_csv(text);
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace qaccess
