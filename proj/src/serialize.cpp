#include "gibbslim/serialize.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gibbslim/errors.hpp"
#include "gibbslim/version.hpp"

namespace gibbslim::serialize {

namespace {

std::string format_number(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void check_shape(const Report& r) {
  if (r.rows.empty()) throw IoFailure("report has no rows");
  if (r.columns.empty()) throw IoFailure("report has no columns");
  for (const auto& row : r.rows)
    if (row.size() != r.columns.size())
      throw IoFailure("report row width does not match the header");
  if (!r.wall_times_ms.empty() && r.wall_times_ms.size() != r.rows.size())
    throw IoFailure("wall time list does not match the row count");
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ConfigError("output format must be csv or json, got '" + s + "'");
}

const char* extension(Format f) { return f == Format::Csv ? "csv" : "json"; }

std::string to_csv(const Report& r) {
  check_shape(r);
  std::string out;
  for (std::size_t c = 0; c < r.columns.size(); ++c) {
    if (c) out += ',';
    out += r.columns[c];
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (const Real* v = std::get_if<Real>(&row[c]))
        out += format_number(*v);
      else
        out += std::get<std::string>(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json_text(const Report& r) {
  check_shape(r);
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["seed"] = r.seed;
  j["config"] = r.config_echo;
  j["columns"] = r.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    auto jrow = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const Real* v = std::get_if<Real>(&cell))
        jrow.push_back(*v);
      else
        jrow.push_back(std::get<std::string>(cell));
    }
    rows.push_back(std::move(jrow));
  }
  j["rows"] = std::move(rows);
  if (!r.wall_times_ms.empty()) j["wall_times_ms"] = r.wall_times_ms;
  return j.dump(2) + "\n";
}

void emit_report(const Report& r, Format f, const std::string& path) {
  const std::string text = f == Format::Csv ? to_csv(r) : to_json_text(r);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoFailure("failed writing '" + path + "'");
}

}  // namespace gibbslim::serialize
