#pragma once

// Deterministic study reports: CSV with a fixed header (byte-stable across
// reruns) and JSON with the config echo, version and seed alongside.

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gibbslim/types.hpp"

namespace gibbslim::serialize {

using Cell = std::variant<Real, std::string>;

enum class Format { Csv, Json };

Format parse_format(const std::string& s);
const char* extension(Format f);

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, std::string> config_echo;
  std::uint64_t seed = 0;
  std::vector<Real> wall_times_ms;  // per row; kept out of the CSV on purpose
};

std::string to_csv(const Report& r);
std::string to_json_text(const Report& r);

// writes <path> in the given format; refuses empty reports before touching disk
void emit_report(const Report& r, Format f, const std::string& path);

}  // namespace gibbslim::serialize
