#pragma once
// CSV tables and JSON summaries. Doubles use the shortest representation that
// reads back to the same bits.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "cli/config.hpp"
#include "effmap/detection.hpp"

namespace effmap::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> header;  // ASCII, SI unit suffixes
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

std::string format_double(double v);
/// RFC 4180 quoting for a single field.
std::string quote_field(const std::string& s);
std::string to_csv(const Table& t);

/// Splits CSV text into records of unquoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
/// Exact inverse of format_double; throws std::invalid_argument on junk.
double parse_double(const std::string& s);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_table(const std::filesystem::path& path, const Table& t);
void write_json(const std::filesystem::path& path, const Json& j);

/// eta, S_imp, S_ideal, S_ba, the product S_imp S_ba / ħ² and the raw S, N, I.
Json budget_json(const DetectionBudget& b);

}  // namespace effmap::cli
