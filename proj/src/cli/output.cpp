#include "cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace effmap::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != header.size()) throw std::logic_error("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&out](const auto& fields, auto&& render) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += render(fields[i]);
    }
    out += "\r\n";
  };
  line(t.header, [](const std::string& s) { return quote_field(s); });
  for (const auto& row : t.rows) {
    line(row, [](const Cell& c) {
      if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
      if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
      return quote_field(std::get<std::string>(c));
    });
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void write_table(const std::filesystem::path& path, const Table& t) { write_text(path, to_csv(t)); }

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json budget_json(const DetectionBudget& b) {
  Json j;
  j["eta"] = b.eta;
  j["S_imp"] = b.S_imp;
  j["S_ideal"] = b.S_ideal;
  j["S_ba"] = b.S_ba;
  j["heisenberg_product_over_hbar2"] = b.heisenberg_product_over_hbar2();
  j["ideal_heisenberg_product_over_hbar2"] = b.S_ideal * b.S_ba / (kHbar * kHbar);
  j["S"] = std::abs(b.S);
  j["N"] = b.N;
  j["I"] = b.I;
  j["eta_qe"] = b.eta_qe;
  j["units"] = Json{{"S_imp", "m^2/Hz"}, {"S_ideal", "m^2/Hz"}, {"S_ba", "N^2/Hz"}, {"S", "1/(m s)"},
                    {"N", "1/s"}, {"I", "1/(m^2 s)"}};
  return j;
}

}  // namespace effmap::cli
