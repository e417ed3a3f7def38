#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "nnrepair/error.hpp"

namespace nnrepair::csv {

inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

inline std::string row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += (i ? "," : "") + field(cells[i]);
  }
  return out + "\n";
}

/// RFC-4180-style reader: quoted fields may hold commas, quotes and newlines.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> current;
  std::string cell;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') {
          ++line;
        }
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      current.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n') {
      if (any || !cell.empty()) {
        current.push_back(std::move(cell));
        rows.push_back(std::move(current));
      }
      current.clear();
      cell.clear();
      any = false;
      ++line;
    } else if (c != '\r') {
      cell += c;
      any = true;
    }
  }
  if (quoted) {
    throw ParseError("unterminated quoted CSV field", line);
  }
  if (any || !cell.empty()) {
    current.push_back(std::move(cell));
    rows.push_back(std::move(current));
  }
  return rows;
}

/// Shortest round-trip text for a double.
inline std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

inline double to_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + s + "'", line);
  }
  return v;
}

}  // namespace nnrepair::csv
