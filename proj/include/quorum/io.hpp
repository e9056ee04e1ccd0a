#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quorum/error.hpp"
#include "quorum/label_matrix.hpp"

namespace quorum {
namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline int parse_int_field(std::string_view field, int line) {
  field = trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw parse_error("expected integer, got '" + std::string(field) + "'", line);
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path);
  return in;
}

inline bool header_matches(std::string_view line, std::string_view expected) {
  auto fields = split_fields(line);
  auto want = split_fields(expected);
  if (fields.size() != want.size()) return false;
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (trim(fields[i]) != want[i]) return false;
  return true;
}

}  // namespace detail

// Reads a labels CSV (header `item,labeler,label`, one row per observed
// label). L, N and K come from the maxima in the file; pass forced_classes
// to pin K instead.
inline label_matrix load_labels(const std::string& path, int forced_classes = 0) {
  auto in = detail::open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || !detail::header_matches(line, "item,labeler,label"))
    throw parse_error("expected header 'item,labeler,label'", 1);
  std::vector<label_triple> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != 3) throw parse_error("expected 3 fields", lineno);
    label_triple r;
    r.item = detail::parse_int_field(fields[0], lineno);
    r.labeler = detail::parse_int_field(fields[1], lineno);
    r.label = detail::parse_int_field(fields[2], lineno);
    if (r.item < 1) throw domain_error("item id must be >= 1 (line " +
                                       std::to_string(lineno) + ")");
    if (r.labeler < 1) throw domain_error("labeler id must be >= 1 (line " +
                                          std::to_string(lineno) + ")");
    if (r.label < 1) throw domain_error("label must be >= 1 (line " +
                                        std::to_string(lineno) + ")");
    rows.push_back(r);
  }
  if (rows.empty()) throw domain_error("no labels");
  return label_matrix(rows, forced_classes);
}

// Reads a gold CSV (header `item,label`). Items may cover any subset of the
// corpus.
inline gold_labels load_gold(const std::string& path) {
  auto in = detail::open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || !detail::header_matches(line, "item,label"))
    throw parse_error("expected header 'item,label'", 1);
  std::vector<std::pair<int, int>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != 2) throw parse_error("expected 2 fields", lineno);
    int item = detail::parse_int_field(fields[0], lineno);
    int label = detail::parse_int_field(fields[1], lineno);
    if (item < 1) throw domain_error("item id must be >= 1 (line " +
                                     std::to_string(lineno) + ")");
    if (label < 1) throw domain_error("gold label must be >= 1 (line " +
                                      std::to_string(lineno) + ")");
    rows.push_back({item, label});
  }
  return gold_labels(rows);
}

// Writes rows sorted by (item, labeler); loading the result reproduces the
// matrix entries exactly. UTF-8, LF line endings.
inline void save_labels(const label_matrix& m, std::ostream& out) {
  out << "item,labeler,label\n";
  for (const auto& r : m.rows())
    out << r.item << ',' << r.labeler << ',' << r.label << '\n';
}

inline void save_labels(const label_matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot write " + path);
  save_labels(m, out);
}

inline void save_gold(const gold_labels& g, std::ostream& out) {
  out << "item,label\n";
  for (const auto& [item, label] : g.entries()) out << item << ',' << label << '\n';
}

inline void save_gold(const gold_labels& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot write " + path);
  save_gold(g, out);
}

}  // namespace quorum
