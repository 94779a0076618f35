// Copyright 2026 The GPGP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CSV formats.
//
//   items:  id,c1,...,cp        one row per item, finite decimal covariates
//   duels:  winner,loser        each row is (winner, loser, +1)
//      or:  i,j,y               oriented form, y in {-1,+1}
//
// Ids are opaque strings without commas.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"

namespace gpgp {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

// Reads non-blank lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!trim(line).empty()) lines.emplace_back(no, line);
  }
  return lines;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline ItemTable load_items(const std::string& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw ParseError(path, 0, "missing header");
  const auto header = detail::split_csv_line(lines.front().second);
  if (header.empty() || header.front() != "id")
    throw ParseError(path, lines.front().first, "header must start with 'id'");
  const std::size_t p = header.size() - 1;

  ItemTable items;
  std::vector<double> values;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [no, text] = lines[k];
    const auto cells = detail::split_csv_line(text);
    if (cells.size() != header.size())
      throw ParseError(path, no, "expected " + std::to_string(header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
    if (cells[0].empty()) throw ParseError(path, no, "empty item id");
    if (!seen.emplace(cells[0], items.ids.size()).second)
      throw ParseError(path, no, "duplicate item id '" + cells[0] + "'");
    items.ids.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(cells[c], v))
        throw ParseError(path, no, "covariate '" + cells[c] + "' is not a finite number");
      values.push_back(v);
    }
  }
  if (items.ids.empty()) throw ParseError(path, 0, "no items");
  const auto n = static_cast<Eigen::Index>(items.ids.size());
  items.covariates = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(p));
  return items;
}

inline std::vector<Duel> load_duels(const std::string& path, const ItemTable& items) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.ids.size(); ++i) index.emplace(items.ids[i], i);

  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw ParseError(path, 0, "missing header");
  const auto header = detail::split_csv_line(lines.front().second);
  bool oriented = false;
  if (header == std::vector<std::string>{"winner", "loser"})
    oriented = false;
  else if (header == std::vector<std::string>{"i", "j", "y"})
    oriented = true;
  else
    throw ParseError(path, lines.front().first, "header must be 'winner,loser' or 'i,j,y'");

  auto lookup = [&](const std::string& id, std::size_t no) {
    auto it = index.find(id);
    if (it == index.end()) throw ParseError(path, no, "unknown item id '" + id + "'");
    return it->second;
  };

  std::vector<Duel> duels;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& [no, text] = lines[k];
    const auto cells = detail::split_csv_line(text);
    if (cells.size() != header.size())
      throw ParseError(path, no, "expected " + std::to_string(header.size()) + " columns, got " +
                                     std::to_string(cells.size()));
    Duel d{lookup(cells[0], no), lookup(cells[1], no), 1};
    if (oriented) {
      if (cells[2] == "1" || cells[2] == "+1")
        d.y = 1;
      else if (cells[2] == "-1")
        d.y = -1;
      else
        throw ParseError(path, no, "label '" + cells[2] + "' must be +1 or -1");
    }
    if (d.first == d.second) throw ParseError(path, no, "self-duel of '" + cells[0] + "'");
    duels.push_back(d);
  }
  if (duels.empty()) throw InputError(path + ": no duels");
  return duels;
}

inline PreferenceDataset load_dataset(const std::string& items_path, const std::string& duels_path) {
  PreferenceDataset ds;
  ds.items = load_items(items_path);
  ds.duels = load_duels(duels_path, ds.items);
  validate(ds);
  return ds;
}

inline std::string items_csv(const ItemTable& items) {
  std::string out = "id";
  for (std::size_t c = 1; c <= items.dim(); ++c) out += ",c" + std::to_string(c);
  out += '\n';
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += items.ids.empty() ? std::to_string(i) : items.ids[i];
    for (Eigen::Index c = 0; c < items.covariates.cols(); ++c)
      out += "," + detail::format_double(items.covariates(static_cast<Eigen::Index>(i), c));
    out += '\n';
  }
  return out;
}

// Oriented i,j,y form; keeps which item was listed first.
inline std::string duels_csv(const PreferenceDataset& ds) {
  std::string out = "i,j,y\n";
  auto id = [&](std::size_t i) { return ds.items.ids.empty() ? std::to_string(i) : ds.items.ids[i]; };
  for (const Duel& d : ds.duels)
    out += id(d.first) + "," + id(d.second) + "," + (d.y > 0 ? "1" : "-1") + "\n";
  return out;
}

// Writes to a sibling temporary then renames, so readers never see a
// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gpgp
