// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace slowdiff
{

using Cell = std::variant<double, long long, std::string>;

struct Table
{
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

enum class OutputFormat
{
  Csv,
  Json
};

OutputFormat parse_format(const std::string &text);
const char *file_extension(OutputFormat f);

// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);
std::string format_cell(const Cell &c);

void write_csv(const Table &table, std::ostream &os);
void write_json(const Table &table, std::ostream &os);
void write_table(const Table &table, OutputFormat f, std::ostream &os);

using KeyValues = std::vector<std::pair<std::string, Cell>>;

// Flat object (JSON) or key,value rows (CSV).
void write_key_values(const KeyValues &kv, OutputFormat f, std::ostream &os);

// {"tables": [...], "summary": {...}} as one JSON document.
void write_json_document(const std::vector<Table> &tables, const KeyValues &summary,
                         std::ostream &os);

// One "key = value" per line; '#' starts a comment. ConfigError on malformed lines or
// repeated keys.
std::map<std::string, std::string> parse_key_values(std::istream &is);
std::map<std::string, std::string> read_config_file(const std::string &path);

}  // namespace slowdiff
