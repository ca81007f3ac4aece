// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "slowdiff/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "slowdiff/error.hpp"

namespace slowdiff
{

void Table::add(std::vector<Cell> row)
{
  if (row.size() != columns.size())
  {
    throw ContractError("table row width does not match the header of " + name);
  }
  rows.push_back(std::move(row));
}

OutputFormat parse_format(const std::string &text)
{
  if (text == "csv")
  {
    return OutputFormat::Csv;
  }
  if (text == "json")
  {
    return OutputFormat::Json;
  }
  throw ConfigError("unknown output format '" + text + "' (expected csv or json)");
}

const char *file_extension(OutputFormat f)
{
  return f == OutputFormat::Csv ? ".csv" : ".json";
}

std::string format_double(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell &c)
{
  if (const double *d = std::get_if<double>(&c))
  {
    return format_double(*d);
  }
  if (const long long *i = std::get_if<long long>(&c))
  {
    return std::to_string(*i);
  }
  return std::get<std::string>(c);
}

namespace
{

std::string csv_escape(const std::string &s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
  {
    return s;
  }
  std::string out = "\"";
  for (char ch : s)
  {
    if (ch == '"')
    {
      out += '"';
    }
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json cell_json(const Cell &c)
{
  if (const double *d = std::get_if<double>(&c))
  {
    // JSON has no non-finite numbers; keep them as strings.
    if (!std::isfinite(*d))
    {
      return format_double(*d);
    }
    return *d;
  }
  if (const long long *i = std::get_if<long long>(&c))
  {
    return *i;
  }
  return std::get<std::string>(c);
}

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_csv(const Table &table, std::ostream &os)
{
  for (std::size_t c = 0; c < table.columns.size(); ++c)
  {
    os << (c ? "," : "") << csv_escape(table.columns[c]);
  }
  os << '\n';
  for (const auto &row : table.rows)
  {
    for (std::size_t c = 0; c < row.size(); ++c)
    {
      os << (c ? "," : "") << csv_escape(format_cell(row[c]));
    }
    os << '\n';
  }
}

namespace
{

nlohmann::ordered_json table_json(const Table &table)
{
  nlohmann::ordered_json j;
  j["name"] = table.name;
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto &row : table.rows)
  {
    auto r = nlohmann::ordered_json::array();
    for (const Cell &c : row)
    {
      r.push_back(cell_json(c));
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

nlohmann::ordered_json key_values_json(const KeyValues &kv)
{
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto &[k, v] : kv)
  {
    j[k] = cell_json(v);
  }
  return j;
}

}  // namespace

void write_json(const Table &table, std::ostream &os)
{
  // The serializer prints doubles in shortest round-trip form.
  os << table_json(table).dump(2) << '\n';
}

void write_table(const Table &table, OutputFormat f, std::ostream &os)
{
  if (f == OutputFormat::Csv)
  {
    write_csv(table, os);
  }
  else
  {
    write_json(table, os);
  }
}

void write_key_values(const KeyValues &kv, OutputFormat f, std::ostream &os)
{
  if (f == OutputFormat::Csv)
  {
    os << "key,value\n";
    for (const auto &[k, v] : kv)
    {
      os << csv_escape(k) << ',' << csv_escape(format_cell(v)) << '\n';
    }
    return;
  }
  os << key_values_json(kv).dump(2) << '\n';
}

void write_json_document(const std::vector<Table> &tables, const KeyValues &summary,
                         std::ostream &os)
{
  nlohmann::ordered_json j;
  j["tables"] = nlohmann::ordered_json::array();
  for (const Table &t : tables)
  {
    j["tables"].push_back(table_json(t));
  }
  j["summary"] = key_values_json(summary);
  os << j.dump(2) << '\n';
}

std::map<std::string, std::string> parse_key_values(std::istream &is)
{
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(is, line))
  {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
    {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
    {
      throw ConfigError("config line " + std::to_string(number) + ": empty key");
    }
    if (!out.emplace(key, value).second)
    {
      throw ConfigError("config line " + std::to_string(number) + ": repeated key " + key);
    }
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file " + path);
  }
  return parse_key_values(in);
}

}  // namespace slowdiff
