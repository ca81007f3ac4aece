// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "slowdiff/error.hpp"
#include "slowdiff/io.hpp"

using namespace slowdiff;

TEST_CASE("doubles round trip through text")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i)
  {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_cell(Cell{42LL}) == "42");
  CHECK(format_cell(Cell{std::string("M")}) == "M");
}

TEST_CASE("csv quotes separators")
{
  Table t{"demo", {"a", "b,c"}, {}};
  t.add({1.5, std::string("say \"hi\"")});
  t.add({2LL, std::string("plain")});
  std::ostringstream os;
  write_csv(t, os);
  CHECK(os.str() == "a,\"b,c\"\n1.5,\"say \"\"hi\"\"\"\n2,plain\n");
  CHECK_THROWS_AS(t.add({1.0}), ContractError);
}

TEST_CASE("json tables keep exact doubles and name non-finite values")
{
  Table t{"demo", {"x", "y"}, {}};
  const double third = 1.0 / 3.0;
  t.add({third, std::numeric_limits<double>::infinity()});
  t.add({std::nan(""), 7LL});
  std::ostringstream os;
  write_json(t, os);
  const nlohmann::json j = nlohmann::json::parse(os.str());
  CHECK(j["name"] == "demo");
  CHECK(j["columns"][1] == "y");
  CHECK(j["rows"][0][0].get<double>() == third);
  CHECK(j["rows"][0][1] == "inf");
  CHECK(j["rows"][1][0] == "nan");
  CHECK(j["rows"][1][1].get<long long>() == 7);
}

TEST_CASE("summary output in both formats")
{
  const KeyValues kv = {{"label", std::string("B")}, {"gamma", 0.25}, {"count", 3LL}};
  std::ostringstream csv;
  write_key_values(kv, OutputFormat::Csv, csv);
  CHECK(csv.str() == "key,value\nlabel,B\ngamma,0.25\ncount,3\n");
  std::ostringstream js;
  write_key_values(kv, OutputFormat::Json, js);
  const nlohmann::json j = nlohmann::json::parse(js.str());
  CHECK(j["gamma"].get<double>() == 0.25);

  Table t{"demo", {"x"}, {}};
  t.add({1.0});
  std::ostringstream doc;
  write_json_document({t, t}, kv, doc);
  const nlohmann::ordered_json d = nlohmann::ordered_json::parse(doc.str());
  CHECK(d["tables"].size() == 2);
  CHECK(d["summary"]["label"] == "B");
  CHECK(d["summary"].begin().key() == "label");
}

TEST_CASE("format names")
{
  CHECK(parse_format("csv") == OutputFormat::Csv);
  CHECK(parse_format("json") == OutputFormat::Json);
  CHECK_THROWS(parse_format("xml"));
  CHECK(std::string(file_extension(OutputFormat::Json)) == ".json");
}

TEST_CASE("key value parsing")
{
  std::istringstream ok("# header\nexperiment = barenblatt\n\n p=3 # trailing\ngrid =\t128\n");
  const auto kv = parse_key_values(ok);
  CHECK(kv.size() == 3);
  CHECK(kv.at("experiment") == "barenblatt");
  CHECK(kv.at("p") == "3");
  CHECK(kv.at("grid") == "128");

  std::istringstream repeated("p = 3\np = 4\n");
  CHECK_THROWS_AS(parse_key_values(repeated), ConfigError);
  std::istringstream bad("p 3\n");
  CHECK_THROWS_AS(parse_key_values(bad), ConfigError);
  std::istringstream empty_key(" = 3\n");
  CHECK_THROWS_AS(parse_key_values(empty_key), ConfigError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/slowdiff.cfg"), ConfigError);
}
