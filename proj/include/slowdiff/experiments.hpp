// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowdiff/core.hpp"
#include "slowdiff/io.hpp"

namespace slowdiff
{

// Unset fields fall back to per-experiment defaults.
struct ExperimentConfig
{
  std::string experiment;
  std::optional<Equation> equation;
  std::optional<double> p, m, C, L, t_end, cfl;
  std::optional<int> n, grid, samples, pairs;
  std::uint64_t seed = 1;
  std::string out = "out";
  OutputFormat format = OutputFormat::Csv;

  // Keys: experiment, equation, p, m, n, C, L, grid, t_end, cfl, samples, pairs, seed, out,
  // format. ConfigError on unknown keys or unparsable values.
  static ExperimentConfig from_key_values(const std::map<std::string, std::string> &kv);
  void set(const std::string &key, const std::string &value);
};

struct Check
{
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult
{
  std::string experiment;
  int criterion = 0;
  std::vector<Check> checks;
  std::vector<Table> tables;
  KeyValues summary;

  bool passed() const;
  // "name=PASS (detail); ..." over all checks.
  std::string digest() const;
};

struct ExperimentInfo
{
  std::string name;
  int criterion;
  std::string title;
};

const std::vector<ExperimentInfo> &experiments();
const ExperimentInfo &experiment_info(const std::string &name);

ExperimentResult run_experiment(const ExperimentConfig &config);

// One file per table plus summary.<ext>. Creates the directory if needed.
void write_artifacts(const ExperimentResult &result, const std::string &dir, OutputFormat f);

}  // namespace slowdiff
