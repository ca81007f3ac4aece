// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace slowdiff
{

// Every library failure derives from Error; the CLI maps the concrete type to an
// exit code.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

class ParameterError : public Error
{
public:
  using Error::Error;
  const char *kind() const noexcept override { return "parameter"; }
};

class DomainError : public Error
{
public:
  using Error::Error;
  const char *kind() const noexcept override { return "domain"; }
};

class ContractError : public Error
{
public:
  using Error::Error;
  const char *kind() const noexcept override { return "contract"; }
};

class ConfigError : public Error
{
public:
  using Error::Error;
  const char *kind() const noexcept override { return "config"; }
};

class NumericError : public Error
{
public:
  using Error::Error;
  const char *kind() const noexcept override { return "numeric"; }
};

class StiffnessError : public NumericError
{
public:
  using NumericError::NumericError;
  const char *kind() const noexcept override { return "stiffness"; }
};

class ConvergenceError : public NumericError
{
public:
  ConvergenceError(const std::string &what, double last_residual)
    : NumericError(what), last_residual_(last_residual)
  {
  }
  const char *kind() const noexcept override { return "convergence"; }
  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

}  // namespace slowdiff
