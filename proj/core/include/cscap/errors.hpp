// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_ERRORS_HPP
#define CSCAP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cscap
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Parameter outside the admissible set of a module invariant.
class ConstraintViolation : public Error
{
public:
  using Error::Error;
};

class GeometryViolation : public Error
{
public:
  GeometryViolation(std::string clause, double x, const std::string &what)
    : Error(what), clause_(std::move(clause)), x_(x)
  {
  }
  const std::string &clause() const { return clause_; }
  double x() const { return x_; }

private:
  std::string clause_;
  double x_;
};

class DomainViolation : public Error
{
public:
  using Error::Error;
};

class ConvergenceFailure : public Error
{
public:
  ConvergenceFailure(std::size_t unconverged, const std::string &what)
    : Error(what), unconverged_(unconverged)
  {
  }
  std::size_t unconverged() const { return unconverged_; }

private:
  std::size_t unconverged_;
};

class NearSingular : public Error
{
public:
  NearSingular(double rcond, const std::string &what) : Error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

private:
  double rcond_;
};

class MatchFailure : public Error
{
public:
  using Error::Error;
};

class SplitInvertibilityFailure : public Error
{
public:
  using Error::Error;
};

class FitDegenerate : public Error
{
public:
  using Error::Error;
};

class EvaluationFailure : public Error
{
public:
  using Error::Error;
};

class CountUnstable : public Error
{
public:
  using Error::Error;
};

// Malformed or inconsistent run configuration.
class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace cscap

#endif  // CSCAP_ERRORS_HPP
