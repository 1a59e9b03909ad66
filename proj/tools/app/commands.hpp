// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_APP_COMMANDS_HPP
#define CSCAP_APP_COMMANDS_HPP

#include <iosfwd>
#include <string>

namespace cscap::app
{

enum ExitCode : int
{
  kPass = 0,
  kToleranceFailure = 1,
  kConfigError = 2,
  kNumericalFailure = 3
};

struct CommandOptions
{
  std::string config;
  std::string out_dir = ".";
  int jobs = 1;
  bool svg = false;
  // compare: analyze a previously emitted spectrum or sweep instead of recomputing.
  std::string spectrum_in;
  std::string sweep_in;
};

// Runs one of validate, spectrum, sweep, multiplicity, compare, oracle.
// Human-readable progress goes to out, diagnostics to err. Never throws.
int run_command(const std::string &name, const CommandOptions &opts, std::ostream &out,
                std::ostream &err);

}  // namespace cscap::app

#endif  // CSCAP_APP_COMMANDS_HPP
