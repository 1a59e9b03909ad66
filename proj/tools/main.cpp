// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"

int main(int argc, char **argv)
{
  CLI::App cli{"Complex scaling and CAP resonance toolkit"};
  cli.require_subcommand(0, 1);

  cscap::app::CommandOptions opts;
  bool schema = false;
  cli.add_flag("--schema", schema, "Print the accepted config keys and exit");

  const char *names[][2] = {
    {"validate", "Check the deformation profile and geometry"},
    {"spectrum", "Assemble and decompose one operator"},
    {"sweep", "Track CAP eigenvalues over an eps schedule"},
    {"multiplicity", "Contour multiplicities by both trace formulas"},
    {"compare", "Compare main-path values with the oracle"},
    {"oracle", "Independent resonance values"},
  };
  for (const auto &n : names)
  {
    CLI::App *sub = cli.add_subcommand(n[0], n[1]);
    sub->add_option("--config", opts.config, "INI run configuration")->required();
    sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", opts.jobs, "Concurrent jobs")->capture_default_str();
    sub->add_flag("--svg", opts.svg, "Also write SVG scatter plots");
    if (std::string(n[0]) == "compare")
    {
      sub->add_option("--spectrum", opts.spectrum_in, "Re-analyze an emitted spectrum JSON");
      sub->add_option("--sweep", opts.sweep_in, "Re-analyze an emitted sweep JSON");
    }
  }

  try
  {
    cli.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = cli.exit(e);
    return code == 0 ? 0 : cscap::app::kConfigError;
  }

  if (schema)
  {
    cscap::app::print_schema(std::cout);
    return 0;
  }
  const auto subs = cli.get_subcommands();
  if (subs.empty())
  {
    std::cout << cli.help();
    return cscap::app::kConfigError;
  }
  return cscap::app::run_command(subs.front()->get_name(), opts, std::cout, std::cerr);
}
