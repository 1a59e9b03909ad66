// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_APP_CONFIG_HPP
#define CSCAP_APP_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cscap/caplimit.hpp"
#include "cscap/deformation.hpp"
#include "cscap/discretization.hpp"
#include "cscap/oracle.hpp"
#include "cscap/potentials.hpp"
#include "cscap/spectra.hpp"

namespace cscap::app
{

struct NamedContour
{
  std::string name;
  ContourSpec spec;
};

// Everything a run needs, parsed from an INI file. Physical quantities are
// dimensionless with hbar = 2m = 1.
struct RunConfig
{
  std::string source;

  DeformationProfile profile;
  PotentialSpec potential;

  std::optional<double> L;  // empty: auto_half_length
  int N = 800;
  int order = 4;

  OperatorTag tag = OperatorTag::HepsTheta;
  double eps = 0.0;

  std::optional<EpsSchedule> schedule;
  double jump_guard = 0.1;

  std::optional<SectorWindow> window;
  std::vector<NamedContour> contours;

  std::optional<double> chi_T;  // empty: grow until the Neumann bound holds
  double chi_width = 2.0;
  double chi_T0 = 3.0;
  double chi_T_max = 20.0;

  std::optional<KRegion> region;
  std::string cache_path;
  int davies_count = 5;

  double tol_rel = 1e-2;
  double eig_tol = 1e-10;
  bool brute_force = true;
  bool svg = false;

  // Smallest eps this run will assemble (schedule minimum or eps).
  double eps_min() const;
  Grid1D grid() const;
  Deformation deformation() const;
  SectorWindow effective_window() const;
};

// Parses and checks every physical parameter against the module invariants.
// Throws ConfigError for malformed input and ConstraintViolation /
// DomainViolation / GeometryViolation for inadmissible values.
RunConfig load_config(const std::string &path);
RunConfig parse_config(std::istream &in, const std::string &source = "<stream>");

// Accepted sections and keys with a one-line description each.
void print_schema(std::ostream &os);

}  // namespace cscap::app

#endif  // CSCAP_APP_CONFIG_HPP
