// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_APP_IO_HPP
#define CSCAP_APP_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "cscap/caplimit.hpp"
#include "cscap/eigensolver.hpp"
#include "cscap/oracle.hpp"

namespace cscap::app
{

using json = nlohmann::ordered_json;

inline constexpr const char *kUnits = "dimensionless; hbar = 2m = 1; z is energy, k momentum";

json complex_json(cplx z);
cplx complex_from_json(const json &j);
json potential_json(const PotentialSpec &p);

json spectrum_json(const Spectrum &s, const RunConfig &cfg);
Spectrum spectrum_from_json(const json &j);

json sweep_json(const SweepResult &r, const RunConfig &cfg);
std::string tracks_csv(const SweepResult &r);

// A track as re-read from sweep JSON; enough for comparisons.
struct TrackSummary
{
  int track_id = 0;
  cplx value = 0.0;
  bool extrapolation_valid = false;
  bool persistent = false;
};
std::vector<TrackSummary> tracks_from_sweep_json(const json &j);

json oracle_json(const OracleResult &r, const PotentialSpec &p, const KRegion *region);

// Fixed-precision scatter of z with the essential ray at -2a, the sector
// window outline and optional reference marks.
std::string svg_scatter(const std::vector<cplx> &z, double a, const SectorWindow *window,
                        const std::vector<cplx> &marks, const std::string &title);

json read_json_file(const std::string &path);
// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace cscap::app

#endif  // CSCAP_APP_IO_HPP
