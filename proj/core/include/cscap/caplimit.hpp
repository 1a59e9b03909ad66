// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_CAPLIMIT_HPP
#define CSCAP_CAPLIMIT_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cscap/eigensolver.hpp"
#include "cscap/spectra.hpp"

namespace cscap
{

struct EpsSchedule
{
  std::vector<double> values;
  double eps0_guard = 0.25;

  // start, start*ratio, ... down to the first value at or below stop.
  static EpsSchedule geometric(double start, double stop, double ratio = 0.5,
                               double eps0_guard = 0.25);
  // Throws ConstraintViolation unless strictly decreasing, positive and below eps0_guard.
  void validate() const;
  double min() const { return values.empty() ? 0.0 : values.back(); }
};

struct TrackPoint
{
  double eps;
  cplx z;
  double residual;
};

struct ResonanceTrack
{
  int track_id = 0;
  std::vector<TrackPoint> points;
  cplx extrapolated = 0.0;
  double fit_exponent = 0.0;
  bool extrapolation_valid = false;
  // Continuation failed (jump guard or unresolved collision); points are truncated.
  bool broken = false;
  std::string break_reason;
  // Reaches the smallest eps of the sweep.
  bool persistent = false;
};

struct Extrapolation
{
  cplx z0 = 0.0;
  cplx c1 = 0.0;
  cplx c2 = 0.0;
  double fit_exponent = 0.0;
  std::size_t window = 0;
};

// Least-squares fit z(eps) = z0 + c1 sqrt(eps) + c2 eps over the last
// max(3, ceil(n/2)) points; the exponent is the log-log slope of |z - z0| over
// the same window. Throws FitDegenerate for fewer than 3 points or a
// rank-deficient design.
Extrapolation extrapolate(const ResonanceTrack &track);

struct SweepOptions
{
  EigOptions eig;
  int order = 4;
  double jump_guard = 0.1;
  int jobs = 1;
  bool bisect_on_collision = true;
};

struct SweepResult
{
  std::vector<ResonanceTrack> tracks;
  // Every eps actually decomposed (schedule plus bisection points), decreasing.
  std::vector<double> eps;
  // Sector-filtered spectra, aligned with eps.
  std::vector<Spectrum> filtered;
  // Track breaks and bisections, in order of occurrence.
  std::vector<std::string> events;
};

// For each eps: assemble H_eps(theta), decompose, filter to the window, then
// link across eps by nearest-neighbour continuation with jump-guard rejection.
SweepResult run_sweep(const PotentialSpec &potential, const Deformation &def, const Grid1D &grid,
                      const EpsSchedule &schedule, const SectorWindow &window,
                      const SweepOptions &options = {});

// Links precomputed filtered spectra (eps decreasing). Collisions resolve by
// distance; the losing track is broken. Used by run_sweep and by tests.
std::vector<ResonanceTrack> link_tracks(const std::vector<double> &eps,
                                        const std::vector<Spectrum> &filtered, double jump_guard,
                                        std::vector<std::string> *events = nullptr);

// |z(eps_k) - reference| non-increasing over the last `count` points.
bool monotone_tail(const ResonanceTrack &track, cplx reference, std::size_t count = 3);

struct CountReport
{
  cplx center = 0.0;
  double delta = 0.0;
  int m = 0;
  std::vector<double> eps;
  std::vector<int> counts;
  // Counts equal m for every schedule eps below eps_prime; eps0_guard when
  // all agree, 0 when the smallest eps already disagrees.
  double eps_prime = 0.0;
  bool exists = false;
};

CountReport verify_counting(const std::function<Spectrum(double)> &family, cplx z, double delta,
                            const EpsSchedule &schedule, int m, int jobs = 1);
// Reuses the filtered spectra of a sweep.
CountReport verify_counting(const SweepResult &sweep, cplx z, double delta,
                            const EpsSchedule &schedule, int m);

}  // namespace cscap

#endif  // CSCAP_CAPLIMIT_HPP
