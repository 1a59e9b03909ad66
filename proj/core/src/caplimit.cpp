// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/caplimit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "cscap/errors.hpp"
#include "cscap/parallel.hpp"

namespace cscap
{

namespace
{

struct Active
{
  std::size_t track;
  cplx z;
};

Spectrum decompose(const PotentialSpec &potential, const Deformation &def, const Grid1D &grid,
                   double eps, const SectorWindow &window, const SweepOptions &o)
{
  AssembleOptions ao;
  ao.order = o.order;
  const auto A = assemble(OperatorTag::HepsTheta, grid, def, potential, eps, std::nullopt, ao);
  return filter_sector(eig_dense(A, o.eig), window, def.a());
}

std::string describe(double eps, const std::string &what)
{
  std::ostringstream os;
  os << "eps = " << eps << ": " << what;
  return os.str();
}

}  // namespace

EpsSchedule EpsSchedule::geometric(double start, double stop, double ratio, double eps0_guard)
{
  if (!(start > 0.0) || !(stop > 0.0) || !(ratio > 0.0 && ratio < 1.0) || stop > start)
  {
    throw ConstraintViolation("geometric schedule needs 0 < stop <= start and 0 < ratio < 1");
  }
  EpsSchedule s;
  s.eps0_guard = eps0_guard;
  const int count =
    static_cast<int>(std::ceil(std::log(start / stop) / std::log(1.0 / ratio) - 1e-9)) + 1;
  for (int k = 0; k < count; ++k)
  {
    s.values.push_back(start * std::pow(ratio, k));
  }
  return s;
}

void EpsSchedule::validate() const
{
  if (values.empty())
  {
    throw ConstraintViolation("eps schedule is empty");
  }
  for (std::size_t k = 0; k < values.size(); ++k)
  {
    if (!(values[k] > 0.0) || !(values[k] < eps0_guard))
    {
      std::ostringstream os;
      os << "eps = " << values[k] << " is outside (0, eps0_guard = " << eps0_guard << ")";
      throw ConstraintViolation(os.str());
    }
    if (k > 0 && !(values[k] < values[k - 1]))
    {
      throw ConstraintViolation("eps schedule must be strictly decreasing");
    }
  }
}

Extrapolation extrapolate(const ResonanceTrack &track)
{
  const std::size_t n = track.points.size();
  if (n < 3)
  {
    throw FitDegenerate("extrapolation needs at least 3 points");
  }
  const std::size_t w = std::max<std::size_t>(3, (n + 1) / 2);
  const std::size_t first = n - w;
  Eigen::MatrixXd A(w, 3);
  Eigen::VectorXd br(w), bi(w);
  for (std::size_t i = 0; i < w; ++i)
  {
    const auto &p = track.points[first + i];
    A(i, 0) = 1.0;
    A(i, 1) = std::sqrt(p.eps);
    A(i, 2) = p.eps;
    br[i] = p.z.real();
    bi[i] = p.z.imag();
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < 3)
  {
    throw FitDegenerate("extrapolation design matrix is rank deficient");
  }
  const Eigen::VectorXd xr = qr.solve(br), xi = qr.solve(bi);
  Extrapolation e;
  e.z0 = {xr[0], xi[0]};
  e.c1 = {xr[1], xi[1]};
  e.c2 = {xr[2], xi[2]};
  e.window = w;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = first; i < n; ++i)
  {
    const double d = std::abs(track.points[i].z - e.z0);
    if (d > 0.0)
    {
      const double x = std::log(track.points[i].eps), y = std::log(d);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
  }
  const double den = m * sxx - sx * sx;
  e.fit_exponent = m >= 2 && den != 0.0 ? (m * sxy - sx * sy) / den
                                        : std::numeric_limits<double>::quiet_NaN();
  return e;
}

std::vector<ResonanceTrack> link_tracks(const std::vector<double> &eps,
                                        const std::vector<Spectrum> &filtered, double jump_guard,
                                        std::vector<std::string> *events)
{
  std::vector<ResonanceTrack> tracks;
  std::vector<Active> active;
  auto start = [&](double e, cplx z, double r) {
    ResonanceTrack t;
    t.track_id = static_cast<int>(tracks.size());
    t.points.push_back({e, z, r});
    tracks.push_back(t);
    active.push_back({tracks.size() - 1, z});
  };
  auto residual = [](const Spectrum &s, std::size_t j) {
    return s.residuals.empty() ? 0.0 : s.residuals[j];
  };

  for (std::size_t k = 0; k < eps.size(); ++k)
  {
    const Spectrum &s = filtered[k];
    if (k == 0)
    {
      for (std::size_t j = 0; j < s.size(); ++j)
      {
        start(eps[k], s.eigenvalues[j], residual(s, j));
      }
      continue;
    }
    // Each active track claims its nearest eigenvalue; contested claims go to the closest.
    std::map<std::size_t, std::vector<std::pair<double, std::size_t>>> claims;
    std::vector<Active> next;
    for (std::size_t a = 0; a < active.size(); ++a)
    {
      const cplx z = active[a].z;
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < s.size(); ++j)
      {
        const double d = std::abs(s.eigenvalues[j] - z);
        if (d < best)
        {
          best = d;
          arg = j;
        }
      }
      auto &t = tracks[active[a].track];
      if (s.size() == 0 || best >= jump_guard * (std::abs(z) + 1.0))
      {
        t.broken = true;
        t.break_reason = describe(eps[k], "no eigenvalue within the jump guard");
        if (events)
        {
          events->push_back("TrackBreak track " + std::to_string(t.track_id) + " at " +
                            t.break_reason);
        }
        continue;
      }
      claims[arg].push_back({best, a});
    }
    std::vector<bool> taken(s.size(), false);
    for (auto &[j, list] : claims)
    {
      std::sort(list.begin(), list.end());
      taken[j] = true;
      for (std::size_t c = 0; c < list.size(); ++c)
      {
        auto &t = tracks[active[list[c].second].track];
        if (c == 0)
        {
          t.points.push_back({eps[k], s.eigenvalues[j], residual(s, j)});
          next.push_back({active[list[c].second].track, s.eigenvalues[j]});
        }
        else
        {
          t.broken = true;
          t.break_reason = describe(eps[k], "collision with track " +
                                              std::to_string(
                                                tracks[active[list[0].second].track].track_id));
          if (events)
          {
            events->push_back("TrackBreak track " + std::to_string(t.track_id) + " at " +
                              t.break_reason);
          }
        }
      }
    }
    std::sort(next.begin(), next.end(),
              [](const Active &x, const Active &y) { return x.track < y.track; });
    active = std::move(next);
    for (std::size_t j = 0; j < s.size(); ++j)
    {
      if (!taken[j])
      {
        start(eps[k], s.eigenvalues[j], residual(s, j));
      }
    }
  }

  const double last = eps.empty() ? 0.0 : eps.back();
  for (auto &t : tracks)
  {
    t.persistent = !t.points.empty() && t.points.back().eps == last;
    if (t.points.size() >= 3)
    {
      try
      {
        const Extrapolation e = extrapolate(t);
        t.extrapolated = e.z0;
        t.fit_exponent = e.fit_exponent;
        t.extrapolation_valid = true;
        continue;
      }
      catch (const FitDegenerate &)
      {
      }
    }
    t.extrapolated = t.points.back().z;
    t.fit_exponent = std::numeric_limits<double>::quiet_NaN();
    t.extrapolation_valid = false;
  }
  return tracks;
}

SweepResult run_sweep(const PotentialSpec &potential, const Deformation &def, const Grid1D &grid,
                      const EpsSchedule &schedule, const SectorWindow &window,
                      const SweepOptions &options)
{
  schedule.validate();
  window.validate(def.a());
  if (def.profile().mode == DeformationMode::exterior)
  {
    check_grid(grid, def.profile().R, schedule.min());
  }

  SweepResult res;
  res.eps = schedule.values;
  res.filtered = parallel_map(res.eps.size(), options.jobs, [&](std::size_t k) {
    return decompose(potential, def, grid, res.eps[k], window, options);
  });

  if (options.bisect_on_collision)
  {
    // A collision in a step triggers one bisection of that step.
    std::vector<std::string> probe;
    link_tracks(res.eps, res.filtered, options.jump_guard, &probe);
    std::vector<double> bisect_at;
    for (const auto &ev : probe)
    {
      if (ev.find("collision") == std::string::npos)
      {
        continue;
      }
      const auto pos = ev.find("eps = ");
      const double e = std::stod(ev.substr(pos + 6));
      if (std::find(bisect_at.begin(), bisect_at.end(), e) == bisect_at.end())
      {
        bisect_at.push_back(e);
      }
    }
    for (double e : bisect_at)
    {
      auto it = std::find_if(res.eps.begin(), res.eps.end(),
                             [&](double v) { return std::abs(v - e) <= 1e-12 * e; });
      if (it == res.eps.end() || it == res.eps.begin())
      {
        continue;
      }
      const std::size_t k = static_cast<std::size_t>(it - res.eps.begin());
      const double mid = std::sqrt(res.eps[k - 1] * res.eps[k]);
      res.events.push_back(describe(mid, "bisection inserted after a collision"));
      res.filtered.insert(res.filtered.begin() + static_cast<std::ptrdiff_t>(k),
                          decompose(potential, def, grid, mid, window, options));
      res.eps.insert(res.eps.begin() + static_cast<std::ptrdiff_t>(k), mid);
    }
  }
  res.tracks = link_tracks(res.eps, res.filtered, options.jump_guard, &res.events);
  return res;
}

bool monotone_tail(const ResonanceTrack &track, cplx reference, std::size_t count)
{
  const std::size_t n = track.points.size();
  if (n < count || count < 2)
  {
    return false;
  }
  for (std::size_t i = n - count + 1; i < n; ++i)
  {
    if (std::abs(track.points[i].z - reference) > std::abs(track.points[i - 1].z - reference))
    {
      return false;
    }
  }
  return true;
}

namespace
{

void finish_counts(CountReport &r, double eps0_guard)
{
  std::ptrdiff_t last_bad = -1;
  for (std::size_t k = 0; k < r.counts.size(); ++k)
  {
    if (r.counts[k] != r.m)
    {
      last_bad = static_cast<std::ptrdiff_t>(k);
    }
  }
  if (last_bad < 0)
  {
    r.eps_prime = eps0_guard;
    r.exists = true;
  }
  else if (static_cast<std::size_t>(last_bad) + 1 == r.counts.size())
  {
    r.eps_prime = 0.0;
    r.exists = false;
  }
  else
  {
    r.eps_prime = r.eps[static_cast<std::size_t>(last_bad)];
    r.exists = true;
  }
}

}  // namespace

CountReport verify_counting(const std::function<Spectrum(double)> &family, cplx z, double delta,
                            const EpsSchedule &schedule, int m, int jobs)
{
  schedule.validate();
  CountReport r;
  r.center = z;
  r.delta = delta;
  r.m = m;
  r.eps = schedule.values;
  r.counts = parallel_map(r.eps.size(), jobs, [&](std::size_t k) {
    return count_in_disk(family(r.eps[k]), z, delta);
  });
  finish_counts(r, schedule.eps0_guard);
  return r;
}

CountReport verify_counting(const SweepResult &sweep, cplx z, double delta,
                            const EpsSchedule &schedule, int m)
{
  CountReport r;
  r.center = z;
  r.delta = delta;
  r.m = m;
  for (std::size_t k = 0; k < sweep.eps.size(); ++k)
  {
    const bool scheduled =
      std::any_of(schedule.values.begin(), schedule.values.end(),
                  [&](double v) { return std::abs(v - sweep.eps[k]) <= 1e-12 * v; });
    if (scheduled)
    {
      r.eps.push_back(sweep.eps[k]);
      r.counts.push_back(count_in_disk(sweep.filtered[k], z, delta));
    }
  }
  finish_counts(r, schedule.eps0_guard);
  return r;
}

}  // namespace cscap
