// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cscap/errors.hpp"

namespace cscap::app
{

namespace
{

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fixed(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string format_double(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json &j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

json potential_json(const PotentialSpec &p)
{
  json params = json::object();
  for (const auto &[k, v] : p.parameters())
  {
    params[k] = v;
  }
  return json{{"kind", p.name()}, {"parameters", params}};
}

json spectrum_json(const Spectrum &s, const RunConfig &cfg)
{
  json eig = json::array();
  for (std::size_t j = 0; j < s.size(); ++j)
  {
    eig.push_back({{"re", s.eigenvalues[j].real()},
                   {"im", s.eigenvalues[j].imag()},
                   {"residual", s.residuals.empty() ? json(nullptr) : json(s.residuals[j])}});
  }
  return json{{"tag", s.meta.tag},
              {"theta", complex_json(s.meta.theta)},
              {"eps", s.meta.eps},
              {"N", s.meta.N},
              {"L", s.meta.L},
              {"order", cfg.order},
              {"mode", to_string(cfg.profile.mode)},
              {"potential", potential_json(cfg.potential)},
              {"units", kUnits},
              {"eigenvalues", eig}};
}

Spectrum spectrum_from_json(const json &j)
{
  try
  {
    Spectrum s;
    s.meta.tag = j.at("tag").get<std::string>();
    s.meta.theta = complex_from_json(j.at("theta"));
    s.meta.eps = j.at("eps").get<double>();
    s.meta.N = j.at("N").get<int>();
    s.meta.L = j.at("L").get<double>();
    bool all_residuals = true;
    for (const auto &e : j.at("eigenvalues"))
    {
      s.eigenvalues.emplace_back(e.at("re").get<double>(), e.at("im").get<double>());
      if (e.contains("residual") && e.at("residual").is_number())
      {
        s.residuals.push_back(e.at("residual").get<double>());
      }
      else
      {
        all_residuals = false;
      }
    }
    if (!all_residuals)
    {
      s.residuals.clear();
    }
    return s;
  }
  catch (const json::exception &e)
  {
    throw ConfigError(std::string("malformed spectrum JSON: ") + e.what());
  }
}

json sweep_json(const SweepResult &r, const RunConfig &cfg)
{
  json tracks = json::array();
  for (const auto &t : r.tracks)
  {
    json pts = json::array();
    for (const auto &p : t.points)
    {
      pts.push_back({{"eps", p.eps}, {"re", p.z.real()}, {"im", p.z.imag()},
                     {"residual", p.residual}});
    }
    tracks.push_back({{"track_id", t.track_id},
                      {"extrapolated", complex_json(t.extrapolated)},
                      {"extrapolation_valid", t.extrapolation_valid},
                      {"fit_exponent", number_or_null(t.fit_exponent)},
                      {"persistent", t.persistent},
                      {"broken", t.broken},
                      {"break_reason", t.break_reason},
                      {"points", pts}});
  }
  const Grid1D g = cfg.grid();
  return json{{"theta", complex_json(cfg.profile.theta)},
              {"mode", to_string(cfg.profile.mode)},
              {"N", g.N},
              {"L", g.L},
              {"order", cfg.order},
              {"potential", potential_json(cfg.potential)},
              {"units", kUnits},
              {"eps", r.eps},
              {"events", r.events},
              {"tracks", tracks}};
}

std::string tracks_csv(const SweepResult &r)
{
  std::ostringstream os;
  os << "track_id,eps,re,im,residual\n";
  for (const auto &t : r.tracks)
  {
    for (const auto &p : t.points)
    {
      os << t.track_id << ',' << format_double(p.eps) << ',' << format_double(p.z.real()) << ','
         << format_double(p.z.imag()) << ',' << format_double(p.residual) << '\n';
    }
  }
  return os.str();
}

std::vector<TrackSummary> tracks_from_sweep_json(const json &j)
{
  try
  {
    std::vector<TrackSummary> out;
    for (const auto &t : j.at("tracks"))
    {
      TrackSummary s;
      s.track_id = t.at("track_id").get<int>();
      s.value = complex_from_json(t.at("extrapolated"));
      s.extrapolation_valid = t.at("extrapolation_valid").get<bool>();
      s.persistent = t.at("persistent").get<bool>();
      out.push_back(s);
    }
    return out;
  }
  catch (const json::exception &e)
  {
    throw ConfigError(std::string("malformed sweep JSON: ") + e.what());
  }
}

json oracle_json(const OracleResult &r, const PotentialSpec &p, const KRegion *region)
{
  json values = json::array();
  for (std::size_t i = 0; i < r.values.size(); ++i)
  {
    json e{{"z", complex_json(r.values[i])}};
    if (i < r.momenta.size())
    {
      e["k"] = complex_json(r.momenta[i]);
    }
    values.push_back(e);
  }
  json out{{"potential", potential_json(p)},
           {"method", to_string(r.method)},
           {"certified_digits", r.certified_digits},
           {"units", kUnits}};
  if (region != nullptr)
  {
    out["region"] = {region->re_min, region->re_max, region->im_min, region->im_max};
  }
  out["values"] = values;
  return out;
}

std::string svg_scatter(const std::vector<cplx> &z, double a, const SectorWindow *window,
                        const std::vector<cplx> &marks, const std::string &title)
{
  double extent = 0.0;
  if (window != nullptr && std::isfinite(window->r_max) && window->r_max > 0.0)
  {
    extent = 1.15 * window->r_max;
  }
  else
  {
    std::vector<double> r;
    for (cplx w : z)
    {
      r.push_back(std::abs(w));
    }
    std::sort(r.begin(), r.end());
    extent = r.empty() ? 1.0 : 1.1 * r[std::min<std::size_t>(r.size() - 1, 39)];
  }
  for (cplx m : marks)
  {
    extent = std::max(extent, 1.1 * std::abs(m));
  }
  extent = std::max(extent, 1e-6);

  const double size = 480.0, pad = 40.0;
  const double scale = (size - 2.0 * pad) / (2.0 * extent);
  auto X = [&](cplx w) { return fixed(size / 2.0 + scale * w.real()); };
  auto Y = [&](cplx w) { return fixed(size / 2.0 - scale * w.imag()); };
  auto inside = [&](cplx w) {
    return std::abs(w.real()) <= extent && std::abs(w.imag()) <= extent;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<title>" << title << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << fixed(pad) << "\" y1=\"" << Y(0.0) << "\" x2=\"" << fixed(size - pad)
     << "\" y2=\"" << Y(0.0) << "\" stroke=\"#bbb\"/>\n";
  os << "<line x1=\"" << X(0.0) << "\" y1=\"" << fixed(pad) << "\" x2=\"" << X(0.0)
     << "\" y2=\"" << fixed(size - pad) << "\" stroke=\"#bbb\"/>\n";

  // Essential ray arg z = -2a, clipped to the plot box.
  const cplx dir = std::polar(1.0, -2.0 * a);
  const double reach =
    extent / std::max(std::abs(dir.real()), std::abs(dir.imag()));
  os << "<line x1=\"" << X(0.0) << "\" y1=\"" << Y(0.0) << "\" x2=\"" << X(reach * dir)
     << "\" y2=\"" << Y(reach * dir) << "\" stroke=\"#c33\" stroke-dasharray=\"6,4\"/>\n";

  if (window != nullptr && !window->empty())
  {
    const double r0 = window->r_min, r1 = std::min(window->r_max, extent * std::sqrt(2.0));
    os << "<polyline fill=\"none\" stroke=\"#36c\" points=\"";
    const int n = 48;
    for (int i = 0; i <= n; ++i)
    {
      const cplx w = std::polar(r1, window->arg_min + (window->arg_max - window->arg_min) * i / n);
      os << X(w) << ',' << Y(w) << ' ';
    }
    for (int i = n; i >= 0; --i)
    {
      const cplx w = std::polar(r0, window->arg_min + (window->arg_max - window->arg_min) * i / n);
      os << X(w) << ',' << Y(w) << ' ';
    }
    const cplx w = std::polar(r1, window->arg_min);
    os << X(w) << ',' << Y(w) << "\"/>\n";
  }

  for (cplx w : z)
  {
    if (inside(w))
    {
      os << "<circle cx=\"" << X(w) << "\" cy=\"" << Y(w) << "\" r=\"2\" fill=\"black\"/>\n";
    }
  }
  for (cplx m : marks)
  {
    const double s = 5.0;
    const double cx = size / 2.0 + scale * m.real(), cy = size / 2.0 - scale * m.imag();
    os << "<path d=\"M" << fixed(cx - s) << ',' << fixed(cy - s) << " L" << fixed(cx + s) << ','
       << fixed(cy + s) << " M" << fixed(cx - s) << ',' << fixed(cy + s) << " L" << fixed(cx + s)
       << ',' << fixed(cy - s) << "\" stroke=\"#c33\" stroke-width=\"1.5\"/>\n";
  }
  os << "<text x=\"" << fixed(pad) << "\" y=\"" << fixed(pad / 2.0)
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << title << " (extent "
     << format_double(extent) << ")</text>\n";
  os << "</svg>\n";
  return os.str();
}

json read_json_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open '" + path + "'");
  }
  try
  {
    return json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace cscap::app
