// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "cscap/errors.hpp"
#include "io.hpp"

namespace cscap::app
{

namespace
{

// Files are assembled in memory and written once the computation succeeded,
// in insertion order.
class Outputs
{
public:
  void add(std::string name, std::string content)
  {
    files_.emplace_back(std::move(name), std::move(content));
  }
  void add(std::string name, const json &j) { add(std::move(name), j.dump(2) + "\n"); }
  void write(const std::string &dir, std::ostream &out) const
  {
    std::filesystem::create_directories(dir);
    for (const auto &[name, content] : files_)
    {
      const auto path = std::filesystem::path(dir) / name;
      std::ofstream f(path, std::ios::binary);
      f << content;
      if (!f)
      {
        throw Error("cannot write " + path.string());
      }
      out << "wrote " << path.string() << "\n";
    }
  }

private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string show(cplx z)
{
  std::ostringstream os;
  os << std::setprecision(10) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
     << "i";
  return os.str();
}

EigOptions eig_options(const RunConfig &c)
{
  EigOptions o;
  o.tol = c.eig_tol;
  return o;
}

std::optional<ChiCutoff> configured_chi(const RunConfig &c, const Grid1D &g)
{
  if (!c.chi_T)
  {
    return std::nullopt;
  }
  return build_chi(g.nodes, g.L, *c.chi_T, c.chi_width);
}

Spectrum compute_spectrum(const RunConfig &c, double eps, int jobs)
{
  (void)jobs;
  const Deformation def = c.deformation();
  const Grid1D g = c.grid();
  std::optional<ChiCutoff> chi;
  if (c.tag == OperatorTag::HepsThetaMinusChiV)
  {
    chi = configured_chi(c, g);
    if (!chi)
    {
      throw ConfigError("operator tag HepsThetaMinusChiV needs an explicit [chi] T");
    }
  }
  AssembleOptions ao;
  ao.order = c.order;
  const auto A = assemble(c.tag, g, def, c.potential, eps, chi, ao);
  Spectrum s = eig_dense(A, eig_options(c));
  sort_spectrum(s);
  return s;
}

int cmd_validate(const RunConfig &c, const CommandOptions &o, std::ostream &out, Outputs &files)
{
  const Deformation def = c.deformation();
  const auto &cut = def.cutoff();
  const double sup = cut.sup_constraint(100000);
  const double margin = 1.5 - sup;
  const Grid1D g = c.grid();
  const auto xs = geometry_samples(std::max(g.L, 16.0 * c.profile.R), 20001);
  const GeometryReport rep = validate_geometry(def, xs, false);

  out << "theta " << show(c.profile.theta) << ", a(theta) = " << def.a() << ", mode "
      << to_string(c.profile.mode) << "\n";
  out << "cutoff sup(h + t h') = " << std::setprecision(6) << sup << " (margin " << margin
      << ") " << (margin >= 0.0 ? "PASS" : "FAIL") << "\n";
  json clauses = json::array();
  for (const auto &cl : rep.clauses)
  {
    out << "clause " << cl.name << ": "
        << (!cl.applicable ? "n/a" : (cl.passed ? "PASS" : "FAIL")) << " (margin " << cl.margin
        << " at x = " << cl.worst_x << ", " << cl.checked << " samples)\n";
    clauses.push_back({{"name", cl.name},
                       {"applicable", cl.applicable},
                       {"passed", cl.passed},
                       {"margin", cl.margin},
                       {"worst_x", cl.worst_x},
                       {"checked", cl.checked}});
  }
  out << "min |phi'| = " << rep.min_abs_jacobian << " (bound " << rep.jacobian_bound << ")\n";
  const bool ok = rep.passed() && margin >= 0.0;
  json j{{"theta", complex_json(c.profile.theta)},
         {"beta0", c.profile.beta0},
         {"R", c.profile.R},
         {"mode", to_string(c.profile.mode)},
         {"a", def.a()},
         {"cutoff", {{"sup", sup}, {"margin", margin}, {"samples", 100000}}},
         {"clauses", clauses},
         {"min_abs_jacobian", rep.min_abs_jacobian},
         {"jacobian_bound", rep.jacobian_bound},
         {"passed", ok}};
  files.add("validate.json", j);
  (void)o;
  return ok ? kPass : kToleranceFailure;
}

int cmd_spectrum(const RunConfig &c, const CommandOptions &o, std::ostream &out, Outputs &files)
{
  const Spectrum s = compute_spectrum(c, c.eps, o.jobs);
  const SectorWindow w = c.effective_window();
  const double a = a_of_theta(c.profile.theta);
  const Spectrum inside = filter_sector(s, w, a);
  out << s.size() << " eigenvalues (" << s.meta.tag << ", eps = " << c.eps << ", N = " << s.meta.N
      << ", L = " << s.meta.L << "), " << inside.size() << " in the window\n";
  for (std::size_t j = 0; j < std::min<std::size_t>(inside.size(), 10); ++j)
  {
    out << "  " << show(inside.eigenvalues[j]) << "\n";
  }
  files.add("spectrum.json", spectrum_json(s, c));
  if (o.svg || c.svg)
  {
    files.add("spectrum.svg", svg_scatter(s.eigenvalues, a, c.window ? &*c.window : nullptr, {},
                                          "spectrum " + s.meta.tag));
  }
  return kPass;
}

SweepResult compute_sweep(const RunConfig &c, int jobs)
{
  if (!c.schedule)
  {
    throw ConfigError("sweep needs a [schedule]");
  }
  SweepOptions so;
  so.eig = eig_options(c);
  so.order = c.order;
  so.jump_guard = c.jump_guard;
  so.jobs = jobs;
  return run_sweep(c.potential, c.deformation(), c.grid(), *c.schedule, c.effective_window(), so);
}

int cmd_sweep(const RunConfig &c, const CommandOptions &o, std::ostream &out, Outputs &files)
{
  const SweepResult r = compute_sweep(c, o.jobs);
  out << r.eps.size() << " eps values, " << r.tracks.size() << " tracks\n";
  std::vector<cplx> all, ext;
  for (const auto &t : r.tracks)
  {
    out << "  track " << t.track_id << ": " << t.points.size() << " points, last "
        << show(t.points.back().z);
    if (t.extrapolation_valid)
    {
      out << ", limit " << show(t.extrapolated) << ", exponent " << t.fit_exponent;
      ext.push_back(t.extrapolated);
    }
    out << (t.broken ? " [broken]" : "") << "\n";
  }
  for (const auto &e : r.events)
  {
    out << "  event: " << e << "\n";
  }
  for (const auto &s : r.filtered)
  {
    all.insert(all.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  }
  files.add("tracks.csv", tracks_csv(r));
  files.add("sweep.json", sweep_json(r, c));
  if (o.svg || c.svg)
  {
    const SectorWindow w = c.effective_window();
    files.add("sweep.svg",
              svg_scatter(all, a_of_theta(c.profile.theta), &w, ext, "sweep tracks"));
  }
  return kPass;
}

int cmd_multiplicity(const RunConfig &c, const CommandOptions &o, std::ostream &out,
                     Outputs &files)
{
  if (c.contours.empty())
  {
    throw ConfigError("multiplicity needs at least one entry in [contours]");
  }
  const Deformation def = c.deformation();
  const Grid1D g = c.grid();
  AssembleOptions ao;
  ao.order = c.order;
  const auto A = assemble(OperatorTag::HepsTheta, g, def, c.potential, c.eps, std::nullopt, ao);

  std::optional<Spectrum> spec;
  if (c.brute_force)
  {
    spec = eig_dense(A, eig_options(c));
  }

  double T = 0.0;
  std::string chi_source = "config";
  if (c.chi_T)
  {
    T = *c.chi_T;
  }
  else
  {
    chi_source = "neumann";
    AssembleOptions free_opts = ao;
    free_opts.omit_potential = true;
    const auto F = assemble(OperatorTag::HepsTheta, g, def, c.potential, c.eps, std::nullopt,
                            free_opts);
    const auto v = potential_on_contour(g, def, c.potential);
    for (const auto &nc : c.contours)
    {
      const ChiChoice ch =
        choose_chi_radius(F, v, nc.spec, c.chi_T0, c.chi_width, c.chi_T_max, 1.0, o.jobs);
      T = std::max(T, ch.T);
    }
  }
  const ChiCutoff chi = build_chi(g.nodes, g.L, T, c.chi_width);
  const auto S = assemble(OperatorTag::HepsThetaMinusChiV, g, def, c.potential, c.eps, chi, ao);
  const auto chiV = chi_potential_diagonal(g, def, c.potential, chi);

  bool all_ok = true;
  json records = json::array();
  const double a = def.a();
  for (const auto &nc : c.contours)
  {
    nc.spec.validate(a, c.effective_window().essential_margin, spec ? &*spec : nullptr);
    const MultiplicityReport m = multiplicity_report(A, S, chiV, nc.spec, o.jobs);
    json rec{{"name", nc.name},
             {"center", complex_json(m.center)},
             {"radius", m.radius},
             {"nodes", nc.spec.nodes},
             {"eps", c.eps},
             {"m_direct", complex_json(m.m_direct)},
             {"m_logderiv", complex_json(m.m_logderiv)},
             {"rounded", m.rounded},
             {"agreement_gap", m.agreement_gap},
             {"doubling_gap", m.doubling_gap},
             {"chi_T", T},
             {"chi_width", c.chi_width},
             {"chi_source", chi_source}};
    bool ok = m.accepted;
    out << nc.name << ": m_direct = " << show(m.m_direct) << ", m_logderiv = "
        << show(m.m_logderiv) << ", rounded " << m.rounded << ", gap " << m.agreement_gap;
    if (spec)
    {
      const int count = count_in_disk(*spec, nc.spec.center, nc.spec.radius);
      rec["brute_force_count"] = count;
      ok = ok && count == m.rounded;
      out << ", eigenvalues inside " << count;
    }
    rec["passed"] = ok;
    out << (ok ? "  PASS" : "  FAIL") << "\n";
    all_ok = all_ok && ok;
    records.push_back(rec);
  }
  files.add("multiplicity.json", json{{"theta", complex_json(c.profile.theta)},
                                       {"N", g.N},
                                       {"L", g.L},
                                       {"potential", potential_json(c.potential)},
                                       {"units", kUnits},
                                       {"contours", records}});
  return all_ok ? kPass : kToleranceFailure;
}

OracleResult compute_oracle(const RunConfig &c)
{
  if (std::holds_alternative<Free>(c.potential.kind()))
  {
    if (!(c.eps > 0.0))
    {
      throw ConfigError("the free-line oracle needs [operator] eps > 0");
    }
    OracleResult r;
    r.values = davies_spectrum(c.eps, c.davies_count);
    r.method = OracleMethod::closed_form;
    return r;
  }
  if (!c.region)
  {
    throw ConfigError("the resonance oracle needs [oracle] region");
  }
  if (c.cache_path.empty())
  {
    return find_resonances(c.potential, *c.region);
  }
  OracleCache cache(c.cache_path);
  OracleResult r = find_resonances_cached(c.potential, *c.region, &cache);
  cache.save();
  return r;
}

int cmd_oracle(const RunConfig &c, const CommandOptions &, std::ostream &out, Outputs &files)
{
  const OracleResult r = compute_oracle(c);
  out << r.values.size() << " values (" << to_string(r.method) << ", " << r.certified_digits
      << " digits)\n";
  for (cplx z : r.values)
  {
    out << "  " << show(z) << "\n";
  }
  files.add("oracle.json", oracle_json(r, c.potential, c.region ? &*c.region : nullptr));
  return kPass;
}

struct CompareRow
{
  cplx oracle;
  cplx main;
  double rel_error;
  bool passed;
};

std::vector<CompareRow> compare_rows(const std::vector<cplx> &oracle,
                                     const std::vector<cplx> &main, double tol)
{
  std::vector<CompareRow> rows;
  for (cplx zo : oracle)
  {
    CompareRow row{zo, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::infinity(), false};
    for (cplx zm : main)
    {
      const double e = std::abs(zm - zo) / std::abs(zo);
      if (e < row.rel_error)
      {
        row.rel_error = e;
        row.main = zm;
      }
    }
    row.passed = row.rel_error < tol;
    rows.push_back(row);
  }
  return rows;
}

int cmd_compare(const RunConfig &c, const CommandOptions &o, std::ostream &out, Outputs &files)
{
  const OracleResult oracle = compute_oracle(c);
  const bool free_line = std::holds_alternative<Free>(c.potential.kind());
  const double a = a_of_theta(c.profile.theta);
  const SectorWindow w = c.effective_window();

  std::vector<cplx> main;
  std::string source;
  if (!o.sweep_in.empty())
  {
    source = "sweep:" + o.sweep_in;
    for (const auto &t : tracks_from_sweep_json(read_json_file(o.sweep_in)))
    {
      if (t.persistent)
      {
        main.push_back(t.value);
      }
    }
  }
  else if (!o.spectrum_in.empty())
  {
    source = "spectrum:" + o.spectrum_in;
    main = spectrum_from_json(read_json_file(o.spectrum_in)).eigenvalues;
  }
  else if (!free_line && c.schedule && c.schedule->values.size() >= 2)
  {
    source = "sweep";
    const SweepResult r = compute_sweep(c, o.jobs);
    for (const auto &t : r.tracks)
    {
      if (t.persistent)
      {
        main.push_back(t.extrapolated);
      }
    }
  }
  else
  {
    source = "spectrum";
    main = compute_spectrum(c, c.eps, o.jobs).eigenvalues;
  }

  // CAP eigenvalues of the free line are theta-independent, so the window
  // only restricts resonance comparisons.
  std::vector<cplx> targets;
  for (cplx z : oracle.values)
  {
    if (free_line || w.contains(z, a))
    {
      targets.push_back(z);
    }
  }
  std::vector<cplx> candidates;
  for (cplx z : main)
  {
    if (free_line || w.contains(z, a))
    {
      candidates.push_back(z);
    }
  }
  const auto rows = compare_rows(targets, candidates, c.tol_rel);

  bool ok = !rows.empty();
  json jrows = json::array();
  std::ostringstream csv;
  csv << "oracle_re,oracle_im,main_re,main_im,rel_error,passed\n";
  out << "source " << source << ", tolerance " << c.tol_rel << "\n";
  out << std::left << std::setw(34) << "oracle" << std::setw(34) << "main" << std::setw(14)
      << "rel error" << "verdict\n";
  for (const auto &r : rows)
  {
    ok = ok && r.passed;
    out << std::setw(34) << show(r.oracle) << std::setw(34) << show(r.main) << std::setw(14)
        << std::setprecision(4) << r.rel_error << (r.passed ? "PASS" : "FAIL") << "\n";
    jrows.push_back({{"oracle", complex_json(r.oracle)},
                     {"main", complex_json(r.main)},
                     {"rel_error", std::isfinite(r.rel_error) ? json(r.rel_error) : json(nullptr)},
                     {"passed", r.passed}});
    csv << format_double(r.oracle.real()) << ',' << format_double(r.oracle.imag()) << ','
        << format_double(r.main.real()) << ',' << format_double(r.main.imag()) << ','
        << format_double(r.rel_error) << ',' << (r.passed ? "true" : "false") << "\n";
  }
  if (rows.empty())
  {
    out << "no oracle value inside the window; nothing verified\n";
  }
  files.add("compare.json", json{{"potential", potential_json(c.potential)},
                                  {"theta", complex_json(c.profile.theta)},
                                  {"oracle_method", to_string(oracle.method)},
                                  {"tolerance", c.tol_rel},
                                  {"units", kUnits},
                                  {"rows", jrows},
                                  {"passed", ok}});
  files.add("compare.csv", csv.str());
  if (o.svg || c.svg)
  {
    files.add("compare.svg", svg_scatter(candidates, a, free_line ? nullptr : &w, targets,
                                         "main path vs oracle"));
  }
  return ok ? kPass : kToleranceFailure;
}

}  // namespace

int run_command(const std::string &name, const CommandOptions &opts, std::ostream &out,
                std::ostream &err)
{
  using Fn = int (*)(const RunConfig &, const CommandOptions &, std::ostream &, Outputs &);
  static const std::map<std::string, Fn> commands = {
    {"validate", cmd_validate}, {"spectrum", cmd_spectrum}, {"sweep", cmd_sweep},
    {"multiplicity", cmd_multiplicity}, {"compare", cmd_compare}, {"oracle", cmd_oracle}};
  const auto it = commands.find(name);
  if (it == commands.end())
  {
    err << "unknown command '" << name << "'\n";
    return kConfigError;
  }
  try
  {
    const RunConfig cfg = load_config(opts.config);
    if (opts.jobs < 1)
    {
      throw ConfigError("--jobs must be at least 1");
    }
    Outputs files;
    const int code = it->second(cfg, opts, out, files);
    files.write(opts.out_dir, out);
    return code;
  }
  catch (const ConfigError &e)
  {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  catch (const ConstraintViolation &e)
  {
    err << "constraint violation: " << e.what() << "\n";
    return kConfigError;
  }
  catch (const DomainViolation &e)
  {
    err << "domain violation: " << e.what() << "\n";
    return kConfigError;
  }
  catch (const GeometryViolation &e)
  {
    err << "geometry violation: " << e.what() << "\n";
    return kToleranceFailure;
  }
  catch (const MatchFailure &e)
  {
    err << "match failure: " << e.what() << "\n";
    return kToleranceFailure;
  }
  catch (const Error &e)
  {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  catch (const std::exception &e)
  {
    err << "failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace cscap::app
