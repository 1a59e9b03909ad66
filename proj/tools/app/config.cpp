// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cscap/errors.hpp"

namespace cscap::app
{

namespace
{

struct KeySpec
{
  const char *section;
  const char *key;  // "*" accepts any key name
  const char *doc;
};

constexpr KeySpec kSchema[] = {
  {"profile", "R", "inner radius R > 0 of the deformation (default 1.5)"},
  {"profile", "beta0", "sector half-angle in radians, 0 < beta0 <= pi/8"},
  {"profile", "theta_re", "real part of theta"},
  {"profile", "theta_im", "imaginary part of theta (default 0.4)"},
  {"profile", "mode", "exterior | global-dilation"},
  {"profile", "shape.u0", "cutoff bump start in the normalized variable"},
  {"profile", "shape.u1", "cutoff bump end in the normalized variable"},
  {"profile", "shape.rise", "cutoff bump rise exponent"},
  {"profile", "shape.fall", "cutoff bump fall exponent"},
  {"profile", "shape.skew", "cutoff bump skew"},
  {"potential", "kind", "free | square_well | gaussian | poschl_teller"},
  {"potential", "V0", "strength"},
  {"potential", "a", "square-well half width"},
  {"potential", "sigma", "gaussian width"},
  {"grid", "L", "half length of the box, or auto"},
  {"grid", "N", "interior nodes"},
  {"grid", "order", "finite-difference order: 2, 4 or 6"},
  {"operator", "tag", "H | Htheta | Heps | HepsTheta | HepsThetaMinusChiV"},
  {"operator", "eps", "CAP strength for spectrum, multiplicity and compare"},
  {"schedule", "start", "first eps of a geometric schedule"},
  {"schedule", "stop", "last eps is the first value at or below stop"},
  {"schedule", "ratio", "geometric ratio (default 0.5)"},
  {"schedule", "values", "explicit decreasing eps list, overrides start/stop"},
  {"schedule", "guard", "eps0: every eps must lie below it (default 0.25)"},
  {"schedule", "jump_guard", "relative jump that breaks a track (default 0.1)"},
  {"window", "arg_min_deg", "lower angle of the sector window"},
  {"window", "arg_max_deg", "upper angle of the sector window"},
  {"window", "r_min", "inner radius of the sector window"},
  {"window", "r_max", "outer radius of the sector window"},
  {"window", "center_re", "window centre, real part (with half_angle_deg and rel)"},
  {"window", "center_im", "window centre, imaginary part"},
  {"window", "half_angle_deg", "angular half width around the centre"},
  {"window", "rel", "relative radial half width around the centre"},
  {"window", "margin_deg", "exclusion margin around the essential ray (default 5)"},
  {"contours", "*", "name = re im radius [nodes]"},
  {"chi", "T", "plateau radius of chi, or auto"},
  {"chi", "width", "transition width of chi (default 2)"},
  {"chi", "T0", "first radius tried by auto (default 3)"},
  {"chi", "T_max", "largest radius tried by auto (default 20)"},
  {"oracle", "region", "k-plane rectangle: re_min re_max im_min im_max"},
  {"oracle", "cache", "oracle cache file"},
  {"oracle", "count", "number of closed-form CAP eigenvalues for the free line"},
  {"tolerance", "rel", "relative tolerance of compare (default 1e-2)"},
  {"tolerance", "eig", "backward-error bound of eigenpairs (default 1e-10)"},
  {"tolerance", "brute_force", "multiplicity also counts eigenvalues (default true)"},
  {"output", "svg", "write SVG scatter plots (default false)"},
};

// Keys keep their file order so contour output follows the config.
using Section = std::vector<std::pair<std::string, std::string>>;
using Table = std::map<std::string, Section>;

const std::string *lookup(const Section &s, const std::string &k)
{
  for (const auto &[key, value] : s)
  {
    if (key == k)
    {
      return &value;
    }
  }
  return nullptr;
}

bool known(const std::string &section, const std::string &key)
{
  return std::any_of(std::begin(kSchema), std::end(kSchema), [&](const KeySpec &k) {
    return section == k.section && (std::string(k.key) == "*" || key == k.key);
  });
}

Table read_table(std::istream &in, const std::string &source)
{
  boost::property_tree::ptree tree;
  try
  {
    boost::property_tree::ini_parser::read_ini(in, tree);
  }
  catch (const boost::property_tree::ini_parser_error &e)
  {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Table t;
  for (const auto &[section, keys] : tree)
  {
    if (keys.empty())
    {
      throw ConfigError(source + ": key '" + section + "' outside of a section");
    }
    for (const auto &[key, value] : keys)
    {
      if (!known(section, key))
      {
        throw ConfigError(source + ": unknown key [" + section + "] " + key);
      }
      auto &sec = t[section];
      if (lookup(sec, key) != nullptr)
      {
        throw ConfigError(source + ": duplicate key [" + section + "] " + key);
      }
      sec.emplace_back(key, value.data());
    }
  }
  return t;
}

class Reader
{
public:
  explicit Reader(const Table &t) : t_(t) {}

  bool has(const std::string &s, const std::string &k) const
  {
    auto it = t_.find(s);
    return it != t_.end() && lookup(it->second, k) != nullptr;
  }
  std::string str(const std::string &s, const std::string &k) const
  {
    return *lookup(t_.at(s), k);
  }

  double num(const std::string &s, const std::string &k, double fallback) const
  {
    return has(s, k) ? parse_number(s, k, str(s, k)) : fallback;
  }
  int integer(const std::string &s, const std::string &k, int fallback) const
  {
    if (!has(s, k))
    {
      return fallback;
    }
    const double v = parse_number(s, k, str(s, k));
    if (v != std::floor(v) || std::abs(v) > 1e9)
    {
      throw ConfigError("[" + s + "] " + k + " must be an integer");
    }
    return static_cast<int>(v);
  }
  bool flag(const std::string &s, const std::string &k, bool fallback) const
  {
    if (!has(s, k))
    {
      return fallback;
    }
    const std::string v = str(s, k);
    if (v == "true" || v == "1" || v == "yes" || v == "on")
    {
      return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off")
    {
      return false;
    }
    throw ConfigError("[" + s + "] " + k + " must be a boolean, got '" + v + "'");
  }
  std::vector<double> list(const std::string &s, const std::string &k) const
  {
    std::istringstream is(str(s, k));
    std::vector<double> out;
    std::string tok;
    while (is >> tok)
    {
      out.push_back(parse_number(s, k, tok));
    }
    return out;
  }
  const Section *section(const std::string &s) const
  {
    auto it = t_.find(s);
    return it == t_.end() ? nullptr : &it->second;
  }

  static double parse_number(const std::string &s, const std::string &k, const std::string &v)
  {
    std::size_t used = 0;
    double x = 0.0;
    try
    {
      x = std::stod(v, &used);
    }
    catch (const std::exception &)
    {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(x))
    {
      throw ConfigError("[" + s + "] " + k + " is not a finite number: '" + v + "'");
    }
    return x;
  }

private:
  const Table &t_;
};

constexpr double kDeg = std::numbers::pi / 180.0;

PotentialSpec read_potential(const Reader &r)
{
  const std::string kind = r.has("potential", "kind") ? r.str("potential", "kind") : "free";
  if (kind == "free")
  {
    return PotentialSpec(Free{});
  }
  if (kind == "square_well")
  {
    SquareWell w;
    w.V0 = r.num("potential", "V0", w.V0);
    w.a = r.num("potential", "a", w.a);
    if (!(w.a > 0.0))
    {
      throw ConstraintViolation("square well half width must be positive");
    }
    return PotentialSpec(w);
  }
  if (kind == "gaussian")
  {
    GaussianBump g;
    g.V0 = r.num("potential", "V0", g.V0);
    g.sigma = r.num("potential", "sigma", g.sigma);
    if (!(g.sigma > 0.0))
    {
      throw ConstraintViolation("gaussian width must be positive");
    }
    return PotentialSpec(g);
  }
  if (kind == "poschl_teller")
  {
    PoschlTeller p;
    p.V0 = r.num("potential", "V0", p.V0);
    return PotentialSpec(p);
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

DeformationProfile read_profile(const Reader &r)
{
  DeformationProfile p;
  p.R = r.num("profile", "R", p.R);
  p.beta0 = r.num("profile", "beta0", p.beta0);
  p.theta = {r.num("profile", "theta_re", p.theta.real()),
             r.num("profile", "theta_im", p.theta.imag())};
  if (r.has("profile", "mode"))
  {
    p.mode = deformation_mode_from_string(r.str("profile", "mode"));
  }
  p.shape.u0 = r.num("profile", "shape.u0", p.shape.u0);
  p.shape.u1 = r.num("profile", "shape.u1", p.shape.u1);
  p.shape.rise = r.num("profile", "shape.rise", p.shape.rise);
  p.shape.fall = r.num("profile", "shape.fall", p.shape.fall);
  p.shape.skew = r.num("profile", "shape.skew", p.shape.skew);
  return p;
}

std::optional<SectorWindow> read_window(const Reader &r)
{
  const auto *s = r.section("window");
  if (s == nullptr)
  {
    return std::nullopt;
  }
  SectorWindow w;
  if (r.has("window", "center_re") || r.has("window", "center_im"))
  {
    const cplx c{r.num("window", "center_re", 0.0), r.num("window", "center_im", 0.0)};
    w = SectorWindow::around(c, r.num("window", "half_angle_deg", 10.0) * kDeg,
                             r.num("window", "rel", 0.3));
  }
  else
  {
    for (const char *k : {"arg_min_deg", "arg_max_deg", "r_min", "r_max"})
    {
      if (!r.has("window", k))
      {
        throw ConfigError(std::string("[window] needs ") + k +
                          " (or center_re/center_im for a window around a point)");
      }
    }
    w.arg_min = r.num("window", "arg_min_deg", 0.0) * kDeg;
    w.arg_max = r.num("window", "arg_max_deg", 0.0) * kDeg;
    w.r_min = r.num("window", "r_min", 0.0);
    w.r_max = r.num("window", "r_max", 0.0);
  }
  w.essential_margin = r.num("window", "margin_deg", 5.0) * kDeg;
  if (w.empty())
  {
    throw ConstraintViolation("sector window is empty");
  }
  return w;
}

std::vector<NamedContour> read_contours(const Reader &r)
{
  std::vector<NamedContour> out;
  const auto *s = r.section("contours");
  if (s == nullptr)
  {
    return out;
  }
  for (const auto &[name, value] : *s)
  {
    const auto v = r.list("contours", name);
    if (v.size() != 3 && v.size() != 4)
    {
      throw ConfigError("[contours] " + name + " needs: re im radius [nodes]");
    }
    NamedContour c;
    c.name = name;
    c.spec.center = {v[0], v[1]};
    c.spec.radius = v[2];
    if (v.size() == 4)
    {
      if (v[3] != std::floor(v[3]))
      {
        throw ConfigError("[contours] " + name + ": node count must be an integer");
      }
      c.spec.nodes = static_cast<int>(v[3]);
    }
    out.push_back(c);
  }
  return out;
}

std::optional<EpsSchedule> read_schedule(const Reader &r)
{
  if (r.section("schedule") == nullptr ||
      (!r.has("schedule", "values") && !r.has("schedule", "start")))
  {
    return std::nullopt;
  }
  const double guard = r.num("schedule", "guard", 0.25);
  if (r.has("schedule", "values"))
  {
    EpsSchedule s;
    s.values = r.list("schedule", "values");
    s.eps0_guard = guard;
    return s;
  }
  if (!r.has("schedule", "stop"))
  {
    throw ConfigError("[schedule] start needs stop");
  }
  return EpsSchedule::geometric(r.num("schedule", "start", 0.0), r.num("schedule", "stop", 0.0),
                                r.num("schedule", "ratio", 0.5), guard);
}

void check(const RunConfig &c)
{
  c.profile.validate();
  if (c.N < 16)
  {
    throw ConstraintViolation("grid needs N >= 16");
  }
  if (c.order != 2 && c.order != 4 && c.order != 6)
  {
    throw ConstraintViolation("finite-difference order must be 2, 4 or 6");
  }
  if (c.L && !(*c.L > 0.0))
  {
    throw ConstraintViolation("grid half length must be positive");
  }
  if (!(c.eps >= 0.0))
  {
    throw ConstraintViolation("eps must be nonnegative");
  }
  if (c.schedule)
  {
    c.schedule->validate();
  }
  if (!(c.jump_guard > 0.0) || !(c.tol_rel > 0.0) || !(c.eig_tol > 0.0))
  {
    throw ConstraintViolation("jump guard and tolerances must be positive");
  }
  if (!(c.chi_width > 0.0) || (c.chi_T && !(*c.chi_T > 0.0)) || !(c.chi_T_max >= c.chi_T0))
  {
    throw ConstraintViolation("chi needs T > 0, width > 0 and T_max >= T0");
  }
  if (c.region && !(c.region->re_min < c.region->re_max && c.region->im_min < c.region->im_max &&
                    c.region->im_max < 0.0))
  {
    throw ConstraintViolation("oracle region must be a nondegenerate rectangle in Im k < 0");
  }
  const Deformation def = c.deformation();
  const double a = def.a();
  const Grid1D grid = c.grid();
  if (c.profile.mode == DeformationMode::exterior)
  {
    check_grid(grid, c.profile.R, c.eps_min());
  }
  if (c.window)
  {
    c.window->validate(a);
  }
  for (const auto &nc : c.contours)
  {
    const double margin = c.window ? c.window->essential_margin : 5.0 * kDeg;
    nc.spec.validate(a, margin);
  }
  if (c.chi_T && *c.chi_T + c.chi_width >= grid.L)
  {
    throw DomainViolation("chi support reaches the box edge");
  }
}

}  // namespace

double RunConfig::eps_min() const
{
  return schedule ? std::min(schedule->min(), eps > 0.0 ? eps : schedule->min()) : eps;
}

Grid1D RunConfig::grid() const
{
  const double half = L ? *L : auto_half_length(profile.R, eps_min(), potential.feature_size());
  return Grid1D::make(half, N);
}

Deformation RunConfig::deformation() const { return Deformation(profile); }

SectorWindow RunConfig::effective_window() const
{
  if (window)
  {
    return *window;
  }
  return SectorWindow::full(a_of_theta(profile.theta), 1e-3, 50.0);
}

RunConfig parse_config(std::istream &in, const std::string &source)
{
  const Table t = read_table(in, source);
  const Reader r(t);
  RunConfig c;
  c.source = source;
  c.profile = read_profile(r);
  c.potential = read_potential(r);

  if (r.has("grid", "L") && r.str("grid", "L") != "auto")
  {
    c.L = r.num("grid", "L", 0.0);
  }
  c.N = r.integer("grid", "N", c.N);
  c.order = r.integer("grid", "order", c.order);

  if (r.has("operator", "tag"))
  {
    c.tag = operator_tag_from_string(r.str("operator", "tag"));
  }
  c.eps = r.num("operator", "eps", c.eps);

  c.schedule = read_schedule(r);
  c.jump_guard = r.num("schedule", "jump_guard", c.jump_guard);
  c.window = read_window(r);
  c.contours = read_contours(r);

  if (r.has("chi", "T") && r.str("chi", "T") != "auto")
  {
    c.chi_T = r.num("chi", "T", 0.0);
  }
  c.chi_width = r.num("chi", "width", c.chi_width);
  c.chi_T0 = r.num("chi", "T0", c.chi_T0);
  c.chi_T_max = r.num("chi", "T_max", c.chi_T_max);

  if (r.has("oracle", "region"))
  {
    const auto v = r.list("oracle", "region");
    if (v.size() != 4)
    {
      throw ConfigError("[oracle] region needs: re_min re_max im_min im_max");
    }
    c.region = KRegion{v[0], v[1], v[2], v[3]};
  }
  if (r.has("oracle", "cache"))
  {
    c.cache_path = r.str("oracle", "cache");
  }
  c.davies_count = r.integer("oracle", "count", c.davies_count);
  if (c.davies_count < 1)
  {
    throw ConstraintViolation("[oracle] count must be positive");
  }

  c.tol_rel = r.num("tolerance", "rel", c.tol_rel);
  c.eig_tol = r.num("tolerance", "eig", c.eig_tol);
  c.brute_force = r.flag("tolerance", "brute_force", c.brute_force);
  c.svg = r.flag("output", "svg", c.svg);

  check(c);
  return c;
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in, path);
}

void print_schema(std::ostream &os)
{
  std::string current;
  for (const auto &k : kSchema)
  {
    if (current != k.section)
    {
      current = k.section;
      os << (current == kSchema[0].section ? "" : "\n") << "[" << current << "]\n";
    }
    os << "  " << std::left << std::setw(16) << k.key << k.doc << "\n";
  }
}

}  // namespace cscap::app
