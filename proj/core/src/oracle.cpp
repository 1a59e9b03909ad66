// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "cscap/errors.hpp"
#include "cscap/special_functions.hpp"

namespace cscap
{

namespace
{

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

cplx pt_s(double V0)
{
  return -0.5 + std::sqrt(cplx(0.25 - V0, 0.0));
}

// sin(x) / x, regular at 0.
cplx sinc(cplx x)
{
  if (std::abs(x) < 1e-4)
  {
    const cplx x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

bool near_nonpositive_integer(cplx z, double tol)
{
  return z.real() < 0.5 && std::abs(z - std::round(z.real())) < tol;
}

std::string fmt(double v)
{
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool z_less(cplx a, cplx b)
{
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb)
  {
    return ma < mb;
  }
  return std::arg(a) < std::arg(b);
}

void require_oracle_kind(const PotentialSpec &spec)
{
  if (!std::holds_alternative<SquareWell>(spec.kind()) &&
      !std::holds_alternative<PoschlTeller>(spec.kind()))
  {
    throw ConstraintViolation("resonance determinant is available for square_well and "
                              "poschl_teller only, not " + spec.name());
  }
}

struct EdgeWalk
{
  const PotentialSpec &spec;
  int evaluations = 0;

  cplx f(cplx k)
  {
    ++evaluations;
    const cplx v = entire_determinant(spec, k);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v == cplx(0.0))
    {
      throw CountUnstable("determinant vanishes or overflows on the region boundary");
    }
    return v;
  }

  double segment(cplx a, cplx b, cplx fa, cplx fb, int depth)
  {
    const double d = std::arg(fb / fa);
    if (std::abs(d) <= kPi / 4.0)
    {
      return d;
    }
    if (depth > 40)
    {
      throw CountUnstable("argument increment does not resolve near the region boundary");
    }
    const cplx m = 0.5 * (a + b);
    const cplx fm = f(m);
    return segment(a, m, fa, fm, depth + 1) + segment(m, b, fm, fb, depth + 1);
  }

  double winding(const KRegion &r, int per_edge)
  {
    const std::array<cplx, 5> corners = {cplx(r.re_min, r.im_min), cplx(r.re_max, r.im_min),
                                         cplx(r.re_max, r.im_max), cplx(r.re_min, r.im_max),
                                         cplx(r.re_min, r.im_min)};
    double total = 0.0;
    for (int e = 0; e < 4; ++e)
    {
      cplx prev = corners[e];
      cplx fprev = f(prev);
      for (int j = 1; j <= per_edge; ++j)
      {
        const cplx next = corners[e] + (corners[e + 1] - corners[e]) * (double(j) / per_edge);
        const cplx fnext = f(next);
        total += segment(prev, next, fprev, fnext, 0);
        prev = next;
        fprev = fnext;
      }
    }
    return total / (2.0 * kPi);
  }
};

struct Root
{
  cplx k;
  double rel_err;
};

std::optional<Root> newton(const PotentialSpec &spec, cplx k)
{
  double last = 0.0;
  for (int it = 0; it < 80; ++it)
  {
    const double h = 1e-6 * std::max(1.0, std::abs(k));
    const cplx f = entire_determinant(spec, k);
    if (f == cplx(0.0))
    {
      return Root{k, 1e-16};
    }
    const cplx df =
      (entire_determinant(spec, k + h) - entire_determinant(spec, k - h)) / (2.0 * h);
    if (df == cplx(0.0) || !std::isfinite(std::abs(df)))
    {
      return std::nullopt;
    }
    const cplx step = f / df;
    k -= step;
    last = std::abs(step) / std::max(1.0, std::abs(k));
    if (last < 1e-15)
    {
      return Root{k, std::max(last, 1e-15)};
    }
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    {
      return std::nullopt;
    }
  }
  return last < 1e-10 ? std::optional<Root>(Root{k, last}) : std::nullopt;
}

void find_in(const PotentialSpec &spec, const KRegion &r, int depth, std::vector<Root> &out)
{
  const int n = zero_count(spec, r);
  if (n == 0)
  {
    return;
  }
  const double w = r.re_max - r.re_min, hgt = r.im_max - r.im_min;
  if (n == 1 || depth >= 24 || std::max(w, hgt) < 1e-9)
  {
    const cplx c(0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max));
    auto root = newton(spec, c);
    if (root && r.contains(root->k, 1e-12 * std::max(1.0, std::abs(root->k))))
    {
      for (int j = 0; j < n; ++j)
      {
        out.push_back(*root);
      }
      return;
    }
    if (depth >= 24)
    {
      throw CountUnstable("Newton polish failed inside a minimal rectangle");
    }
  }
  // Quadrisection; the split point is nudged off-centre if a zero sits on a new edge.
  for (double frac : {0.5, 0.4637, 0.5371})
  {
    const double xm = r.re_min + frac * w, ym = r.im_min + frac * hgt;
    const std::array<KRegion, 4> q = {KRegion{r.re_min, xm, r.im_min, ym},
                                      KRegion{xm, r.re_max, r.im_min, ym},
                                      KRegion{r.re_min, xm, ym, r.im_max},
                                      KRegion{xm, r.re_max, ym, r.im_max}};
    try
    {
      std::vector<Root> found;
      for (const auto &sub : q)
      {
        find_in(spec, sub, depth + 1, found);
      }
      out.insert(out.end(), found.begin(), found.end());
      return;
    }
    catch (const CountUnstable &)
    {
    }
  }
  throw CountUnstable("subdivision did not isolate the zeros");
}

// psi'' = (V - k^2) psi by classical RK4 from x1 down to x0.
void rk4(const PotentialSpec &spec, cplx k2, double x1, double x0, double h, cplx &psi,
         cplx &dpsi)
{
  const int steps = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h)));
  const double dx = -(x1 - x0) / steps;
  // Sample strictly inside the segment so a jump at a break point is seen from
  // the correct side.
  const double lo = std::min(x0, x1) + 1e-12 * std::abs(x1 - x0);
  const double hi = std::max(x0, x1) - 1e-12 * std::abs(x1 - x0);
  auto acc = [&](double x, cplx p) { return (spec.value(std::clamp(x, lo, hi)) - k2) * p; };
  double x = x1;
  for (int s = 0; s < steps; ++s)
  {
    const cplx k1p = dpsi, k1d = acc(x, psi);
    const cplx k2p = dpsi + 0.5 * dx * k1d, k2d = acc(x + 0.5 * dx, psi + 0.5 * dx * k1p);
    const cplx k3p = dpsi + 0.5 * dx * k2d, k3d = acc(x + 0.5 * dx, psi + 0.5 * dx * k2p);
    const cplx k4p = dpsi + dx * k3d, k4d = acc(x + dx, psi + dx * k3p);
    psi += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    dpsi += dx / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    x += dx;
  }
}

}  // namespace

std::string to_string(OracleMethod m)
{
  return m == OracleMethod::closed_form ? "closed_form" : "determinant_roots";
}

std::vector<cplx> davies_spectrum(double eps, int count)
{
  if (count < 1)
  {
    throw ConstraintViolation("davies_spectrum requires count >= 1");
  }
  if (!(eps > 0.0))
  {
    throw ConstraintViolation("davies_spectrum requires eps > 0");
  }
  const cplx base = std::sqrt(eps) * std::polar(1.0, -kPi / 4.0);
  std::vector<cplx> out(count);
  for (int k = 0; k < count; ++k)
  {
    out[k] = base * (1.0 + 2.0 * k);
  }
  return out;
}

cplx entire_determinant(const PotentialSpec &spec, cplx k)
{
  require_oracle_kind(spec);
  if (const auto *w = std::get_if<SquareWell>(&spec.kind()))
  {
    const cplx q = std::sqrt(k * k - w->V0);
    const cplx x = 2.0 * q * w->a;
    return 2.0 * kI * k * std::cos(x) + (k * k + q * q) * 2.0 * w->a * sinc(x);
  }
  const cplx s = pt_s(std::get<PoschlTeller>(spec.kind()).V0);
  return rgamma_complex(s + 1.0 - kI * k) * rgamma_complex(-s - kI * k);
}

cplx resonance_determinant(const PotentialSpec &spec, cplx k)
{
  require_oracle_kind(spec);
  if (std::abs(k) < 1e-12)
  {
    throw EvaluationFailure("resonance determinant requested at k = 0");
  }
  if (const auto *w = std::get_if<SquareWell>(&spec.kind()))
  {
    return std::exp(2.0 * kI * k * w->a) / (2.0 * kI * k) * entire_determinant(spec, k);
  }
  const cplx mik = -kI * k;
  if (near_nonpositive_integer(mik, 1e-10) || near_nonpositive_integer(mik + 1.0, 1e-10))
  {
    std::ostringstream os;
    os << "k = " << k << " is on a pole of the Gamma factors; re-evaluate nearby";
    throw EvaluationFailure(os.str());
  }
  return gamma_complex(mik) * gamma_complex(mik + 1.0) * entire_determinant(spec, k);
}

bool KRegion::contains(cplx k, double slack) const
{
  return k.real() >= re_min - slack && k.real() <= re_max + slack && k.imag() >= im_min - slack &&
         k.imag() <= im_max + slack;
}

int zero_count(const PotentialSpec &spec, const KRegion &region)
{
  EdgeWalk walk{spec};
  const double coarse = walk.winding(region, 16);
  const double fine = walk.winding(region, 32);
  const double nc = std::round(coarse), nf = std::round(fine);
  if (std::abs(coarse - nc) > 0.05 || std::abs(fine - nf) > 0.05 || nc != nf)
  {
    std::ostringstream os;
    os << "zero count did not stabilize (" << coarse << " vs " << fine << ")";
    throw CountUnstable(os.str());
  }
  return static_cast<int>(nf);
}

OracleResult find_resonances(const PotentialSpec &spec, const KRegion &region)
{
  require_oracle_kind(spec);
  if (!(region.re_min < region.re_max) || !(region.im_min < region.im_max))
  {
    throw ConstraintViolation("k-region must have positive width and height");
  }
  if (!(region.im_max < 0.0))
  {
    throw ConstraintViolation("k-region must lie in the lower half plane Im k < 0");
  }
  std::vector<Root> roots;
  find_in(spec, region, 0, roots);
  const int census = zero_count(spec, region);
  if (census != static_cast<int>(roots.size()))
  {
    std::ostringstream os;
    os << "argument-principle count " << census << " differs from " << roots.size()
       << " polished roots";
    throw CountUnstable(os.str());
  }
  OracleResult res;
  res.method = OracleMethod::determinant_roots;
  double worst = 1e-16;
  std::sort(roots.begin(), roots.end(),
            [](const Root &a, const Root &b) { return z_less(a.k * a.k, b.k * b.k); });
  for (const auto &r : roots)
  {
    const cplx D = resonance_determinant(spec, r.k);
    if (!(std::abs(D) < 1e-10))
    {
      std::ostringstream os;
      os << "polished root k = " << r.k << " leaves |D| = " << std::abs(D);
      throw EvaluationFailure(os.str());
    }
    res.momenta.push_back(r.k);
    res.values.push_back(r.k * r.k);
    worst = std::max(worst, r.rel_err);
  }
  // z = k^2 doubles the relative error of k.
  res.certified_digits =
    std::clamp(static_cast<int>(std::floor(-std::log10(2.0 * worst))) - 1, 0, 15);
  return res;
}

cplx determinant_ode(const PotentialSpec &spec, cplx k, double X, double h)
{
  std::vector<double> breaks = {X};
  if (const auto *w = std::get_if<SquareWell>(&spec.kind()))
  {
    breaks.push_back(w->a);
    breaks.push_back(-w->a);
  }
  breaks.push_back(-X);
  const cplx k2 = k * k;
  cplx psi = std::exp(kI * k * X);
  cplx dpsi = kI * k * psi;
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
  {
    rk4(spec, k2, breaks[j], breaks[j + 1], h, psi, dpsi);
  }
  return (dpsi + kI * k * psi) * std::exp(kI * k * X) / (2.0 * kI * k);
}

cplx transmission_ode(const PotentialSpec &spec, cplx k, double X, double h)
{
  return 1.0 / determinant_ode(spec, k, X, h);
}

std::vector<double> square_well_bound_states(const SquareWell &well, int scan)
{
  if (!(well.V0 < 0.0))
  {
    return {};
  }
  auto mismatch = [&](double E) {
    const double kappa = std::sqrt(-E);
    double psi = 1.0, dpsi = kappa;
    const int steps = 2000;
    const double dx = 2.0 * well.a / steps;
    const double q2 = well.V0 - E;
    for (int s = 0; s < steps; ++s)
    {
      const double k1p = dpsi, k1d = q2 * psi;
      const double k2p = dpsi + 0.5 * dx * k1d, k2d = q2 * (psi + 0.5 * dx * k1p);
      const double k3p = dpsi + 0.5 * dx * k2d, k3d = q2 * (psi + 0.5 * dx * k2p);
      const double k4p = dpsi + dx * k3d, k4d = q2 * (psi + dx * k3p);
      psi += dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      dpsi += dx / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    return dpsi + kappa * psi;
  };
  std::vector<double> out;
  const double lo = well.V0 * (1.0 - 1e-12), hi = -1e-12;
  double e0 = lo, m0 = mismatch(e0);
  for (int j = 1; j <= scan; ++j)
  {
    const double e1 = lo + (hi - lo) * j / scan;
    const double m1 = mismatch(e1);
    if (m0 == 0.0)
    {
      out.push_back(e0);
    }
    else if ((m0 < 0.0) != (m1 < 0.0))
    {
      double a = e0, b = e1, fa = m0;
      for (int it = 0; it < 100 && b - a > 1e-15 * std::abs(a); ++it)
      {
        const double m = 0.5 * (a + b);
        const double fm = mismatch(m);
        if ((fm < 0.0) == (fa < 0.0))
        {
          a = m;
          fa = fm;
        }
        else
        {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    e0 = e1;
    m0 = m1;
  }
  return out;
}

OracleCache::OracleCache(std::string path) : path_(std::move(path))
{
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] == '#')
    {
      continue;
    }
    std::istringstream ls(line);
    std::string key, method, re, im;
    int digits = 0;
    if (!std::getline(ls, key, '\t') || !std::getline(ls, method, '\t'))
    {
      continue;
    }
    ls >> digits;
    auto &entry = entries_[key];
    entry.method =
      method == "closed_form" ? OracleMethod::closed_form : OracleMethod::determinant_roots;
    entry.certified_digits = digits;
    double kr, ki;
    if (ls >> kr >> ki)
    {
      const cplx k(kr, ki);
      entry.momenta.push_back(k);
      entry.values.push_back(k * k);
    }
  }
}

std::string OracleCache::key(const PotentialSpec &spec, const KRegion &region)
{
  std::ostringstream os;
  os << spec.name();
  for (const auto &[name, value] : spec.parameters())
  {
    os << ';' << name << '=' << fmt(value);
  }
  os << ";region=" << fmt(region.re_min) << ',' << fmt(region.re_max) << ','
     << fmt(region.im_min) << ',' << fmt(region.im_max);
  return os.str();
}

std::optional<OracleResult> OracleCache::lookup(const std::string &key) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

void OracleCache::store(const std::string &key, const OracleResult &result)
{
  entries_[key] = result;
}

void OracleCache::save() const
{
  std::ofstream out(path_);
  if (!out)
  {
    throw Error("cannot write oracle cache " + path_);
  }
  out << "# cscap oracle cache: key\tmethod\tcertified_digits\tRe k\tIm k\n";
  out << std::setprecision(17);
  for (const auto &[key, r] : entries_)
  {
    if (r.momenta.empty())
    {
      out << key << '\t' << to_string(r.method) << '\t' << r.certified_digits << '\n';
    }
    for (cplx k : r.momenta)
    {
      out << key << '\t' << to_string(r.method) << '\t' << r.certified_digits << '\t'
          << k.real() << '\t' << k.imag() << '\n';
    }
  }
}

OracleResult find_resonances_cached(const PotentialSpec &spec, const KRegion &region,
                                    OracleCache *cache)
{
  const std::string key = OracleCache::key(spec, region);
  if (cache)
  {
    if (auto hit = cache->lookup(key))
    {
      return *hit;
    }
  }
  OracleResult r = find_resonances(spec, region);
  if (cache)
  {
    cache->store(key, r);
  }
  return r;
}

}  // namespace cscap
