// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cscap/errors.hpp"

namespace cscap
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

// Distance from the point i*y (y > 0) to the closed cone.
double distance_to_cone(double y, const Cone &cone)
{
  const double tb = std::tan(cone.beta0);
  const double cb = std::cos(cone.beta0), sb = std::sin(cone.beta0);
  const double R = cone.truncated ? cone.R : 0.0;
  const double s = y * sb;
  if (s * cb >= R)
  {
    return y * cb;
  }
  const double yc = std::clamp(y, -tb * R, tb * R);
  return std::min(std::hypot(R, y - tb * R), std::hypot(R, y - yc));
}

double sech2(cplx z)
{
  if (z.real() < 0.0)
  {
    z = -z;
  }
  const cplx e = std::exp(-2.0 * z);
  const cplx d = 1.0 + e;
  return (4.0 * e / (d * d)).real();
}

cplx sech2c(cplx z)
{
  if (z.real() < 0.0)
  {
    z = -z;
  }
  const cplx e = std::exp(-2.0 * z);
  const cplx d = 1.0 + e;
  return 4.0 * e / (d * d);
}

}  // namespace

Cone Cone::of(const DeformationProfile &profile)
{
  return {profile.R, profile.beta0, profile.mode == DeformationMode::exterior};
}

bool Cone::contains(cplx z) const
{
  const double re = std::abs(z.real());
  if (std::abs(z.imag()) > std::tan(beta0) * re * (1.0 + 1e-12))
  {
    return false;
  }
  return !truncated || re >= R * (1.0 - 1e-12);
}

PotentialSpec::PotentialSpec(PotentialKind kind) : kind_(kind)
{
  std::visit(overloaded{[](const Free &) {},
                        [](const SquareWell &w) {
                          if (!(w.a > 0.0) || !std::isfinite(w.V0))
                          {
                            throw ConstraintViolation("square well requires a > 0 and finite V0");
                          }
                        },
                        [](const GaussianBump &g) {
                          if (!(g.sigma > 0.0) || !std::isfinite(g.V0))
                          {
                            throw ConstraintViolation("gaussian bump requires sigma > 0");
                          }
                        },
                        [](const PoschlTeller &p) {
                          if (!std::isfinite(p.V0))
                          {
                            throw ConstraintViolation("Poschl-Teller requires finite V0");
                          }
                        }},
             kind_);
}

std::string PotentialSpec::name() const
{
  return std::visit(overloaded{[](const Free &) { return std::string("free"); },
                               [](const SquareWell &) { return std::string("square_well"); },
                               [](const GaussianBump &) { return std::string("gaussian"); },
                               [](const PoschlTeller &) { return std::string("poschl_teller"); }},
                    kind_);
}

std::vector<std::pair<std::string, double>> PotentialSpec::parameters() const
{
  using P = std::vector<std::pair<std::string, double>>;
  return std::visit(overloaded{[](const Free &) { return P{}; },
                               [](const SquareWell &w) { return P{{"V0", w.V0}, {"a", w.a}}; },
                               [](const GaussianBump &g) {
                                 return P{{"V0", g.V0}, {"sigma", g.sigma}};
                               },
                               [](const PoschlTeller &p) { return P{{"V0", p.V0}}; }},
                    kind_);
}

double PotentialSpec::pole_clearance(const Cone &cone) const
{
  if (!std::holds_alternative<PoschlTeller>(kind_) || std::get<PoschlTeller>(kind_).V0 == 0.0)
  {
    return kInf;
  }
  // Poles of sech^2 at +-i pi (m + 1/2); the set is symmetric under conjugation.
  double best = kInf;
  const double cb = std::cos(cone.beta0);
  for (int m = 0; m < 1000; ++m)
  {
    const double y = std::numbers::pi * (m + 0.5);
    if (y * cb > best && y > best)
    {
      break;
    }
    best = std::min({best, y, distance_to_cone(y, cone)});
  }
  return best;
}

double PotentialSpec::feature_size() const
{
  return std::visit(
    overloaded{[](const Free &) { return 0.0; }, [](const SquareWell &w) { return w.a; },
               [](const GaussianBump &g) {
                 return g.sigma * std::sqrt(std::max(0.0, std::log(std::abs(g.V0) / 1e-8)));
               },
               [](const PoschlTeller &p) {
                 return p.V0 == 0.0 ? 0.0 : 0.5 * std::log(4.0 * std::abs(p.V0) / 1e-8);
               }},
    kind_);
}

bool PotentialSpec::is_compact() const
{
  return std::holds_alternative<Free>(kind_) || std::holds_alternative<SquareWell>(kind_);
}

cplx PotentialSpec::value(cplx z) const
{
  return std::visit(overloaded{[](const Free &) { return cplx(0.0); },
                               [&](const SquareWell &w) {
                                 return std::abs(z.real()) < w.a ? cplx(w.V0) : cplx(0.0);
                               },
                               [&](const GaussianBump &g) {
                                 const cplx s = z / g.sigma;
                                 return g.V0 * std::exp(-s * s);
                               },
                               [&](const PoschlTeller &p) {
                                 if (z.imag() == 0.0)
                                 {
                                   return cplx(p.V0 * sech2(z));
                                 }
                                 return p.V0 * sech2c(z);
                               }},
                    kind_);
}

cplx eval_complex(const PotentialSpec &spec, cplx z, const Cone &cone)
{
  if (z.imag() == 0.0)
  {
    return spec.value(z);
  }
  auto fail = [&](const std::string &why) {
    std::ostringstream os;
    os << spec.name() << " evaluated at z = " << z.real() << (z.imag() < 0 ? "" : "+")
       << z.imag() << "i: " << why;
    throw DomainViolation(os.str());
  };
  if (!cone.contains(z))
  {
    fail("outside the admissible cone");
  }
  if (const auto *w = std::get_if<SquareWell>(&spec.kind()))
  {
    if (std::abs(z.real()) <= w->a)
    {
      fail("non-real argument inside the square-well support");
    }
    return 0.0;
  }
  if (std::holds_alternative<PoschlTeller>(spec.kind()))
  {
    const double clearance = spec.pole_clearance(cone);
    const double m = std::max(0.0, std::round(std::abs(z.imag()) / std::numbers::pi - 0.5));
    const cplx pole(0.0, std::copysign(std::numbers::pi * (m + 0.5), z.imag()));
    if (std::abs(z - pole) < 0.5 * clearance)
    {
      fail("within pole_clearance/2 of a singularity");
    }
  }
  return spec.value(z);
}

std::vector<double> decay_profile(const PotentialSpec &spec, const DeformationProfile &profile,
                                  std::span<const double> radii)
{
  const Cone cone = Cone::of(profile);
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii)
  {
    double sup = 0.0;
    for (int j = -4; j <= 4; ++j)
    {
      const double alpha = profile.beta0 * j / 4.0;
      for (double sgn : {1.0, -1.0})
      {
        const cplx z = sgn * std::polar(r, alpha);
        try
        {
          sup = std::max(sup, std::abs(eval_complex(spec, z, cone)));
        }
        catch (const DomainViolation &)
        {
        }
      }
    }
    out.push_back(sup);
  }
  return out;
}

double ChiCutoff::at(double x, double T, double width)
{
  static const BumpStep step(0.0, 1.0, 1.0, 1.0, 0.0, 4096);
  return 1.0 - step.value((std::abs(x) - T) / width);
}

ChiCutoff build_chi(std::span<const double> nodes, double half_length, double T, double width)
{
  if (!(T > 0.0) || !(width > 0.0))
  {
    throw ConstraintViolation("chi requires T > 0 and width > 0");
  }
  if (T + width >= half_length)
  {
    std::ostringstream os;
    os << "chi support T + width = " << T + width << " exceeds the grid half-length "
       << half_length;
    throw DomainViolation(os.str());
  }
  ChiCutoff chi{T, width, {}};
  chi.values.reserve(nodes.size());
  for (double x : nodes)
  {
    chi.values.push_back(ChiCutoff::at(x, T, width));
  }
  return chi;
}

}  // namespace cscap
