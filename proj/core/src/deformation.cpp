// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/deformation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "cscap/errors.hpp"

namespace cscap
{

namespace
{

constexpr double kLog4 = 2.0 * std::numbers::ln2;

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGLNodes = {0.0,
                                            -0.5384693101056831, 0.5384693101056831,
                                            -0.9061798459386640, 0.9061798459386640};
constexpr std::array<double, 5> kGLWeights = {0.5688888888888889,
                                              0.4786286704993665, 0.4786286704993665,
                                              0.2369268850561891, 0.2369268850561891};

}  // namespace

std::string to_string(DeformationMode mode)
{
  return mode == DeformationMode::exterior ? "exterior" : "global-dilation";
}

DeformationMode deformation_mode_from_string(const std::string &s)
{
  if (s == "exterior")
  {
    return DeformationMode::exterior;
  }
  if (s == "global-dilation" || s == "global_dilation" || s == "global")
  {
    return DeformationMode::global_dilation;
  }
  throw ConfigError("unknown deformation mode '" + s + "'");
}

bool in_theta_domain(cplx theta, double beta0)
{
  return std::abs(theta.real()) + std::abs(theta.imag()) < std::tan(beta0);
}

double a_of_theta(cplx theta)
{
  return std::arg(1.0 + theta);
}

void DeformationProfile::validate() const
{
  if (!(R > 0.0) || !std::isfinite(R))
  {
    throw ConstraintViolation("R must be a positive finite number");
  }
  // A few ulps of slack so that beta0 = pi/8 read back from text is admitted.
  if (!(beta0 > 0.0) || beta0 > std::numbers::pi / 8.0 * (1.0 + 4e-16))
  {
    std::ostringstream os;
    os << "beta0 = " << beta0 << " violates 0 < beta0 <= pi/8";
    throw ConstraintViolation(os.str());
  }
  if (!in_theta_domain(theta, beta0))
  {
    std::ostringstream os;
    os << "theta = " << theta.real() << (theta.imag() < 0 ? "" : "+") << theta.imag()
       << "i is outside D_beta0: |Re| + |Im| must be < tan(beta0) = " << std::tan(beta0);
    throw ConstraintViolation(os.str());
  }
  if (!(shape.u0 >= 0.0 && shape.u0 < shape.u1 && shape.u1 <= 1.0))
  {
    throw ConstraintViolation("cutoff shape requires 0 <= u0 < u1 <= 1");
  }
  if (!(shape.rise > 0.0) || !(shape.fall > 0.0) || !std::isfinite(shape.skew))
  {
    throw ConstraintViolation("cutoff shape requires rise > 0, fall > 0, finite skew");
  }
}

BumpStep::BumpStep(double u0, double u1, double rise, double fall, double skew,
                   std::size_t intervals)
  : u0_(u0), u1_(u1), rise_(rise), fall_(fall), skew_(skew), values_(intervals + 1, 0.0)
{
  const double du = (u1_ - u0_) / static_cast<double>(intervals);
  double acc = 0.0;
  for (std::size_t j = 0; j < intervals; ++j)
  {
    const double mid = u0_ + (static_cast<double>(j) + 0.5) * du;
    double s = 0.0;
    for (std::size_t q = 0; q < kGLNodes.size(); ++q)
    {
      s += kGLWeights[q] * raw(mid + 0.5 * du * kGLNodes[q]);
    }
    acc += 0.5 * du * s;
    values_[j + 1] = acc;
  }
  norm_ = acc;
  for (auto &v : values_)
  {
    v /= norm_;
  }
  values_.back() = 1.0;
}

double BumpStep::raw(double u) const
{
  if (u <= u0_ || u >= u1_)
  {
    return 0.0;
  }
  return std::exp(-rise_ / (u - u0_) - fall_ / (u1_ - u) - skew_ * (u - u0_));
}

double BumpStep::raw_log_slope(double u) const
{
  const double a = u - u0_, b = u1_ - u;
  return rise_ / (a * a) - fall_ / (b * b) - skew_;
}

double BumpStep::node(std::size_t j) const
{
  return u0_ + (u1_ - u0_) * static_cast<double>(j) / static_cast<double>(intervals());
}

double BumpStep::value(double u) const
{
  if (u <= u0_)
  {
    return 0.0;
  }
  if (u >= u1_)
  {
    return 1.0;
  }
  const std::size_t n = intervals();
  const double du = (u1_ - u0_) / static_cast<double>(n);
  const double pos = (u - u0_) / du;
  const std::size_t j = std::min(static_cast<std::size_t>(pos), n - 1);
  const double s = pos - static_cast<double>(j);
  // Cubic Hermite with exact slopes; the bump is nonnegative so the
  // interpolant stays monotone at this resolution.
  const double m0 = derivative(node(j)) * du, m1 = derivative(node(j + 1)) * du;
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * values_[j] + (s3 - 2 * s2 + s) * m0 +
                   (-2 * s3 + 3 * s2) * values_[j + 1] + (s3 - s2) * m1;
  return std::clamp(v, values_[j], values_[j + 1]);
}

double BumpStep::derivative(double u) const
{
  return raw(u) / norm_;
}

double BumpStep::second_derivative(double u) const
{
  const double r = raw(u);
  if (r == 0.0)
  {
    return 0.0;
  }
  return r / norm_ * raw_log_slope(u);
}

CutoffTable::CutoffTable(double R, const CutoffShape &shape, std::size_t intervals)
  : R_(R), step_(shape.u0, shape.u1, shape.rise, shape.fall, shape.skew, intervals)
{
  sup_ = sup_constraint(intervals + 1);
}

CutoffEval CutoffTable::eval(double t) const
{
  CutoffEval e;
  t = std::abs(t);
  if (t <= 2.0 * R_)
  {
    return e;
  }
  if (t >= 8.0 * R_)
  {
    e.h = 1.0;
    return e;
  }
  const double u = std::log(t / (2.0 * R_)) / kLog4;
  e.h = step_.value(u);
  const double hu = step_.derivative(u);
  const double huu = step_.second_derivative(u);
  e.t_hp = hu / kLog4;
  e.hp = e.t_hp / t;
  e.hpp = (huu / kLog4 - hu) / (t * t * kLog4);
  return e;
}

std::vector<double> CutoffTable::nodes() const
{
  std::vector<double> t(step_.intervals() + 1);
  for (std::size_t j = 0; j < t.size(); ++j)
  {
    t[j] = 2.0 * R_ * std::exp(kLog4 * step_.node(j));
  }
  return t;
}

std::vector<double> CutoffTable::h() const
{
  std::vector<double> v(step_.intervals() + 1);
  for (std::size_t j = 0; j < v.size(); ++j)
  {
    v[j] = step_.node_value(j);
  }
  return v;
}

std::vector<double> CutoffTable::hprime() const
{
  const auto t = nodes();
  std::vector<double> v(t.size());
  for (std::size_t j = 0; j < v.size(); ++j)
  {
    v[j] = step_.derivative(step_.node(j)) / (kLog4 * t[j]);
  }
  return v;
}

double CutoffTable::sup_constraint(std::size_t samples) const
{
  double best = 0.0;
  for (std::size_t j = 0; j < samples; ++j)
  {
    const double u = static_cast<double>(j) / static_cast<double>(samples - 1);
    best = std::max(best, step_.value(u) + step_.derivative(u) / kLog4);
  }
  return best;
}

CutoffTable build_cutoff(const DeformationProfile &profile, std::size_t intervals)
{
  profile.validate();
  CutoffTable table(profile.R, profile.shape, intervals);
  const double sup = std::max(table.construction_sup(), table.sup_constraint(10 * intervals + 1));
  if (sup > 1.5)
  {
    std::ostringstream os;
    os << "cutoff shape gives sup(h + t h') = " << sup << " > 3/2";
    throw ConstraintViolation(os.str());
  }
  return table;
}

Deformation::Deformation(const DeformationProfile &profile)
  : profile_(profile),
    cutoff_(std::make_shared<const CutoffTable>(build_cutoff(profile)))
{
}

Deformation::Deformation(const DeformationProfile &profile,
                         std::shared_ptr<const CutoffTable> cutoff)
  : profile_(profile), cutoff_(std::move(cutoff))
{
}

Deformation Deformation::with_theta(cplx theta) const
{
  DeformationProfile p = profile_;
  p.theta = theta;
  p.validate();
  return Deformation(p, cutoff_);
}

PhiValue Deformation::phi(double x) const
{
  const cplx th = profile_.theta;
  if (profile_.mode == DeformationMode::global_dilation)
  {
    return {(1.0 + th) * x, 1.0 + th, 0.0};
  }
  const CutoffEval c = cutoff_->eval(x);
  const double sgn = x < 0.0 ? -1.0 : 1.0;
  const double t = std::abs(x);
  return {x + th * (c.h * x), 1.0 + th * (c.h + c.t_hp),
          th * (sgn * (2.0 * c.hp + t * c.hpp))};
}

bool GeometryReport::passed() const
{
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ClauseResult &c) { return c.passed; });
}

GeometryReport validate_geometry(const Deformation &def, std::span<const double> xs,
                                 bool throw_on_failure)
{
  const auto &prof = def.profile();
  const double R = prof.R;
  const double tb = std::tan(prof.beta0);
  const double a = def.a();
  const cplx th = prof.theta;
  const bool exterior = prof.mode == DeformationMode::exterior;

  ClauseResult c1{"(i) identity for |x| < 2R", true, exterior, 0.0, 0.0, 0};
  ClauseResult c2{"(ii) ray of angle a(theta) for |x| > 8R", true, true, 0.0, 0.0, 0};
  ClauseResult c3{"(iii) |Im phi| < tan(beta0) |Re phi|", true, true,
                  std::numeric_limits<double>::infinity(), 0.0, 0};
  ClauseResult c4{"(iv) |Re phi| > R for |x| >= 2R", true, true,
                  std::numeric_limits<double>::infinity(), 0.0, 0};
  ClauseResult cj{"jacobian |J| >= 1 - 3|theta|/2", true, true,
                  std::numeric_limits<double>::infinity(), 0.0, 0};

  GeometryReport rep;
  rep.min_abs_jacobian = std::numeric_limits<double>::infinity();
  rep.jacobian_bound = 1.0 - 1.5 * std::abs(th);

  for (double x : xs)
  {
    const PhiValue p = def.phi(x);
    const double ax = std::abs(x);
    if (exterior && ax < 2.0 * R)
    {
      const double dev = std::abs(p.phi - cplx(x, 0.0));
      ++c1.checked;
      if (dev > c1.margin)
      {
        c1.margin = dev;
        c1.worst_x = x;
      }
    }
    if (ax > 8.0 * R)
    {
      const double dev = std::abs(std::arg(x < 0 ? -p.phi : p.phi) - a);
      ++c2.checked;
      if (dev > c2.margin)
      {
        c2.margin = dev;
        c2.worst_x = x;
      }
    }
    if (p.phi.imag() != 0.0)
    {
      const double slack = (tb * std::abs(p.phi.real()) - std::abs(p.phi.imag())) /
                           std::abs(p.phi);
      ++c3.checked;
      if (slack < c3.margin)
      {
        c3.margin = slack;
        c3.worst_x = x;
      }
    }
    if (ax >= 2.0 * R)
    {
      const double slack = std::abs(p.phi.real()) - R;
      ++c4.checked;
      if (slack < c4.margin)
      {
        c4.margin = slack;
        c4.worst_x = x;
      }
    }
    const double aj = std::abs(p.dphi);
    ++cj.checked;
    if (aj < rep.min_abs_jacobian)
    {
      rep.min_abs_jacobian = aj;
      cj.worst_x = x;
    }
  }
  c1.passed = !exterior || c1.margin <= 1e-15 * 8.0 * R;
  c2.passed = c2.margin <= 1e-12;
  c3.passed = c3.margin > 0.0;
  c4.passed = c4.margin > 0.0;
  cj.margin = rep.min_abs_jacobian - rep.jacobian_bound;
  cj.passed = cj.margin >= -1e-12 && rep.min_abs_jacobian > 0.0;
  rep.clauses = {c1, c2, c3, c4, cj};

  if (throw_on_failure)
  {
    for (const auto &c : rep.clauses)
    {
      if (!c.passed)
      {
        std::ostringstream os;
        os << "geometry clause " << c.name << " fails at x = " << c.worst_x
           << " (margin " << c.margin << ")";
        throw GeometryViolation(c.name, c.worst_x, os.str());
      }
    }
  }
  return rep;
}

std::vector<double> geometry_samples(double xmax, std::size_t count)
{
  std::vector<double> xs(count);
  for (std::size_t j = 0; j < count; ++j)
  {
    xs[j] = -xmax + 2.0 * xmax * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  return xs;
}

}  // namespace cscap
