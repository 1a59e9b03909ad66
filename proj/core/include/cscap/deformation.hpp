// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_DEFORMATION_HPP
#define CSCAP_DEFORMATION_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace cscap
{

using cplx = std::complex<double>;

enum class DeformationMode
{
  exterior,
  global_dilation
};

std::string to_string(DeformationMode mode);
DeformationMode deformation_mode_from_string(const std::string &s);

//
// Shape of the cutoff transition in the normalized log variable
// u = log(t / 2R) / log 4, which maps [2R, 8R] onto [0, 1]. The derivative
// of h in u is the bump
//
//   b(u) = exp(-rise / (u - u0) - fall / (u1 - u) - skew * (u - u0))
//
// on (u0, u1). A small rise with a large fall and a positive skew pushes the
// mass toward u0, where h is still small.
//
struct CutoffShape
{
  double u0 = 0.0;
  double u1 = 1.0;
  double rise = 0.2 / std::numbers::ln2 / 2.0;
  double fall = 0.01 / std::numbers::ln2 / 2.0;
  double skew = 1.25 * 2.0 * std::numbers::ln2;
};

struct DeformationProfile
{
  double R = 1.5;
  double beta0 = std::numbers::pi / 8.0;
  cplx theta = {0.0, 0.4};
  CutoffShape shape = {};
  DeformationMode mode = DeformationMode::exterior;

  // Throws ConstraintViolation if beta0, theta or the shape are inadmissible.
  void validate() const;
};

// Strict membership in D_beta0: |Re theta| + |Im theta| < tan(beta0).
bool in_theta_domain(cplx theta, double beta0);

double a_of_theta(cplx theta);

// Smooth monotone step on [0, 1] built by integrating a normalized bump. The
// integral is tabulated once; h_u and h_uu are evaluated in closed form.
class BumpStep
{
public:
  BumpStep(double u0, double u1, double rise, double fall, double skew,
           std::size_t intervals = 8192);

  double value(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;

  double lower() const { return u0_; }
  double upper() const { return u1_; }
  std::size_t intervals() const { return values_.size() - 1; }
  double node(std::size_t j) const;
  double node_value(std::size_t j) const { return values_[j]; }

private:
  double raw(double u) const;
  double raw_log_slope(double u) const;

  double u0_, u1_, rise_, fall_, skew_;
  double norm_ = 1.0;
  std::vector<double> values_;
};

struct CutoffEval
{
  double h = 0.0;
  double hp = 0.0;   // dh/dt
  double hpp = 0.0;  // d2h/dt2
  double t_hp = 0.0; // t dh/dt, exact from the bump
};

class CutoffTable
{
public:
  CutoffTable(double R, const CutoffShape &shape, std::size_t intervals = 8192);

  CutoffEval eval(double t) const;
  double R() const { return R_; }

  std::vector<double> nodes() const;
  std::vector<double> h() const;
  std::vector<double> hprime() const;

  // max of h + t h' on a uniform u-grid with the given number of nodes.
  double sup_constraint(std::size_t samples) const;
  double construction_sup() const { return sup_; }
  std::size_t construction_nodes() const { return step_.intervals() + 1; }

private:
  double R_;
  BumpStep step_;
  double sup_ = 0.0;
};

// Builds the cutoff for a profile and checks sup(h + t h') <= 3/2 on a grid
// ten times finer than the construction grid.
CutoffTable build_cutoff(const DeformationProfile &profile,
                         std::size_t intervals = 8192);

struct PhiValue
{
  cplx phi;
  cplx dphi;
  cplx d2phi;
};

class Deformation
{
public:
  explicit Deformation(const DeformationProfile &profile);

  PhiValue phi(double x) const;
  cplx jacobian(double x) const { return phi(x).dphi; }

  const DeformationProfile &profile() const { return profile_; }
  const CutoffTable &cutoff() const { return *cutoff_; }
  cplx theta() const { return profile_.theta; }
  double a() const { return a_of_theta(profile_.theta); }

  // Same profile and cutoff with a different theta.
  Deformation with_theta(cplx theta) const;

private:
  Deformation(const DeformationProfile &profile,
              std::shared_ptr<const CutoffTable> cutoff);

  DeformationProfile profile_;
  std::shared_ptr<const CutoffTable> cutoff_;
};

struct ClauseResult
{
  std::string name;
  bool passed = true;
  bool applicable = true;
  double margin = 0.0;
  double worst_x = 0.0;
  std::size_t checked = 0;
};

struct GeometryReport
{
  std::vector<ClauseResult> clauses;
  double min_abs_jacobian = 0.0;
  double jacobian_bound = 0.0;
  bool passed() const;
};

// Clauses: (i) phi(x) = x for |x| < 2R; (ii) phi(x) on the ray of angle a(theta)
// for |x| > 8R; (iii) |Im phi| < tan(beta0) |Re phi| where Im phi != 0;
// (iv) |Re phi| > R for |x| >= 2R. Throws GeometryViolation on failure unless
// throw_on_failure is false.
GeometryReport validate_geometry(const Deformation &def, std::span<const double> xs,
                                 bool throw_on_failure = true);

// Uniform samples on [-xmax, xmax].
std::vector<double> geometry_samples(double xmax, std::size_t count);

}  // namespace cscap

#endif  // CSCAP_DEFORMATION_HPP
