// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_POTENTIALS_HPP
#define CSCAP_POTENTIALS_HPP

#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cscap/deformation.hpp"

namespace cscap
{

struct Free
{
};

// V0 on |x| < a, zero outside.
struct SquareWell
{
  double V0 = -1.0;
  double a = 1.0;
};

// V0 exp(-(x / sigma)^2).
struct GaussianBump
{
  double V0 = 1.0;
  double sigma = 1.0;
};

// V0 / cosh(x)^2.
struct PoschlTeller
{
  double V0 = 4.0;
};

using PotentialKind = std::variant<Free, SquareWell, GaussianBump, PoschlTeller>;

// Region where a potential may be evaluated off the real axis: the truncated
// cone |Im z| <= tan(beta0) |Re z|, |Re z| >= R. With truncated = false the
// cone is not cut at R, as needed by the global-dilation harness.
struct Cone
{
  double R = 0.0;
  double beta0 = 0.0;
  bool truncated = true;

  static Cone of(const DeformationProfile &profile);
  bool contains(cplx z) const;
};

class PotentialSpec
{
public:
  PotentialSpec() = default;
  explicit PotentialSpec(PotentialKind kind);

  const PotentialKind &kind() const { return kind_; }
  std::string name() const;
  // Key/value pairs in a fixed order, for reports and cache keys.
  std::vector<std::pair<std::string, double>> parameters() const;

  // Distance from the closed cone union the real axis to the nearest
  // singularity of the continuation; +inf for entire or compact kinds.
  double pole_clearance(const Cone &cone) const;

  // Radius beyond which |V| < 1e-8 on the real axis.
  double feature_size() const;

  bool is_compact() const;

  // Closed-form value without admissibility checks.
  cplx value(cplx z) const;

private:
  PotentialKind kind_ = Free{};
};

// Analytic continuation of V at z. Real z is always admissible; other points
// must lie in the cone. Throws DomainViolation outside the admissible region,
// within pole_clearance/2 of a singularity, or for a non-real argument inside
// the support of a square well.
cplx eval_complex(const PotentialSpec &spec, cplx z, const Cone &cone);

// Sup of |V| over cone boundary and interior samples at each radius.
std::vector<double> decay_profile(const PotentialSpec &spec, const DeformationProfile &profile,
                                  std::span<const double> radii);

struct ChiCutoff
{
  double T = 0.0;
  double width = 0.0;
  std::vector<double> values;

  // Smooth cutoff at a single point.
  static double at(double x, double T, double width);
};

// chi = 1 on [-T, T] and 0 outside [-T - width, T + width]; the transition
// reuses the integrated-bump step of the deformation module.
ChiCutoff build_chi(std::span<const double> nodes, double half_length, double T, double width);

}  // namespace cscap

#endif  // CSCAP_POTENTIALS_HPP
