// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_SPECTRA_HPP
#define CSCAP_SPECTRA_HPP

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cscap/eigensolver.hpp"

namespace cscap
{

// Angles are measured on the branch [-2a(theta), -2a(theta) + 2pi).
struct SectorWindow
{
  double arg_min = 0.0;
  double arg_max = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double essential_margin = 5.0 * 3.14159265358979323846 / 180.0;

  // Annular sector around z: |arg w - arg z| <= half_angle, |w| in [(1-rel)|z|, (1+rel)|z|].
  static SectorWindow around(cplx z, double half_angle, double rel);
  // Everything between the essential ray plus margin and 3pi/2 + 2a(theta).
  static SectorWindow full(double a, double r_min, double r_max);

  bool empty() const { return !(arg_min < arg_max) || !(r_min < r_max); }
  // Throws ConstraintViolation unless the closure lies inside
  // {-2a < arg z < 3pi/2 + 2a}.
  void validate(double a) const;
  bool contains(cplx z, double a) const;
};

// arg z mapped to [-2a, -2a + 2pi).
double sector_arg(cplx z, double a);

struct ContourSpec
{
  cplx center = 0.0;
  double radius = 0.0;
  int nodes = 32;

  std::vector<cplx> points() const;
  // Throws ConstraintViolation if nodes is odd or < 4, radius <= 0, the circle
  // comes within essential_margin of the ray, or (when given) an eigenvalue of
  // spectrum lies within radius/10 of the circle.
  void validate(double a, double essential_margin, const Spectrum *spectrum = nullptr) const;
};

struct MultiplicityReport
{
  cplx center = 0.0;
  double radius = 0.0;
  cplx m_direct = 0.0;
  cplx m_logderiv = 0.0;
  int rounded = 0;
  double agreement_gap = 0.0;
  // |m_direct(2n nodes) - m_direct(n nodes)|, the quadrature certificate.
  double doubling_gap = 0.0;
  bool accepted = false;
};

Spectrum filter_sector(const Spectrum &spec, const SectorWindow &window, double a);

struct MatchPair
{
  cplx a;
  cplx b;
  double distance;
};

struct MatchReport
{
  std::vector<MatchPair> pairs;
  double max_distance = 0.0;
  std::size_t unmatched_a = 0;
  std::size_t unmatched_b = 0;
};

// Greedy nearest-neighbour pairing of the in-window eigenvalues. Pairs farther
// apart than tol count as unmatched. Throws MatchFailure if any remain.
MatchReport match_spectra(const Spectrum &A, const Spectrum &B, const SectorWindow &window,
                          double a, double tol, bool throw_on_unmatched = true);

// -(1/2 pi i) tr of the contour integral of (A - z)^(-1), trapezoid rule.
cplx multiplicity_direct(const OperatorMatrix &A, const ContourSpec &c, int jobs = 1);
cplx multiplicity_direct(const Eigen::MatrixXcd &A, const ContourSpec &c, int bandwidth = -1,
                         int jobs = 1);

// (1/2 pi i) tr of the contour integral of (I + R chiV)^(-1) R^2 chiV with
// R = (A_split - w)^(-1), evaluated on the support of chiV.
cplx multiplicity_logderiv(const OperatorMatrix &A_split, const Eigen::VectorXcd &chiV,
                           const ContourSpec &c, int jobs = 1);
cplx multiplicity_logderiv(const Eigen::MatrixXcd &A_split, const Eigen::VectorXcd &chiV,
                           const ContourSpec &c, int bandwidth = -1, int jobs = 1);

// Runs both formulas and rounds; accepted when |m_direct - rounded| < 0.05,
// |m_direct - m_logderiv| < 0.05 and Im m_direct is below 0.05.
MultiplicityReport multiplicity_report(const OperatorMatrix &A, const OperatorMatrix &A_split,
                                       const Eigen::VectorXcd &chiV, const ContourSpec &c,
                                       int jobs = 1);

// Number of eigenvalues strictly inside the disk.
int count_in_disk(const Spectrum &spec, cplx center, double radius);

enum class NormProbeKind
{
  plain,
  weighted,
  Teps
};

struct NormProbeParams
{
  // plain: the operator whose resolvent is probed (H(theta) or p_theta^2).
  // weighted: p_theta^2, with weights <x>^2 and <x>^-2.
  // Teps: A = H_eps(theta) - chiV, B = H(theta) - chiV.
  const OperatorMatrix *A = nullptr;
  const OperatorMatrix *B = nullptr;
  Eigen::VectorXcd phi2;
  Eigen::VectorXcd chiV;
  int max_iter = 300;
  double rel_tol = 1e-7;
};

// Largest singular value by power iteration on M^H M.
std::vector<double> norm_probe(NormProbeKind kind, const NormProbeParams &params,
                               const std::vector<cplx> &z_list, int jobs = 1);

// Largest singular value of an operator given by its action and adjoint action.
double power_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &apply,
                  const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &apply_adjoint,
                  Eigen::Index n, int max_iter = 300, double rel_tol = 1e-7);

struct ChiChoice
{
  double T = 0.0;
  double width = 0.0;
  // max over contour nodes of ||R_free(z) (1 - chi) V||.
  double neumann_norm = 0.0;
  std::vector<double> tried_T;
};

// Grows T from T0 in steps of dT until ||R_free(z) (1 - chi) V|| < 1/2 at every
// contour node, where R_free is the resolvent of the deformed CAP operator
// without potential. Throws SplitInvertibilityFailure if T_max is reached.
ChiChoice choose_chi_radius(const OperatorMatrix &free_op, const Eigen::VectorXcd &v_on_contour,
                            const ContourSpec &c, double T0, double width, double T_max,
                            double dT = 1.0, int jobs = 1);

}  // namespace cscap

#endif  // CSCAP_SPECTRA_HPP
