// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_ORACLE_HPP
#define CSCAP_ORACLE_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cscap/potentials.hpp"

namespace cscap
{

enum class OracleMethod
{
  closed_form,
  determinant_roots
};

std::string to_string(OracleMethod m);

struct OracleResult
{
  // z = k^2, sorted by (|z|, arg z).
  std::vector<cplx> values;
  // Matching momenta with Im k < 0 (empty for closed-form results).
  std::vector<cplx> momenta;
  OracleMethod method = OracleMethod::closed_form;
  int certified_digits = 15;
};

// sqrt(eps) e^(-i pi/4) (1 + 2k), k = 0..count-1.
std::vector<cplx> davies_spectrum(double eps, int count);

// Outgoing-wave determinant D(k) = 1 / t(k). Solutions behave as e^(-ikx) on the
// left and e^(ikx) on the right; D vanishes exactly at resonances and bound
// states. Square well: closed-form transfer matrix. Poschl-Teller: ratio of
// Gamma-function products. Throws EvaluationFailure at k = 0 or near a pole of
// the Gamma factors, ConstraintViolation for other kinds.
cplx resonance_determinant(const PotentialSpec &spec, cplx k);

// Entire function with the same zeros as D in the lower half plane; the
// argument principle and Newton polish run on it. Equal to
// 2ik e^(-2ika) D for the square well and to 1/(Gamma(s+1-ik) Gamma(-s-ik)) for Poschl-Teller, where
// s = -1/2 + sqrt(1/4 - V0).
cplx entire_determinant(const PotentialSpec &spec, cplx k);

// Axis-aligned rectangle in the k-plane.
struct KRegion
{
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx k, double slack = 0.0) const;
};

// Winding number of the entire determinant along the boundary. The boundary is
// walked at two base resolutions with adaptive refinement of steep segments;
// throws CountUnstable if the two disagree or are not integral within 0.05.
int zero_count(const PotentialSpec &spec, const KRegion &region);

// Argument-principle census, quadrisection down to single zeros, and Newton
// polish to |D| < 1e-10. Requires the region in Im k < 0.
OracleResult find_resonances(const PotentialSpec &spec, const KRegion &region);

// D(k) from direct RK4 integration of -psi'' + V psi = k^2 psi on [-X, X],
// started from e^(ikx) at x = X.
cplx determinant_ode(const PotentialSpec &spec, cplx k, double X = 25.0, double h = 2.5e-3);
cplx transmission_ode(const PotentialSpec &spec, cplx k, double X = 25.0, double h = 2.5e-3);

// Bound-state energies of a square well (V0 < 0) by real shooting across the
// well with bisection on the matching condition.
std::vector<double> square_well_bound_states(const SquareWell &well, int scan = 4000);

// Plain-text cache keyed by (kind, parameters, region).
class OracleCache
{
public:
  explicit OracleCache(std::string path);

  static std::string key(const PotentialSpec &spec, const KRegion &region);

  std::optional<OracleResult> lookup(const std::string &key) const;
  void store(const std::string &key, const OracleResult &result);
  void save() const;
  std::size_t size() const { return entries_.size(); }

private:
  std::string path_;
  std::map<std::string, OracleResult> entries_;
};

// Cached find_resonances.
OracleResult find_resonances_cached(const PotentialSpec &spec, const KRegion &region,
                                    OracleCache *cache);

}  // namespace cscap

#endif  // CSCAP_ORACLE_HPP
