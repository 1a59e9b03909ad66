// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/spectra.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "cscap/errors.hpp"
#include "cscap/parallel.hpp"

namespace cscap
{

namespace
{

constexpr double kPi = std::numbers::pi;

const ShiftedSolver &checked(const ShiftedSolver &s, cplx z)
{
  if (!(s.rcond() >= DBL_EPSILON))
  {
    std::ostringstream os;
    os << "shifted matrix is numerically singular at z = " << z << " (rcond " << s.rcond()
       << ")";
    throw NearSingular(s.rcond(), os.str());
  }
  return s;
}

Eigen::VectorXcd start_vector(Eigen::Index n)
{
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    v[i] = cplx(1.0 + 0.25 * std::sin(0.37 * static_cast<double>(i)),
                0.25 * std::cos(0.91 * static_cast<double>(i)));
  }
  return v / v.norm();
}

}  // namespace

double sector_arg(cplx z, double a)
{
  const double lo = -2.0 * a;
  double t = std::arg(z);
  while (t < lo)
  {
    t += 2.0 * kPi;
  }
  while (t >= lo + 2.0 * kPi)
  {
    t -= 2.0 * kPi;
  }
  return t;
}

SectorWindow SectorWindow::around(cplx z, double half_angle, double rel)
{
  SectorWindow w;
  const double t = std::arg(z);
  w.arg_min = t - half_angle;
  w.arg_max = t + half_angle;
  w.r_min = (1.0 - rel) * std::abs(z);
  w.r_max = (1.0 + rel) * std::abs(z);
  return w;
}

SectorWindow SectorWindow::full(double a, double r_min, double r_max)
{
  SectorWindow w;
  w.arg_min = -2.0 * a + w.essential_margin;
  w.arg_max = 1.5 * kPi + 2.0 * a - w.essential_margin;
  w.r_min = r_min;
  w.r_max = r_max;
  return w;
}

void SectorWindow::validate(double a) const
{
  if (empty())
  {
    return;
  }
  if (!(r_min >= 0.0) || !(essential_margin >= 0.0))
  {
    throw ConstraintViolation("sector window needs r_min >= 0 and a nonnegative margin");
  }
  if (!(arg_min > -2.0 * a) || !(arg_max < 1.5 * kPi + 2.0 * a))
  {
    std::ostringstream os;
    os << "sector window [" << arg_min << ", " << arg_max << "] is not inside (" << -2.0 * a
       << ", " << 1.5 * kPi + 2.0 * a << ")";
    throw ConstraintViolation(os.str());
  }
}

bool SectorWindow::contains(cplx z, double a) const
{
  const double r = std::abs(z);
  if (r <= 1e-8 || r < r_min || r > r_max)
  {
    return false;
  }
  const double t = sector_arg(z, a);
  if (t - (-2.0 * a) <= essential_margin || (-2.0 * a + 2.0 * kPi) - t <= essential_margin)
  {
    return false;
  }
  return t >= arg_min && t <= arg_max;
}

std::vector<cplx> ContourSpec::points() const
{
  std::vector<cplx> p(nodes);
  for (int k = 0; k < nodes; ++k)
  {
    p[k] = center + std::polar(radius, 2.0 * kPi * k / nodes);
  }
  return p;
}

void ContourSpec::validate(double a, double essential_margin, const Spectrum *spectrum) const
{
  if (nodes < 4 || nodes % 2 != 0)
  {
    throw ConstraintViolation("contour node count must be even and at least 4");
  }
  if (!(radius > 0.0))
  {
    throw ConstraintViolation("contour radius must be positive");
  }
  const double lo = -2.0 * a;
  for (int k = 0; k < 720; ++k)
  {
    const cplx w = center + std::polar(radius, 2.0 * kPi * k / 720.0);
    const double t = sector_arg(w, a);
    if (std::abs(w) <= 1e-8 || t - lo <= essential_margin ||
        lo + 2.0 * kPi - t <= essential_margin)
    {
      std::ostringstream os;
      os << "contour around " << center << " with radius " << radius
         << " comes within the essential margin of the ray arg z = " << lo;
      throw ConstraintViolation(os.str());
    }
  }
  if (spectrum)
  {
    for (cplx l : spectrum->eigenvalues)
    {
      if (std::abs(std::abs(l - center) - radius) < 0.1 * radius)
      {
        std::ostringstream os;
        os << "eigenvalue " << l << " lies within radius/10 of the contour around " << center;
        throw ConstraintViolation(os.str());
      }
    }
  }
}

Spectrum filter_sector(const Spectrum &spec, const SectorWindow &window, double a)
{
  Spectrum out;
  out.meta = spec.meta;
  if (window.empty())
  {
    return out;
  }
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
  {
    if (window.contains(spec.eigenvalues[k], a))
    {
      out.eigenvalues.push_back(spec.eigenvalues[k]);
      if (!spec.residuals.empty())
      {
        out.residuals.push_back(spec.residuals[k]);
      }
    }
  }
  return out;
}

MatchReport match_spectra(const Spectrum &A, const Spectrum &B, const SectorWindow &window,
                          double a, double tol, bool throw_on_unmatched)
{
  const Spectrum fa = filter_sector(A, window, a);
  const Spectrum fb = filter_sector(B, window, a);
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < fa.size(); ++i)
  {
    for (std::size_t j = 0; j < fb.size(); ++j)
    {
      cand.emplace_back(std::abs(fa.eigenvalues[i] - fb.eigenvalues[j]), i, j);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_a(fa.size(), false), used_b(fb.size(), false);
  MatchReport rep;
  for (const auto &[d, i, j] : cand)
  {
    if (d > tol)
    {
      break;
    }
    if (used_a[i] || used_b[j])
    {
      continue;
    }
    used_a[i] = used_b[j] = true;
    rep.pairs.push_back({fa.eigenvalues[i], fb.eigenvalues[j], d});
    rep.max_distance = std::max(rep.max_distance, d);
  }
  rep.unmatched_a = static_cast<std::size_t>(std::count(used_a.begin(), used_a.end(), false));
  rep.unmatched_b = static_cast<std::size_t>(std::count(used_b.begin(), used_b.end(), false));
  if (throw_on_unmatched && (rep.unmatched_a > 0 || rep.unmatched_b > 0))
  {
    std::ostringstream os;
    os << rep.unmatched_a << " + " << rep.unmatched_b
       << " eigenvalues have no partner within " << tol;
    throw MatchFailure(os.str());
  }
  return rep;
}

cplx multiplicity_direct(const Eigen::MatrixXcd &A, const ContourSpec &c, int bandwidth,
                         int jobs)
{
  const auto pts = c.points();
  const auto terms = parallel_map(pts.size(), jobs, [&](std::size_t k) {
    ShiftedSolver s(A, pts[k], bandwidth);
    return resolvent_trace(checked(s, pts[k])) * std::polar(1.0, 2.0 * kPi * k / c.nodes);
  });
  cplx sum = 0.0;
  for (cplx t : terms)
  {
    sum += t;
  }
  return -c.radius / c.nodes * sum;
}

cplx multiplicity_direct(const OperatorMatrix &A, const ContourSpec &c, int jobs)
{
  return multiplicity_direct(A.entries, c, A.bandwidth, jobs);
}

cplx multiplicity_logderiv(const Eigen::MatrixXcd &A_split, const Eigen::VectorXcd &chiV,
                           const ContourSpec &c, int bandwidth, int jobs)
{
  const Eigen::Index n = A_split.rows();
  if (chiV.size() != n)
  {
    throw ConstraintViolation("chiV has the wrong length");
  }
  std::vector<Eigen::Index> S;
  for (Eigen::Index i = 0; i < n; ++i)
  {
    if (chiV[i] != cplx(0.0))
    {
      S.push_back(i);
    }
  }
  const Eigen::Index s = static_cast<Eigen::Index>(S.size());
  if (s == 0)
  {
    return 0.0;
  }
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(n, s);
  Eigen::VectorXcd D(s);
  for (Eigen::Index k = 0; k < s; ++k)
  {
    E(S[k], k) = 1.0;
    D[k] = chiV[S[k]];
  }
  const auto pts = c.points();
  const auto terms = parallel_map(pts.size(), jobs, [&](std::size_t k) {
    const cplx w = pts[k];
    ShiftedSolver solver(A_split, w, bandwidth);
    if (!(solver.rcond() >= DBL_EPSILON))
    {
      std::ostringstream os;
      os << "H_eps(theta) - chiV - w is singular at w = " << w << "; increase chi.T";
      throw SplitInvertibilityFailure(os.str());
    }
    const Eigen::MatrixXcd Y = solver.solve(E);
    const Eigen::MatrixXcd W = solver.solve(Y);
    Eigen::MatrixXcd Rss(s, s), R2ss(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
    {
      Rss.row(i) = Y.row(S[i]);
      R2ss.row(i) = W.row(S[i]);
    }
    Eigen::MatrixXcd K = D.asDiagonal() * Rss;
    K.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(K);
    if (!(lu.rcond() >= DBL_EPSILON))
    {
      std::ostringstream os;
      os << "I + R chiV is singular at w = " << w << " (contour meets the spectrum)";
      throw SplitInvertibilityFailure(os.str());
    }
    const Eigen::MatrixXcd F = lu.solve(D.asDiagonal() * R2ss);
    return F.trace() * std::polar(1.0, 2.0 * kPi * k / c.nodes);
  });
  cplx sum = 0.0;
  for (cplx t : terms)
  {
    sum += t;
  }
  return c.radius / c.nodes * sum;
}

cplx multiplicity_logderiv(const OperatorMatrix &A_split, const Eigen::VectorXcd &chiV,
                           const ContourSpec &c, int jobs)
{
  return multiplicity_logderiv(A_split.entries, chiV, c, A_split.bandwidth, jobs);
}

MultiplicityReport multiplicity_report(const OperatorMatrix &A, const OperatorMatrix &A_split,
                                       const Eigen::VectorXcd &chiV, const ContourSpec &c,
                                       int jobs)
{
  MultiplicityReport r;
  r.center = c.center;
  r.radius = c.radius;
  r.m_direct = multiplicity_direct(A, c, jobs);
  ContourSpec fine = c;
  fine.nodes *= 2;
  r.doubling_gap = std::abs(multiplicity_direct(A, fine, jobs) - r.m_direct);
  r.m_logderiv = multiplicity_logderiv(A_split, chiV, c, jobs);
  r.rounded = static_cast<int>(std::lround(r.m_direct.real()));
  r.agreement_gap = std::abs(r.m_direct - r.m_logderiv);
  r.accepted = std::abs(r.m_direct - cplx(r.rounded)) < 0.05 && r.agreement_gap < 0.05;
  return r;
}

int count_in_disk(const Spectrum &spec, cplx center, double radius)
{
  return static_cast<int>(std::count_if(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                                        [&](cplx l) { return std::abs(l - center) < radius; }));
}

double power_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &apply,
                  const std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)> &apply_adjoint,
                  Eigen::Index n, int max_iter, double rel_tol)
{
  Eigen::VectorXcd v = start_vector(n);
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it)
  {
    const Eigen::VectorXcd w = apply(v);
    const double next = w.norm();
    Eigen::VectorXcd u = apply_adjoint(w);
    const double un = u.norm();
    if (un == 0.0)
    {
      return next;
    }
    v = u / un;
    if (it > 0 && std::abs(next - sigma) <= rel_tol * next)
    {
      return next;
    }
    sigma = next;
  }
  return sigma;
}

std::vector<double> norm_probe(NormProbeKind kind, const NormProbeParams &params,
                               const std::vector<cplx> &z_list, int jobs)
{
  if (!params.A)
  {
    throw ConstraintViolation("norm_probe requires an operator");
  }
  const OperatorMatrix &A = *params.A;
  const Eigen::Index n = A.size();
  return parallel_map(z_list.size(), jobs, [&](std::size_t k) -> double {
    const cplx z = z_list[k];
    ShiftedSolver sa(A, z);
    checked(sa, z);
    switch (kind)
    {
      case NormProbeKind::plain:
        return power_norm([&](const Eigen::VectorXcd &v) { return Eigen::VectorXcd(sa.solve(v)); },
                          [&](const Eigen::VectorXcd &v) {
                            return Eigen::VectorXcd(sa.solve_adjoint(v));
                          },
                          n, params.max_iter, params.rel_tol);
      case NormProbeKind::weighted:
      {
        Eigen::VectorXd wt(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
          const double x = A.grid.nodes[i];
          wt[i] = 1.0 + x * x;
        }
        return power_norm(
          [&](const Eigen::VectorXcd &v) {
            return Eigen::VectorXcd(wt.cwiseProduct(sa.solve(v.cwiseQuotient(wt))));
          },
          [&](const Eigen::VectorXcd &v) {
            return Eigen::VectorXcd(sa.solve_adjoint(v.cwiseProduct(wt)).cwiseQuotient(wt));
          },
          n, params.max_iter, params.rel_tol);
      }
      case NormProbeKind::Teps:
      {
        if (!params.B || params.phi2.size() != n || params.chiV.size() != n)
        {
          throw ConstraintViolation("Teps probe needs B, phi2 and chiV");
        }
        ShiftedSolver sb(*params.B, z);
        checked(sb, z);
        const Eigen::VectorXcd phi2c = params.phi2.conjugate();
        const Eigen::VectorXcd chic = params.chiV.conjugate();
        return power_norm(
          [&](const Eigen::VectorXcd &v) {
            const Eigen::VectorXcd y = sb.solve(params.chiV.cwiseProduct(v));
            return Eigen::VectorXcd(sa.solve(params.phi2.cwiseProduct(y)));
          },
          [&](const Eigen::VectorXcd &v) {
            const Eigen::VectorXcd y = sa.solve_adjoint(v);
            return Eigen::VectorXcd(chic.cwiseProduct(sb.solve_adjoint(phi2c.cwiseProduct(y))));
          },
          n, params.max_iter, params.rel_tol);
      }
    }
    return 0.0;
  });
}

ChiChoice choose_chi_radius(const OperatorMatrix &free_op, const Eigen::VectorXcd &v_on_contour,
                            const ContourSpec &c, double T0, double width, double T_max,
                            double dT, int jobs)
{
  const Eigen::Index n = free_op.size();
  const auto pts = c.points();
  std::vector<ShiftedSolver> solvers;
  solvers.reserve(pts.size());
  for (cplx z : pts)
  {
    solvers.emplace_back(free_op, z);
    checked(solvers.back(), z);
  }
  ChiChoice choice;
  choice.width = width;
  for (double T = T0; T <= T_max + 1e-12; T += dT)
  {
    if (T + width >= free_op.grid.L)
    {
      break;
    }
    choice.tried_T.push_back(T);
    Eigen::VectorXcd tail(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
      tail[i] = (1.0 - ChiCutoff::at(free_op.grid.nodes[i], T, width)) * v_on_contour[i];
    }
    const Eigen::VectorXcd tailc = tail.conjugate();
    const auto norms = parallel_map(pts.size(), jobs, [&](std::size_t k) {
      if (tail.cwiseAbs().maxCoeff() == 0.0)
      {
        return 0.0;
      }
      const ShiftedSolver &s = solvers[k];
      return power_norm(
        [&](const Eigen::VectorXcd &v) { return Eigen::VectorXcd(s.solve(tail.cwiseProduct(v))); },
        [&](const Eigen::VectorXcd &v) {
          return Eigen::VectorXcd(tailc.cwiseProduct(s.solve_adjoint(v)));
        },
        n, 200, 1e-6);
    });
    choice.neumann_norm = *std::max_element(norms.begin(), norms.end());
    if (choice.neumann_norm < 0.5)
    {
      choice.T = T;
      return choice;
    }
  }
  std::ostringstream os;
  os << "no chi radius up to " << T_max << " gives ||R (1 - chi) V|| < 1/2 on the contour";
  throw SplitInvertibilityFailure(os.str());
}

}  // namespace cscap
