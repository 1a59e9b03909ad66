// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/discretization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "cscap/errors.hpp"

namespace cscap
{

namespace
{

struct Tap
{
  int col;
  double weight;
};

// Staggered first-derivative weights on half-integer offsets.
std::vector<double> staggered_weights(int order)
{
  switch (order)
  {
    case 2:
      return {1.0};
    case 4:
      return {9.0 / 8.0, -1.0 / 24.0};
    case 6:
      return {75.0 / 64.0, -25.0 / 384.0, 3.0 / 640.0};
    default:
      throw ConstraintViolation("finite-difference order must be 2, 4 or 6");
  }
}

std::vector<double> centered_weights(int order)
{
  switch (order)
  {
    case 2:
      return {0.5};
    case 4:
      return {2.0 / 3.0, -1.0 / 12.0};
    case 6:
      return {0.75, -0.15, 1.0 / 60.0};
    default:
      throw ConstraintViolation("finite-difference order must be 2, 4 or 6");
  }
}

// Node index n in [-(order), N + 1 + order] to matrix column with odd
// reflection about the Dirichlet ends n = 0 and n = N + 1.
void push_node(std::vector<Tap> &taps, int n, int N, double w)
{
  if (n >= 1 && n <= N)
  {
    taps.push_back({n - 1, w});
  }
  else if (n < 0)
  {
    taps.push_back({-n - 1, -w});
  }
  else if (n > N + 1)
  {
    taps.push_back({2 * (N + 1) - n - 1, -w});
  }
}

// Rows of the staggered difference G, one per midpoint inside the box. The
// transpose folds the mirrored midpoints back with even symmetry, so no ghost
// rows are needed beyond the ends.
std::vector<std::vector<Tap>> staggered_rows(int N, double h, int order)
{
  const auto c = staggered_weights(order);
  const int rows = N + 1;
  std::vector<std::vector<Tap>> G(rows);
  for (int r = 0; r < rows; ++r)
  {
    const int i = r;
    for (int q = 0; q < static_cast<int>(c.size()); ++q)
    {
      push_node(G[r], i + 1 + q, N, c[q] / h);
      push_node(G[r], i - q, N, -c[q] / h);
    }
  }
  return G;
}

double midpoint(const Grid1D &g, int r)
{
  return -g.L + g.spacing * (r + 0.5);
}

}  // namespace

Grid1D Grid1D::make(double L, int N)
{
  if (!(L > 0.0) || !std::isfinite(L))
  {
    throw ConstraintViolation("grid half-length must be positive");
  }
  if (N < 16)
  {
    throw ConstraintViolation("grid requires N >= 16");
  }
  Grid1D g;
  g.L = L;
  g.N = N;
  g.spacing = 2.0 * L / (N + 1);
  g.nodes.resize(N);
  for (int j = 0; j < N; ++j)
  {
    g.nodes[j] = -L + g.spacing * (j + 1);
  }
  return g;
}

double auto_half_length(double R, double eps_min, double feature_size)
{
  double L = std::max(12.0 * R, feature_size + 10.0);
  if (eps_min > 0.0)
  {
    L = std::max(L, 6.0 * std::pow(eps_min, -0.25));
  }
  return L;
}

void check_grid(const Grid1D &grid, double R, double eps_min)
{
  if (grid.L < 12.0 * R * (1.0 - 1e-12))
  {
    std::ostringstream os;
    os << "grid half-length " << grid.L << " < 12R = " << 12.0 * R;
    throw ConstraintViolation(os.str());
  }
  if (eps_min > 0.0 && grid.L < 6.0 * std::pow(eps_min, -0.25) * (1.0 - 1e-12))
  {
    std::ostringstream os;
    os << "grid half-length " << grid.L << " < 6 eps^(-1/4) = "
       << 6.0 * std::pow(eps_min, -0.25) << " for eps = " << eps_min;
    throw ConstraintViolation(os.str());
  }
}

Scheme scheme_from_string(const std::string &s)
{
  if (s == "fd" || s == "finite_difference" || s == "finite-difference")
  {
    return Scheme::finite_difference;
  }
  throw ConfigError("unsupported grid scheme '" + s + "' (only 'fd' is available)");
}

DerivativeMatrices derivative_matrices(const Grid1D &grid, int order, Scheme)
{
  const int N = grid.N;
  const double h = grid.spacing;
  DerivativeMatrices d;
  d.D1 = Eigen::MatrixXd::Zero(N, N);
  const auto a = centered_weights(order);
  for (int j = 0; j < N; ++j)
  {
    for (int q = 1; q <= static_cast<int>(a.size()); ++q)
    {
      if (j + q < N)
      {
        d.D1(j, j + q) += a[q - 1] / h;
      }
      if (j - q >= 0)
      {
        d.D1(j, j - q) -= a[q - 1] / h;
      }
    }
  }
  d.D2 = Eigen::MatrixXd::Zero(N, N);
  for (const auto &row : staggered_rows(N, h, order))
  {
    for (const auto &p : row)
    {
      for (const auto &q : row)
      {
        d.D2(p.col, q.col) -= p.weight * q.weight;
      }
    }
  }
  return d;
}

std::string to_string(OperatorTag tag)
{
  switch (tag)
  {
    case OperatorTag::H:
      return "H";
    case OperatorTag::Htheta:
      return "Htheta";
    case OperatorTag::Heps:
      return "Heps";
    case OperatorTag::HepsTheta:
      return "HepsTheta";
    case OperatorTag::HepsThetaMinusChiV:
      return "HepsThetaMinusChiV";
  }
  return "?";
}

OperatorTag operator_tag_from_string(const std::string &s)
{
  for (auto t : {OperatorTag::H, OperatorTag::Htheta, OperatorTag::Heps, OperatorTag::HepsTheta,
                 OperatorTag::HepsThetaMinusChiV})
  {
    if (s == to_string(t))
    {
      return t;
    }
  }
  throw ConfigError("unknown operator tag '" + s + "'");
}

Eigen::VectorXcd potential_on_contour(const Grid1D &grid, const Deformation &def,
                                      const PotentialSpec &potential)
{
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(grid.N);
  if (std::holds_alternative<Free>(potential.kind()))
  {
    return v;
  }
  const Cone cone = Cone::of(def.profile());
  for (int j = 0; j < grid.N; ++j)
  {
    v[j] = eval_complex(potential, def.phi(grid.nodes[j]).phi, cone);
  }
  return v;
}

Eigen::VectorXcd chi_potential_diagonal(const Grid1D &grid, const Deformation &def,
                                        const PotentialSpec &potential, const ChiCutoff &chi)
{
  if (static_cast<int>(chi.values.size()) != grid.N)
  {
    throw ConstraintViolation("chi was sampled on a different grid");
  }
  Eigen::VectorXcd v = potential_on_contour(grid, def, potential);
  for (int j = 0; j < grid.N; ++j)
  {
    v[j] *= chi.values[j];
  }
  return v;
}

Eigen::VectorXcd phi_squared(const Grid1D &grid, const Deformation &def)
{
  Eigen::VectorXcd v(grid.N);
  for (int j = 0; j < grid.N; ++j)
  {
    const cplx p = def.phi(grid.nodes[j]).phi;
    v[j] = p * p;
  }
  return v;
}

OperatorMatrix assemble(OperatorTag tag, const Grid1D &grid, const Deformation &def,
                        const PotentialSpec &potential, double eps,
                        const std::optional<ChiCutoff> &chi, const AssembleOptions &opts)
{
  const bool deformed = tag == OperatorTag::Htheta || tag == OperatorTag::HepsTheta ||
                        tag == OperatorTag::HepsThetaMinusChiV;
  const bool cap = tag == OperatorTag::Heps || tag == OperatorTag::HepsTheta ||
                   tag == OperatorTag::HepsThetaMinusChiV;
  if (cap && eps < 0.0)
  {
    throw ConstraintViolation("eps must be nonnegative");
  }
  if (tag == OperatorTag::HepsThetaMinusChiV && !chi)
  {
    throw ConstraintViolation("the split operator requires a chi cutoff");
  }
  const Deformation d = deformed ? def : def.with_theta(0.0);
  const double e = cap ? eps : 0.0;
  const int N = grid.N;
  const double h = grid.spacing;

  std::vector<cplx> m(N);
  for (int j = 0; j < N; ++j)
  {
    m[j] = 1.0 / std::sqrt(d.phi(grid.nodes[j]).dphi);
  }

  OperatorMatrix op;
  op.entries = Eigen::MatrixXcd::Zero(N, N);
  op.grid = grid;
  op.tag = tag;
  op.params = {d.theta(), e, potential, d.profile(), chi, opts.order};

  const auto rows = staggered_rows(N, h, opts.order);
  int band = 0;
  for (int r = 0; r < static_cast<int>(rows.size()); ++r)
  {
    const cplx c = 1.0 / d.phi(midpoint(grid, r)).dphi;
    for (const auto &p : rows[r])
    {
      const cplx cp = c * p.weight * m[p.col];
      for (const auto &q : rows[r])
      {
        op.entries(p.col, q.col) += cp * q.weight * m[q.col];
        band = std::max(band, std::abs(p.col - q.col));
      }
    }
  }
  op.bandwidth = band;

  if (!opts.omit_potential)
  {
    const Eigen::VectorXcd v = potential_on_contour(grid, d, potential);
    op.entries.diagonal() += v;
    if (tag == OperatorTag::HepsThetaMinusChiV)
    {
      for (int j = 0; j < N; ++j)
      {
        op.entries(j, j) -= chi->values[j] * v[j];
      }
    }
  }
  if (e > 0.0)
  {
    op.entries.diagonal() += cplx(0.0, -e) * phi_squared(grid, d);
  }
  return op;
}

Eigen::MatrixXcd p_theta_first_order(const Grid1D &grid, const Deformation &def, int order)
{
  const auto d = derivative_matrices(grid, order);
  const int N = grid.N;
  Eigen::MatrixXcd P(N, N);
  for (int j = 0; j < N; ++j)
  {
    const PhiValue p = def.phi(grid.nodes[j]);
    P.row(j) = d.D1.row(j).cast<cplx>() / p.dphi;
    P(j, j) -= p.d2phi / (2.0 * p.dphi * p.dphi);
  }
  return cplx(0.0, -1.0) * P;
}

}  // namespace cscap
