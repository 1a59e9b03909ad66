// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_DISCRETIZATION_HPP
#define CSCAP_DISCRETIZATION_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cscap/deformation.hpp"
#include "cscap/potentials.hpp"

namespace cscap
{

// Interior nodes x_j = -L + j h, j = 1..N, h = 2L / (N + 1); u(+-L) = 0.
struct Grid1D
{
  double L = 0.0;
  int N = 0;
  double spacing = 0.0;
  std::vector<double> nodes;

  static Grid1D make(double L, int N);
};

// L = max(12R, 6 eps_min^(-1/4), feature + 10); eps_min <= 0 drops the CAP term.
double auto_half_length(double R, double eps_min, double feature_size);

// Throws ConstraintViolation if L < 12R, or L < 6 eps_min^(-1/4) when eps_min > 0.
void check_grid(const Grid1D &grid, double R, double eps_min);

enum class Scheme
{
  finite_difference
};

Scheme scheme_from_string(const std::string &s);

struct DerivativeMatrices
{
  Eigen::MatrixXd D1;
  Eigen::MatrixXd D2;
};

// Centered first derivative and the staggered second derivative D2 = -G^T G,
// both with Dirichlet ends. order is 2, 4 or 6.
DerivativeMatrices derivative_matrices(const Grid1D &grid, int order = 4,
                                       Scheme scheme = Scheme::finite_difference);

enum class OperatorTag
{
  H,
  Htheta,
  Heps,
  HepsTheta,
  HepsThetaMinusChiV
};

std::string to_string(OperatorTag tag);
OperatorTag operator_tag_from_string(const std::string &s);

struct OperatorParams
{
  cplx theta = 0.0;
  double eps = 0.0;
  PotentialSpec potential;
  DeformationProfile profile;
  std::optional<ChiCutoff> chi;
  int order = 4;
};

struct OperatorMatrix
{
  Eigen::MatrixXcd entries;
  Grid1D grid;
  OperatorTag tag = OperatorTag::H;
  OperatorParams params;
  // Half-bandwidth of entries; banded factorizations use it.
  int bandwidth = 0;

  Eigen::Index size() const { return entries.rows(); }
};

struct AssembleOptions
{
  int order = 4;
  // Drop the potential term (free deformed operator, used for the Neumann check).
  bool omit_potential = false;
};

// Assembles the requested operator. The deformed kinetic term is
// p_theta^2 = M G^T C G M with M = diag(phi'^(-1/2)) at nodes, C = diag(1/phi')
// at the staggered midpoints and G the staggered difference of matching order.
// H and Heps ignore theta; H and Htheta ignore eps.
OperatorMatrix assemble(OperatorTag tag, const Grid1D &grid, const Deformation &def,
                        const PotentialSpec &potential, double eps,
                        const std::optional<ChiCutoff> &chi = std::nullopt,
                        const AssembleOptions &opts = {});

// V(phi_theta(x_j)) at the nodes.
Eigen::VectorXcd potential_on_contour(const Grid1D &grid, const Deformation &def,
                                      const PotentialSpec &potential);

// chi(x_j) V(phi_theta(x_j)): the diagonal removed by the split operator.
Eigen::VectorXcd chi_potential_diagonal(const Grid1D &grid, const Deformation &def,
                                        const PotentialSpec &potential, const ChiCutoff &chi);

// phi_theta(x_j)^2 at the nodes.
Eigen::VectorXcd phi_squared(const Grid1D &grid, const Deformation &def);

// First-order form p_theta = -i (phi'^(-1) D1 - phi'' / (2 phi'^2)); kept as a
// cross-check of the symmetric p_theta^2 assembly.
Eigen::MatrixXcd p_theta_first_order(const Grid1D &grid, const Deformation &def, int order = 4);

}  // namespace cscap

#endif  // CSCAP_DISCRETIZATION_HPP
