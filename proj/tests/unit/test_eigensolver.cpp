// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cscap/discretization.hpp"
#include "cscap/eigensolver.hpp"
#include "cscap/errors.hpp"
#include "cscap/oracle.hpp"

using namespace cscap;

namespace
{

OperatorMatrix pt_operator(int N, double eps = 0.0)
{
  DeformationProfile p;
  p.theta = {0.0, 0.4};
  return assemble(OperatorTag::HepsTheta, Grid1D::make(20.0, N), Deformation(p),
                  PotentialSpec(PoschlTeller{4.0}), eps);
}

cplx eigen_sum(const Spectrum &s, cplx z)
{
  cplx sum = 0.0;
  for (cplx l : s.eigenvalues)
  {
    sum += 1.0 / (l - z);
  }
  return sum;
}

}  // namespace

TEST_CASE("diagonal matrix")
{
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
  A(0, 0) = 1.0;
  A(1, 1) = cplx(0.0, 2.0);
  A(2, 2) = -3.0;
  const Spectrum s = eig_dense(A);
  REQUIRE(s.size() == 3);
  CHECK(s.eigenvalues[0] == cplx(1.0));
  CHECK(s.eigenvalues[1] == cplx(0.0, 2.0));
  CHECK(s.eigenvalues[2] == cplx(-3.0));
  for (double r : s.residuals)
  {
    CHECK(r <= 1e-15);
  }
}

TEST_CASE("Dirichlet box spectrum")
{
  const double L = 10.0;
  const Grid1D g = Grid1D::make(L, 400);
  const auto A = assemble(OperatorTag::H, g, Deformation(DeformationProfile{}),
                          PotentialSpec(Free{}), 0.0);
  const Spectrum s = eig_dense(A);
  for (int k = 1; k <= 5; ++k)
  {
    const double exact = std::pow(k * std::numbers::pi / (2.0 * L), 2);
    CHECK(s.eigenvalues[k - 1].real() == doctest::Approx(exact).epsilon(1e-6));
    CHECK(std::abs(s.eigenvalues[k - 1].imag()) < 1e-12);
  }
}

TEST_CASE("free CAP operator reproduces the closed-form eigenvalues")
{
  DeformationProfile p;
  p.theta = {0.0, 0.2};
  const auto A = assemble(OperatorTag::HepsTheta, Grid1D::make(20.0, 800), Deformation(p),
                          PotentialSpec(Free{}), 0.04);
  const Spectrum s = eig_dense(A);
  const auto ref = davies_spectrum(0.04, 5);
  for (int k = 0; k < 5; ++k)
  {
    CHECK(std::abs(s.eigenvalues[k] - ref[k]) < 1e-3 * std::abs(ref[k]));
  }
}

TEST_CASE("backward error of every reported pair")
{
  const Spectrum s = eig_dense(pt_operator(300, 0.01));
  REQUIRE(s.residuals.size() == s.size());
  CHECK(s.size() == 300);
  CHECK(*std::max_element(s.residuals.begin(), s.residuals.end()) <= 1e-10);
  for (std::size_t j = 1; j < s.size(); ++j)
  {
    CHECK(std::abs(s.eigenvalues[j - 1]) <= std::abs(s.eigenvalues[j]));
  }
}

TEST_CASE("size cap")
{
  EigOptions o;
  o.max_size = 100;
  CHECK_THROWS_AS(eig_dense(pt_operator(200), o), ConstraintViolation);
}

TEST_CASE("similarity invariance under diagonal scaling")
{
  const auto A = pt_operator(200, 0.02);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::VectorXcd d(A.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
  {
    d[i] = u(rng);
  }
  const Eigen::MatrixXcd B = d.asDiagonal() * A.entries * d.cwiseInverse().asDiagonal();
  const Spectrum sa = eig_dense(A);
  const Spectrum sb = eig_dense(B, {}, A.bandwidth);
  REQUIRE(sa.size() == sb.size());
  for (cplx z : sa.eigenvalues)
  {
    double best = 1e300;
    for (cplx w : sb.eigenvalues)
    {
      best = std::min(best, std::abs(z - w));
    }
    CHECK(best < 1e-7 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("shifted solves")
{
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(4, 4);
  CHECK((solve_shifted(I, 0.0, I) - I).cwiseAbs().maxCoeff() == 0.0);

  const auto A = pt_operator(200);
  const cplx z(1.0, 0.5);
  Eigen::MatrixXcd B = A.entries;
  B.diagonal().array() -= z;
  const Eigen::MatrixXcd X = solve_shifted(A, z, B);
  CHECK((X - Eigen::MatrixXcd::Identity(200, 200)).cwiseAbs().maxCoeff() < 1e-10);

  // Banded and dense factorizations agree.
  const Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Identity(200, 3);
  const ShiftedSolver banded(A, z);
  const ShiftedSolver dense(A.entries, z, static_cast<int>(A.size()));
  CHECK(banded.banded());
  CHECK_FALSE(dense.banded());
  CHECK((banded.solve(rhs) - dense.solve(rhs)).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((banded.solve_adjoint(rhs) - dense.solve_adjoint(rhs)).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(banded.rcond() > 0.0);

  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  CHECK_THROWS_AS(solve_shifted(D, 1.0, Eigen::MatrixXcd::Identity(2, 2)), NearSingular);
}

TEST_CASE("resolvent trace")
{
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  CHECK(std::abs(resolvent_trace(D, 0.0) - 1.5) < 1e-15);

  const auto A = pt_operator(300, 0.02);
  const Spectrum s = eig_dense(A);

  // Far out along a ray the trace behaves like -N / z.
  const cplx dir = std::polar(1.0, 0.7);
  const cplx far = 1e7 * dir;
  CHECK(std::abs(resolvent_trace(A, far) * far + 300.0) < 1.0);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(-2.0, 8.0), im(-3.0, 3.0);
  for (int k = 0; k < 10; ++k)
  {
    const cplx z(re(rng), im(rng));
    const cplx t = resolvent_trace(A, z);
    const cplx e = eigen_sum(s, z);
    CHECK(std::abs(t - e) < 1e-8 * std::abs(e));
  }
}

TEST_CASE("bandwidth detection")
{
  const auto A = pt_operator(100);
  CHECK(detect_bandwidth(A.entries) == A.bandwidth);
  // Fourth-order staggered stencil: G spans four nodes, G^T G seven.
  CHECK(A.bandwidth == 3);
}
