// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_EIGENSOLVER_HPP
#define CSCAP_EIGENSOLVER_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cscap/discretization.hpp"

namespace cscap
{

struct EigOptions
{
  double tol = 1e-10;
  // Inverse-iteration sweeps per eigenvalue for the residual vectors.
  int max_iter = 3;
  Eigen::Index max_size = 4096;
  bool residuals = true;
};

struct SpectrumMeta
{
  std::string tag;
  cplx theta = 0.0;
  double eps = 0.0;
  int N = 0;
  double L = 0.0;
};

struct Spectrum
{
  std::vector<cplx> eigenvalues;
  // ||A v - lambda v|| / (||A|| ||v||); empty when residuals were not requested.
  std::vector<double> residuals;
  SpectrumMeta meta;

  std::size_t size() const { return eigenvalues.size(); }
};

// Sorts by (|z|, arg z) and permutes the residuals alongside.
void sort_spectrum(Spectrum &s);

// All eigenvalues via balanced Hessenberg QR (LAPACK zgeev). Residuals come
// from inverse iteration on the banded or dense shifted matrix.
// Throws ConvergenceFailure with the number of unconverged eigenvalues, or of
// pairs whose residual exceeds opts.tol.
Spectrum eig_dense(const Eigen::MatrixXcd &A, const EigOptions &opts = {}, int bandwidth = -1);
Spectrum eig_dense(const OperatorMatrix &A, const EigOptions &opts = {});

// LU factorization of A - zI, banded when the half-bandwidth is small.
class ShiftedSolver
{
public:
  ShiftedSolver(const Eigen::MatrixXcd &A, cplx z, int bandwidth = -1);
  ShiftedSolver(const OperatorMatrix &A, cplx z);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver &&) noexcept;
  ShiftedSolver &operator=(ShiftedSolver &&) noexcept;

  // X = (A - zI)^(-1) B.
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd &B) const;
  // X = (A - zI)^(-H) B.
  Eigen::MatrixXcd solve_adjoint(const Eigen::MatrixXcd &B) const;

  double rcond() const;
  bool banded() const;
  Eigen::Index size() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws NearSingular when the reciprocal condition estimate of A - zI is
// below machine epsilon.
Eigen::MatrixXcd solve_shifted(const OperatorMatrix &A, cplx z, const Eigen::MatrixXcd &B);
Eigen::MatrixXcd solve_shifted(const Eigen::MatrixXcd &A, cplx z, const Eigen::MatrixXcd &B,
                               int bandwidth = -1);

// tr (A - zI)^(-1).
cplx resolvent_trace(const OperatorMatrix &A, cplx z);
cplx resolvent_trace(const Eigen::MatrixXcd &A, cplx z, int bandwidth = -1);
cplx resolvent_trace(const ShiftedSolver &solver);

// Largest half-bandwidth of the nonzero pattern.
int detect_bandwidth(const Eigen::MatrixXcd &A);

}  // namespace cscap

#endif  // CSCAP_EIGENSOLVER_HPP
