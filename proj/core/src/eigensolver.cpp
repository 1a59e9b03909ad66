// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/eigensolver.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include "cscap/errors.hpp"

namespace cscap
{

namespace
{

double norm1(const Eigen::MatrixXcd &A)
{
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

// y = A x using only the band |i - j| <= bw.
Eigen::VectorXcd band_multiply(const Eigen::MatrixXcd &A, const Eigen::VectorXcd &x, int bw)
{
  const Eigen::Index n = A.rows();
  if (bw < 0 || bw >= n)
  {
    return A * x;
  }
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
  {
    const Eigen::Index lo = std::max<Eigen::Index>(0, j - bw);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, j + bw);
    y.segment(lo, hi - lo + 1) += A.col(j).segment(lo, hi - lo + 1) * x[j];
  }
  return y;
}

bool arg_less(cplx a, cplx b)
{
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb)
  {
    return ma < mb;
  }
  return std::arg(a) < std::arg(b);
}

}  // namespace

struct ShiftedSolver::Impl
{
  bool banded = false;
  lapack_int n = 0;
  lapack_int kl = 0;
  lapack_int ku = 0;
  lapack_int ldab = 0;
  std::vector<cplx> lu;
  std::vector<lapack_int> ipiv;
  double anorm = 0.0;
  double rcond = 0.0;
  bool singular = false;
  std::once_flag rcond_once;

  void estimate_rcond()
  {
    if (singular)
    {
      rcond = 0.0;
      return;
    }
    lapack_int info;
    if (banded)
    {
      info = LAPACKE_zgbcon(LAPACK_COL_MAJOR, '1', n, kl, ku, lu.data(), ldab, ipiv.data(),
                            anorm, &rcond);
    }
    else
    {
      info = LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
    }
    if (info != 0)
    {
      rcond = 0.0;
    }
  }

  Eigen::MatrixXcd solve(const Eigen::MatrixXcd &B, char trans) const
  {
    if (B.rows() != n)
    {
      throw ConstraintViolation("right-hand side has the wrong number of rows");
    }
    if (singular)
    {
      throw NearSingular(0.0, "shifted matrix is exactly singular");
    }
    Eigen::MatrixXcd X = B;
    const lapack_int nrhs = static_cast<lapack_int>(X.cols());
    if (nrhs == 0)
    {
      return X;
    }
    lapack_int info;
    if (banded)
    {
      info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, trans, n, kl, ku, nrhs, lu.data(), ldab,
                            ipiv.data(), X.data(), n);
    }
    else
    {
      info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, trans, n, nrhs, lu.data(), n, ipiv.data(),
                            X.data(), n);
    }
    if (info != 0)
    {
      throw ConvergenceFailure(0, "LAPACK triangular solve failed with info " +
                                    std::to_string(info));
    }
    return X;
  }
};

ShiftedSolver::ShiftedSolver(const Eigen::MatrixXcd &A, cplx z, int bandwidth)
  : impl_(std::make_unique<Impl>())
{
  auto &s = *impl_;
  s.n = static_cast<lapack_int>(A.rows());
  if (A.rows() != A.cols())
  {
    throw ConstraintViolation("shifted solve requires a square matrix");
  }
  const int bw = bandwidth < 0 ? detect_bandwidth(A) : bandwidth;
  s.banded = bw < s.n / 4;
  s.ipiv.resize(s.n);

  lapack_int info;
  if (s.banded)
  {
    s.kl = s.ku = bw;
    s.ldab = 2 * s.kl + s.ku + 1;
    s.lu.assign(static_cast<std::size_t>(s.ldab) * s.n, cplx(0.0));
    for (lapack_int j = 0; j < s.n; ++j)
    {
      const lapack_int lo = std::max<lapack_int>(0, j - s.ku);
      const lapack_int hi = std::min<lapack_int>(s.n - 1, j + s.kl);
      double colsum = 0.0;
      for (lapack_int i = lo; i <= hi; ++i)
      {
        const cplx a = i == j ? A(i, j) - z : A(i, j);
        s.lu[static_cast<std::size_t>(j) * s.ldab + (s.kl + s.ku + i - j)] = a;
        colsum += std::abs(a);
      }
      s.anorm = std::max(s.anorm, colsum);
    }
    info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, s.n, s.n, s.kl, s.ku, s.lu.data(), s.ldab,
                          s.ipiv.data());
  }
  else
  {
    Eigen::MatrixXcd Az = A;
    Az.diagonal().array() -= z;
    s.anorm = norm1(Az);
    s.lu.assign(Az.data(), Az.data() + Az.size());
    info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, s.n, s.n, s.lu.data(), s.n, s.ipiv.data());
  }
  if (info < 0)
  {
    throw ConvergenceFailure(0, "LAPACK factorization rejected argument " +
                                  std::to_string(-info));
  }
  if (info > 0)
  {
    s.singular = true;
    s.rcond = 0.0;
    return;
  }
}

ShiftedSolver::ShiftedSolver(const OperatorMatrix &A, cplx z)
  : ShiftedSolver(A.entries, z, A.bandwidth)
{
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver &&) noexcept = default;
ShiftedSolver &ShiftedSolver::operator=(ShiftedSolver &&) noexcept = default;

Eigen::MatrixXcd ShiftedSolver::solve(const Eigen::MatrixXcd &B) const
{
  return impl_->solve(B, 'N');
}

Eigen::MatrixXcd ShiftedSolver::solve_adjoint(const Eigen::MatrixXcd &B) const
{
  return impl_->solve(B, 'C');
}

double ShiftedSolver::rcond() const
{
  std::call_once(impl_->rcond_once, [this] { impl_->estimate_rcond(); });
  return impl_->rcond;
}

bool ShiftedSolver::banded() const
{
  return impl_->banded;
}

Eigen::Index ShiftedSolver::size() const
{
  return impl_->n;
}

int detect_bandwidth(const Eigen::MatrixXcd &A)
{
  int bw = 0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
  {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
      if (A(i, j) != cplx(0.0))
      {
        bw = std::max(bw, static_cast<int>(std::abs(i - j)));
      }
    }
  }
  return bw;
}

void sort_spectrum(Spectrum &s)
{
  std::vector<std::size_t> idx(s.eigenvalues.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return arg_less(s.eigenvalues[a], s.eigenvalues[b]);
  });
  std::vector<cplx> ev(idx.size());
  std::vector<double> res(s.residuals.empty() ? 0 : idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
  {
    ev[k] = s.eigenvalues[idx[k]];
    if (!res.empty())
    {
      res[k] = s.residuals[idx[k]];
    }
  }
  s.eigenvalues = std::move(ev);
  s.residuals = std::move(res);
}

Spectrum eig_dense(const Eigen::MatrixXcd &A, const EigOptions &opts, int bandwidth)
{
  const Eigen::Index n = A.rows();
  if (n != A.cols())
  {
    throw ConstraintViolation("eig_dense requires a square matrix");
  }
  if (n > opts.max_size)
  {
    std::ostringstream os;
    os << "matrix size " << n << " exceeds the dense eigensolver cap " << opts.max_size;
    throw ConstraintViolation(os.str());
  }
  Spectrum out;
  out.meta.N = static_cast<int>(n);
  if (n == 0)
  {
    return out;
  }
  const int bw = bandwidth < 0 ? detect_bandwidth(A) : bandwidth;
  const bool banded = bw < n / 4;
  const bool want_vectors = opts.residuals && !banded;

  Eigen::MatrixXcd work = A;
  std::vector<cplx> w(n);
  Eigen::MatrixXcd vr;
  if (want_vectors)
  {
    vr.resize(n, n);
  }
  const lapack_int ln = static_cast<lapack_int>(n);
  cplx dummy;
  const lapack_int info =
    LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', ln, work.data(), ln,
                  w.data(), &dummy, 1, want_vectors ? vr.data() : &dummy, want_vectors ? ln : 1);
  if (info < 0)
  {
    throw ConvergenceFailure(0, "zgeev rejected argument " + std::to_string(-info));
  }
  if (info > 0)
  {
    std::ostringstream os;
    os << "QR iteration failed: " << info << " of " << n << " eigenvalues did not converge";
    throw ConvergenceFailure(static_cast<std::size_t>(info), os.str());
  }
  out.eigenvalues = w;

  if (opts.residuals)
  {
    const double anorm = norm1(A);
    out.residuals.resize(n);
    std::size_t failed = 0;
    if (want_vectors)
    {
      for (Eigen::Index k = 0; k < n; ++k)
      {
        const Eigen::VectorXcd v = vr.col(k);
        out.residuals[k] = (A * v - w[k] * v).norm() / (anorm * v.norm());
      }
    }
    else
    {
      std::mt19937_64 rng(0x5eed);
      std::normal_distribution<double> nd;
      Eigen::VectorXcd start(n);
      for (Eigen::Index i = 0; i < n; ++i)
      {
        start[i] = cplx(nd(rng), nd(rng));
      }
      const cplx nudge = std::polar(anorm * std::ldexp(1.0, -44), 0.7);
      for (Eigen::Index k = 0; k < n; ++k)
      {
        ShiftedSolver solver(A, w[k] + nudge, bw);
        Eigen::VectorXcd v = start;
        // Keep the best sweep: on strongly non-normal matrices later sweeps
        // can lose accuracy, and any vector certifies its own residual.
        double r = std::numeric_limits<double>::infinity();
        for (int it = 0; it < std::max(1, opts.max_iter); ++it)
        {
          v = solver.solve(v);
          v /= v.norm();
          r = std::min(r, (band_multiply(A, v, bw) - w[k] * v).norm() / anorm);
          if (r <= 1e-3 * opts.tol)
          {
            break;
          }
        }
        out.residuals[k] = r;
      }
    }
    for (double r : out.residuals)
    {
      if (!(r <= opts.tol))
      {
        ++failed;
      }
    }
    if (failed > 0)
    {
      std::ostringstream os;
      os << failed << " eigenpairs exceed the residual tolerance " << opts.tol;
      throw ConvergenceFailure(failed, os.str());
    }
  }
  sort_spectrum(out);
  return out;
}

Spectrum eig_dense(const OperatorMatrix &A, const EigOptions &opts)
{
  Spectrum s = eig_dense(A.entries, opts, A.bandwidth);
  s.meta.tag = to_string(A.tag);
  s.meta.theta = A.params.theta;
  s.meta.eps = A.params.eps;
  s.meta.N = A.grid.N;
  s.meta.L = A.grid.L;
  return s;
}

Eigen::MatrixXcd solve_shifted(const Eigen::MatrixXcd &A, cplx z, const Eigen::MatrixXcd &B,
                               int bandwidth)
{
  ShiftedSolver solver(A, z, bandwidth);
  if (!(solver.rcond() >= DBL_EPSILON))
  {
    std::ostringstream os;
    os << "A - zI is numerically singular at z = " << z << " (rcond " << solver.rcond() << ")";
    throw NearSingular(solver.rcond(), os.str());
  }
  return solver.solve(B);
}

Eigen::MatrixXcd solve_shifted(const OperatorMatrix &A, cplx z, const Eigen::MatrixXcd &B)
{
  return solve_shifted(A.entries, z, B, A.bandwidth);
}

cplx resolvent_trace(const ShiftedSolver &solver)
{
  if (!(solver.rcond() >= DBL_EPSILON))
  {
    throw NearSingular(solver.rcond(), "resolvent trace requested on the spectrum");
  }
  const Eigen::Index n = solver.size();
  constexpr Eigen::Index block = 64;
  cplx tr = 0.0;
  for (Eigen::Index j0 = 0; j0 < n; j0 += block)
  {
    const Eigen::Index m = std::min(block, n - j0);
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(n, m);
    for (Eigen::Index k = 0; k < m; ++k)
    {
      E(j0 + k, k) = 1.0;
    }
    const Eigen::MatrixXcd X = solver.solve(E);
    for (Eigen::Index k = 0; k < m; ++k)
    {
      tr += X(j0 + k, k);
    }
  }
  return tr;
}

cplx resolvent_trace(const Eigen::MatrixXcd &A, cplx z, int bandwidth)
{
  return resolvent_trace(ShiftedSolver(A, z, bandwidth));
}

cplx resolvent_trace(const OperatorMatrix &A, cplx z)
{
  return resolvent_trace(A.entries, z, A.bandwidth);
}

}  // namespace cscap
