// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cscap/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace cscap
{

namespace
{

using cplx = std::complex<double>;

constexpr double kG = 7.0;
constexpr std::array<double, 9> kLanczos = {
  0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
  771.32342877765313,   -176.61502916214059,   12.507343278686905,
  -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(z) for Re z >= 1/2.
cplx lanczos_log(cplx z)
{
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i)
  {
    x += kLanczos[i] / (z + static_cast<double>(i));
  }
  const cplx t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

bool nonpositive_integer(cplx z)
{
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

}  // namespace

cplx lgamma_complex(cplx z)
{
  if (z.real() < 0.5)
  {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - lanczos_log(1.0 - z);
  }
  return lanczos_log(z);
}

cplx gamma_complex(cplx z)
{
  if (nonpositive_integer(z))
  {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  if (z.real() < 0.5)
  {
    return std::numbers::pi / (std::sin(std::numbers::pi * z) * std::exp(lanczos_log(1.0 - z)));
  }
  return std::exp(lanczos_log(z));
}

cplx rgamma_complex(cplx z)
{
  if (nonpositive_integer(z))
  {
    return 0.0;
  }
  if (z.real() < 0.5)
  {
    return std::sin(std::numbers::pi * z) * std::exp(lanczos_log(1.0 - z)) / std::numbers::pi;
  }
  return std::exp(-lanczos_log(z));
}

}  // namespace cscap
