// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_SPECIAL_FUNCTIONS_HPP
#define CSCAP_SPECIAL_FUNCTIONS_HPP

#include <complex>

namespace cscap
{

// Lanczos approximation (g = 7, 9 terms) with reflection for Re z < 1/2.
std::complex<double> lgamma_complex(std::complex<double> z);
std::complex<double> gamma_complex(std::complex<double> z);
// 1 / Gamma(z); entire, exactly zero at the nonpositive integers.
std::complex<double> rgamma_complex(std::complex<double> z);

}  // namespace cscap

#endif  // CSCAP_SPECIAL_FUNCTIONS_HPP
