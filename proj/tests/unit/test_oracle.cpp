// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "cscap/errors.hpp"
#include "cscap/oracle.hpp"
#include "cscap/special_functions.hpp"

using namespace cscap;

namespace
{

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Bisection on the classical even/odd matching conditions of a square well,
// kappa = q tan(q a) and kappa = -q cot(q a) with q^2 + kappa^2 = -V0.
std::vector<double> transcendental_bound_states(double V0, double a)
{
  const double q_max = std::sqrt(-V0);
  std::vector<double> out;
  for (int parity = 0; parity < 2; ++parity)
  {
    auto f = [&](double q) {
      const double kappa = std::sqrt(std::max(0.0, -V0 - q * q));
      return parity == 0 ? q * std::sin(q * a) - kappa * std::cos(q * a)
                         : q * std::cos(q * a) + kappa * std::sin(q * a);
    };
    const int n = 20000;
    for (int i = 0; i < n; ++i)
    {
      double lo = q_max * i / n, hi = q_max * (i + 1) / n;
      if (f(lo) * f(hi) > 0.0 || f(lo) == 0.0)
      {
        continue;
      }
      for (int it = 0; it < 200; ++it)
      {
        const double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
      }
      const double q = 0.5 * (lo + hi);
      if (q > 1e-9 && q < q_max * (1.0 - 1e-12))
      {
        out.push_back(q * q + V0);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Local minimum of |F| by a shrinking compass search.
cplx polish_minimum(const PotentialSpec &v, cplx k, double step)
{
  double best = std::abs(entire_determinant(v, k));
  while (step > 1e-13)
  {
    bool moved = false;
    for (cplx d : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)})
    {
      const cplx c = k + step * d;
      const double f = std::abs(entire_determinant(v, c));
      if (f < best)
      {
        best = f;
        k = c;
        moved = true;
      }
    }
    if (!moved)
    {
      step *= 0.5;
    }
  }
  return k;
}

}  // namespace

TEST_CASE("special functions")
{
  CHECK(std::abs(gamma_complex(5.0) - 24.0) < 1e-12);
  CHECK(std::abs(gamma_complex(0.5) - std::sqrt(kPi)) < 1e-14);
  for (double x : {0.3, 1.7, 4.2, 9.9})
  {
    CHECK(lgamma_complex(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  }
  for (cplx z : {cplx(0.3, 0.7), cplx(-2.4, 1.1), cplx(3.0, -5.0)})
  {
    const cplx lhs = gamma_complex(z) * gamma_complex(1.0 - z);
    CHECK(std::abs(lhs - kPi / std::sin(kPi * z)) < 1e-11 * std::abs(lhs));
    CHECK(std::abs(gamma_complex(z + 1.0) - z * gamma_complex(z)) <
          1e-12 * std::abs(gamma_complex(z + 1.0)));
  }
  for (int n : {0, 1, 2, 7})
  {
    CHECK(std::abs(rgamma_complex(-double(n))) < 1e-14);
  }
}

TEST_CASE("closed-form CAP eigenvalues")
{
  const auto v = davies_spectrum(0.04, 2);
  CHECK(std::abs(v[0] - cplx(0.141421, -0.141421)) < 1e-6);
  CHECK(std::abs(v[1] - cplx(0.424264, -0.424264)) < 1e-6);
  const auto w = davies_spectrum(0.0004, 2);
  CHECK(std::abs(w[0] * 10.0 - v[0]) < 1e-15);
  CHECK_THROWS_AS(davies_spectrum(0.04, 0), ConstraintViolation);
}

TEST_CASE("square well bound states: determinant, shooting and transcendental condition")
{
  const SquareWell well{-10.0, 1.0};
  const PotentialSpec v(well);
  const auto shot = square_well_bound_states(well);
  const auto exact = transcendental_bound_states(well.V0, well.a);
  REQUIRE(shot.size() == exact.size());
  REQUIRE(shot.size() == 3);
  for (std::size_t i = 0; i < shot.size(); ++i)
  {
    CHECK(shot[i] == doctest::Approx(exact[i]).epsilon(1e-7));
    const cplx k = kI * std::sqrt(-exact[i]);
    CHECK(std::abs(resonance_determinant(v, k)) < 1e-8);
  }
  // Independent route: integration across the well is exact outside |x| > a.
  for (double e : exact)
  {
    CHECK(std::abs(determinant_ode(v, kI * std::sqrt(-e), 1.5, 1e-3)) < 1e-8);
  }
}

TEST_CASE("closed forms agree with direct integration")
{
  // Off the real axis one exterior solution is exponentially dominant, so the
  // integration interval is kept short enough for |Im k| X to stay moderate.
  const std::vector<cplx> ks = {cplx(0.7, 0.0), cplx(1.9, -0.3), cplx(-1.2, -0.6), cplx(2.5, 0.2)};
  for (const PotentialSpec &v : {PotentialSpec(SquareWell{-10.0, 1.0}), PotentialSpec(SquareWell{5.0, 0.8})})
  {
    for (cplx k : ks)
    {
      const cplx a = resonance_determinant(v, k);
      const cplx b = determinant_ode(v, k, 1.5, 1e-3);
      CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
  for (const PotentialSpec &v : {PotentialSpec(PoschlTeller{4.0}), PotentialSpec(PoschlTeller{-2.0})})
  {
    for (cplx k : ks)
    {
      if (std::abs(k.imag()) > 0.3)
      {
        continue;
      }
      const cplx a = resonance_determinant(v, k);
      const cplx b = determinant_ode(v, k, 15.0, 1e-3);
      CHECK(std::abs(a - b) < 1e-7 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("Poschl-Teller determinant inverts the transmission amplitude")
{
  const PotentialSpec v(PoschlTeller{4.0});
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int i = 0; i < 10; ++i)
  {
    const double k = u(rng);
    const cplx prod = resonance_determinant(v, k) * transmission_ode(v, k);
    CHECK(std::abs(prod - 1.0) < 1e-7);
  }
}

TEST_CASE("Poschl-Teller resonances")
{
  const PotentialSpec v(PoschlTeller{4.0});
  const KRegion region{-4.0, 4.0, -3.2, -0.1};
  const OracleResult r = find_resonances(v, region);
  CHECK(r.method == OracleMethod::determinant_roots);
  CHECK(static_cast<int>(r.values.size()) == zero_count(v, region));
  REQUIRE(r.values.size() == 6);
  REQUIRE(r.momenta.size() == r.values.size());
  CHECK(r.certified_digits >= 10);

  for (std::size_t i = 0; i < r.values.size(); ++i)
  {
    const cplx k = r.momenta[i];
    CHECK(std::abs(k * k - r.values[i]) < 1e-12 * std::abs(r.values[i]));
    CHECK(std::abs(entire_determinant(v, k)) < 1e-10);
    // Parity pairing k -> -conj(k).
    double best = 1e300;
    for (cplx m : r.momenta)
    {
      best = std::min(best, std::abs(m + std::conj(k)));
    }
    CHECK(best < 1e-9);
  }
  // Lowest pair: z = 3.5 -+ ... with Im k = -1/2.
  CHECK(std::abs(r.values[0].real() - 3.5) < 1e-9);
  CHECK(std::abs(std::abs(r.momenta[0].imag()) - 0.5) < 1e-9);

  SUBCASE("dense sampling locates the same zeros")
  {
    const double h = 0.05;
    std::vector<cplx> minima;
    auto F = [&](cplx k) { return std::abs(entire_determinant(v, k)); };
    for (double re = region.re_min + h; re < region.re_max; re += h)
    {
      for (double im = region.im_min + h; im < region.im_max; im += h)
      {
        const cplx k(re, im);
        const double f = F(k);
        bool local = true;
        for (cplx d : {cplx(h, 0), cplx(-h, 0), cplx(0, h), cplx(0, -h), cplx(h, h), cplx(-h, -h),
                       cplx(h, -h), cplx(-h, h)})
        {
          local = local && f < F(k + d);
        }
        if (local)
        {
          const cplx m = polish_minimum(v, k, h);
          if (F(m) < 1e-9)
          {
            minima.push_back(m);
          }
        }
      }
    }
    CHECK(minima.size() == r.momenta.size());
    for (cplx m : minima)
    {
      double best = 1e300;
      for (cplx k : r.momenta)
      {
        best = std::min(best, std::abs(m - k));
      }
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("zero-free regions")
{
  CHECK(find_resonances(PotentialSpec(PoschlTeller{4.0}), KRegion{0.2, 1.5, -0.4, -0.1}).values.empty());
  // V0 = 0: the free line has no resonances.
  const PotentialSpec flat(SquareWell{0.0, 1.0});
  CHECK(zero_count(flat, KRegion{-5.0, 5.0, -4.0, -0.2}) == 0);
  CHECK(find_resonances(flat, KRegion{-5.0, 5.0, -4.0, -0.2}).values.empty());
}

TEST_CASE("square well resonances are zeros of the integrated determinant")
{
  const PotentialSpec v(SquareWell{5.0, 1.0});
  const OracleResult r = find_resonances(v, KRegion{0.3, 6.0, -2.0, -0.05});
  REQUIRE(!r.values.empty());
  CHECK(static_cast<int>(r.values.size()) == zero_count(v, KRegion{0.3, 6.0, -2.0, -0.05}));
  for (cplx k : r.momenta)
  {
    const cplx d = resonance_determinant(v, k);
    CHECK(std::abs(d) < 1e-9);
    CHECK(std::abs(determinant_ode(v, k, 1.5, 1e-3)) < 1e-7);
  }
}

TEST_CASE("argument checks")
{
  const PotentialSpec v(PoschlTeller{4.0});
  CHECK_THROWS_AS(resonance_determinant(v, 0.0), EvaluationFailure);
  CHECK_THROWS_AS(resonance_determinant(PotentialSpec(GaussianBump{}), 1.0), ConstraintViolation);
  CHECK_THROWS_AS(find_resonances(v, KRegion{-1.0, 1.0, -1.0, 0.5}), ConstraintViolation);
  // A pole of Gamma(-ik) at k = -i.
  CHECK_THROWS_AS(resonance_determinant(v, cplx(0.0, -1.0)), EvaluationFailure);
}

TEST_CASE("oracle cache round trip")
{
  const std::string path = "oracle_cache_test.tsv";
  std::remove(path.c_str());
  const PotentialSpec v(PoschlTeller{4.0});
  const KRegion region{-4.0, 4.0, -1.2, -0.1};
  OracleResult fresh;
  {
    OracleCache cache(path);
    CHECK(cache.size() == 0);
    fresh = find_resonances_cached(v, region, &cache);
    cache.save();
  }
  OracleCache again(path);
  CHECK(again.size() == 1);
  const auto hit = again.lookup(OracleCache::key(v, region));
  REQUIRE(hit.has_value());
  REQUIRE(hit->values.size() == fresh.values.size());
  for (std::size_t i = 0; i < fresh.values.size(); ++i)
  {
    CHECK(hit->values[i] == fresh.values[i]);
  }
  CHECK(hit->certified_digits == fresh.certified_digits);
  CHECK(OracleCache::key(v, region) != OracleCache::key(PotentialSpec(PoschlTeller{3.0}), region));
  std::remove(path.c_str());
}
