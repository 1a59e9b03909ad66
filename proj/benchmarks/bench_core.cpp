// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "cscap/discretization.hpp"
#include "cscap/eigensolver.hpp"
#include "cscap/oracle.hpp"
#include "cscap/spectra.hpp"

namespace
{

using namespace cscap;

OperatorMatrix make_operator(int N)
{
  const Deformation def{DeformationProfile{}};
  const Grid1D g = Grid1D::make(30.0, N);
  return assemble(OperatorTag::HepsTheta, g, def, PotentialSpec(PoschlTeller{}), 0.01);
}

void BM_Assemble(benchmark::State &state)
{
  const Deformation def{DeformationProfile{}};
  const Grid1D g = Grid1D::make(30.0, static_cast<int>(state.range(0)));
  const PotentialSpec v(PoschlTeller{});
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(assemble(OperatorTag::HepsTheta, g, def, v, 0.01));
  }
}
BENCHMARK(BM_Assemble)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_EigDense(benchmark::State &state)
{
  const auto A = make_operator(static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(eig_dense(A));
  }
}
BENCHMARK(BM_EigDense)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ResolventTrace(benchmark::State &state)
{
  const auto A = make_operator(static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(resolvent_trace(A, cplx(3.0, -1.0)));
  }
}
BENCHMARK(BM_ResolventTrace)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_MultiplicityDirect(benchmark::State &state)
{
  const auto A = make_operator(800);
  const ContourSpec c{cplx(3.5, -1.9), 0.2, static_cast<int>(state.range(0))};
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(multiplicity_direct(A, c));
  }
}
BENCHMARK(BM_MultiplicityDirect)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_OracleRoots(benchmark::State &state)
{
  const PotentialSpec v(PoschlTeller{});
  const KRegion region{-4.0, 4.0, -3.2, -0.1};
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(find_resonances(v, region));
  }
}
BENCHMARK(BM_OracleRoots)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
