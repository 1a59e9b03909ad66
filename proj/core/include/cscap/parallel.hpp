// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CSCAP_PARALLEL_HPP
#define CSCAP_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <future>
#include <vector>

namespace cscap
{

// Evaluates fn(0..n-1) with at most `jobs` concurrent tasks and returns the
// results in index order. Exceptions propagate from the lowest failing index.
template <class Fn>
auto parallel_map(std::size_t n, int jobs, Fn &&fn) -> std::vector<decltype(fn(std::size_t{}))>
{
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out;
  out.reserve(n);
  if (jobs <= 1 || n <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      out.push_back(fn(i));
    }
    return out;
  }
  const std::size_t width = static_cast<std::size_t>(jobs);
  for (std::size_t start = 0; start < n; start += width)
  {
    const std::size_t stop = std::min(n, start + width);
    std::vector<std::future<R>> batch;
    for (std::size_t i = start; i < stop; ++i)
    {
      batch.push_back(std::async(std::launch::async, [&fn, i] { return fn(i); }));
    }
    for (auto &f : batch)
    {
      out.push_back(f.get());
    }
  }
  return out;
}

}  // namespace cscap

#endif  // CSCAP_PARALLEL_HPP
