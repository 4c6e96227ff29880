// Copyright 2026 The entdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file    runner.hpp
 * @brief   Monte Carlo driver over a sweep grid.
 *
 * Cell c (in SweepConfig::cells() order) owns trial indices
 * [c * n, (c + 1) * n) with n = samples_per_cell. Work is split into blocks of
 * kBlockSize trials; each block fills its own accumulator and blocks are
 * merged in index order, so the output does not depend on the worker count
 * or on scheduling.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "entdetect/analytics.hpp"
#include "entdetect/criteria.hpp"
#include "entdetect/harness/config.hpp"
#include "entdetect/harness/parallel.hpp"
#include "entdetect/sampling.hpp"

namespace entdetect::harness {

inline constexpr std::int64_t kBlockSize = 256;

/// Evaluates trials [first, last) of one cell.
inline SweepAccumulator run_block(const CellSpec& cell, std::uint64_t master_seed, std::uint64_t trial_base,
                                  std::int64_t first, std::int64_t last, double eps) {
  SweepAccumulator acc(eps);
  for (std::int64_t i = first; i < last; ++i) {
    const SampleSpec spec{cell.d1, cell.d2, cell.k, master_seed, trial_base + static_cast<std::uint64_t>(i)};
    acc.add(sample_and_evaluate(spec, eps));
  }
  return acc;
}

/// Runs every cell of the configuration; returns one SweepStats per cell.
/// `on_cell_done`, when set, is called from the calling thread after all work finishes.
inline std::vector<SweepStats> run_sweep(const SweepConfig& config, int workers,
                                         const std::function<void(const SweepStats&)>& on_cell_done = {}) {
  config.validate();
  const std::vector<CellSpec> cells = config.cells();
  const std::int64_t n = config.samples_per_cell;
  const std::int64_t blocks_per_cell = (n + kBlockSize - 1) / kBlockSize;

  struct Task {
    std::size_t cell;
    std::int64_t first;
    std::int64_t last;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::int64_t b = 0; b < blocks_per_cell; ++b)
      tasks.push_back({c, b * kBlockSize, std::min(n, (b + 1) * kBlockSize)});

  std::vector<SweepAccumulator> partial(tasks.size(), SweepAccumulator(config.eps));
  parallel_for(tasks.size(), workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::uint64_t base = static_cast<std::uint64_t>(task.cell) * static_cast<std::uint64_t>(n);
    partial[t] = run_block(cells[task.cell], config.master_seed, base, task.first, task.last, config.eps);
  });

  std::vector<SweepStats> out;
  out.reserve(cells.size());
  std::size_t t = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepAccumulator acc(config.eps);
    for (std::int64_t b = 0; b < blocks_per_cell; ++b, ++t) acc.merge(partial[t]);
    out.push_back(acc.finish());
    if (on_cell_done) on_cell_done(out.back());
  }
  return out;
}

}  // namespace entdetect::harness
