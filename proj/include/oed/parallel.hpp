// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "oed/types.hpp"

namespace oed::par {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// hardware default. Set once by the CLI --threads flag.
void set_max_threads(int count);
int max_threads();

/// Runs fn(i) for i in [0, n) on up to max_threads() workers. Work items must
/// be independent; results should be written to per-index slots so the outcome
/// does not depend on the schedule. Exceptions from workers are rethrown.
void parallel_for(Index n, const std::function<void(Index)>& fn);

}  // namespace oed::par
