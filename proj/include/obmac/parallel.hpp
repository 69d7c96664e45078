#pragma once

#include <cstddef>
#include <functional>

namespace obmac {

/// Index-sharded parallel loop. Results must not depend on execution
/// order; determinism comes from per-index work, not scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

int default_workers();

}  // namespace obmac
