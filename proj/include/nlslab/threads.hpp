#pragma once

namespace nlslab {

/// Worker count for parallel kernels: NLSLAB_THREADS when set to a positive
/// integer, otherwise the OpenMP default. Capped by set_worker_limit.
int worker_count();

/// Caps worker_count() for this process; 0 removes the cap.
void set_worker_limit(int limit);

}  // namespace nlslab
