#pragma once

#include <omp.h>

namespace glsync::detail {

/// 0 selects the OpenMP default team size.
inline int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

} // namespace glsync::detail
