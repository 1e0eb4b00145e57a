#pragma once

namespace spreadspec {

/// Thread count for the OpenMP kernels. 0 means the OpenMP default.
int resolve_threads(int requested);

}  // namespace spreadspec
