#pragma once

#include <optional>

namespace fidtrust {

/// Number of worker threads the OpenMP kernels will use.
int thread_count();

/// Sets the worker count; values < 1 are ignored.
void set_thread_count(int n);

/// Resolves a thread request: explicit value first, then FIDTRUST_THREADS,
/// otherwise the OpenMP default. Returns the count that was applied.
int configure_threads(std::optional<int> requested);

}  // namespace fidtrust
