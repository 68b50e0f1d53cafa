#pragma once

#include <functional>

namespace curesieve {

/// Worker count: CURE_SIEVE_THREADS if set to a positive integer, otherwise
/// all hardware threads. Read on every call so tests can vary it at runtime.
int worker_count();

/// Runs body(0..n-1) on a static block partition over worker_count() threads.
/// Callers must write results into per-index slots; any exception is rethrown
/// for the lowest failing index, so the outcome is independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace curesieve
