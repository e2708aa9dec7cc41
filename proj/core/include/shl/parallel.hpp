#pragma once

#include <cstddef>
#include <functional>

namespace shl {

/// Process-wide worker count used by the simulators and permutation tests.
/// Results never depend on it: all randomness is keyed by stream id.
void set_worker_count(unsigned workers) noexcept;
unsigned worker_count() noexcept;

/// Calls body(i) for every i in [0, count), spread over worker_count()
/// threads. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& body);

}  // namespace shl
