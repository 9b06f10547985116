#pragma once

#include <cstddef>
#include <functional>

namespace uqsup {

// Worker count: hardware concurrency, capped by UQSUP_THREADS when set.
std::size_t thread_count();

// Runs body(begin, end) over disjoint chunks of [0, n). Chunks never share an
// index, so per-index results do not depend on the schedule.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace uqsup
