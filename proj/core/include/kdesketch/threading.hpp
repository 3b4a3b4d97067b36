#pragma once

#include <cstddef>
#include <functional>

namespace kdesketch {

// Resolves a requested thread count: 0 means "use the KDE_SKETCH_THREADS
// environment variable if set, else hardware concurrency".
unsigned effective_threads(unsigned requested = 0);

// Process-wide default used by builds and statistical suites.
void set_default_threads(unsigned n);
unsigned default_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; results must
// not depend on execution order (all our uses write to disjoint slots or
// feed an order-insensitive stage).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace kdesketch
