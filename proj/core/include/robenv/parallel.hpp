#pragma once

#include <cstddef>
#include <functional>

namespace robenv {

// Worker count: explicit request if > 0, else ROBUSTNESS_ENVELOPE_THREADS,
// else hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

// Runs body(begin, end, chunk_index) over [0, count) split into `chunks`
// contiguous pieces. Chunk boundaries depend only on (count, chunks), so
// callers that merge per-chunk results in chunk order get identical output
// for any thread count.
void parallel_chunks(std::size_t count, std::size_t chunks, unsigned threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace robenv
