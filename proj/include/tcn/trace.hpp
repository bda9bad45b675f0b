#ifndef TCN_TRACE_HPP
#define TCN_TRACE_HPP

#include <cstdint>

namespace tcn {

// Event counters recorded by an instrumented kernel run, plus cycle totals
// derived from those events with the hardware cost constants.
//
// Counters sum over all simulated cores. The cycle fields are a parallel
// makespan: per-core event cycles are accumulated independently and the
// most-loaded core's total is reported (gather/mm split taken from that same
// core, lowest core id on ties). The simulated-core partitioning depends only
// on the layer shape and hw.n_cores, never on how many host threads executed
// it, so traces are byte-stable across worker counts.
struct ExecutionTrace {
    std::uint64_t dma_invocations = 0; // DMA transfers issued by gathers
    std::uint64_t elements_copied = 0; // bytes written into gather buffers
    std::uint64_t mm_iterations = 0;   // matmul blocks executed
    std::uint64_t macgroup_ops = 0;    // 4-wide MAC groups (simulated SIMD dots)
    std::uint64_t conv_iterations = 0; // outer 2-time-step iterations

    double gather_cycles_event = 0.0;
    double mm_cycles_event = 0.0;
    double total_cycles_event = 0.0;

    // Sequential composition (tile after tile): counters and cycles both add.
    ExecutionTrace& operator+=(const ExecutionTrace& other);
};

} // namespace tcn

#endif
