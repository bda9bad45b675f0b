#include "tcn/trace.hpp"

namespace tcn {

ExecutionTrace& ExecutionTrace::operator+=(const ExecutionTrace& other) {
    dma_invocations += other.dma_invocations;
    elements_copied += other.elements_copied;
    mm_iterations += other.mm_iterations;
    macgroup_ops += other.macgroup_ops;
    conv_iterations += other.conv_iterations;
    gather_cycles_event += other.gather_cycles_event;
    mm_cycles_event += other.mm_cycles_event;
    total_cycles_event += other.total_cycles_event;
    return *this;
}

} // namespace tcn
