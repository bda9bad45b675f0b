#ifndef TCN_HARDWARE_HPP
#define TCN_HARDWARE_HPP

#include <cstddef>

namespace tcn {

// Abstract target: a cluster of n_cores workers sharing a small L1 scratchpad
// under a larger L2, plus the cost constants of the cycle model.
//   alpha    per-DMA-invocation cost
//   beta     per-byte copy / per-store cost
//   gamma    matmul block setup cost
//   delta    cost per 4-wide MAC group
//   epsilon  per-outer-iteration loop overhead
//   gamma_prime  per-tap segment overhead of the indirect matmul
// offset_bytes is the width of one indirect-buffer entry.
struct HardwareModel {
    int n_cores = 8;
    std::size_t l1_bytes = 65536;
    std::size_t l2_bytes = 4194304;
    double alpha = 10.0;
    double beta = 0.25;
    double gamma = 8.0;
    double delta = 1.0;
    double epsilon = 20.0;
    double gamma_prime = 12.0;
    int offset_bytes = 4;

    void validate() const;
};

} // namespace tcn

#endif
