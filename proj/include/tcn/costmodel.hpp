#ifndef TCN_COSTMODEL_HPP
#define TCN_COSTMODEL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "tcn/hardware.hpp"
#include "tcn/kernels.hpp"
#include "tcn/layers.hpp"

namespace tcn {

// Closed-form cycle prediction for one kernel invocation:
//   total = sum over the most-loaded core's iterations of
//           (epsilon + gather(steps) + ceil(c_out/4) * mm_cyc)
// where gather(2) == gather_cyc below and a trailing odd step is charged as
// a half gather. In the exact-division regime this collapses to
//   core_iter * (epsilon + gather_cyc + mm_iter * mm_cyc).
struct CyclePrediction {
    double gather_cyc = 0.0; // per pair iteration
    double mm_cyc = 0.0;     // per matmul block
    double total_cyc = 0.0;
    std::int64_t core_iter = 0;
    std::int64_t mm_iter = 0;
};

// Conv iterations of the most-loaded core: ceil(ceil(t_out/n_cores)/2).
std::int64_t core_iter(int t_out, int n_cores);
// Matmul blocks per conv iteration: ceil(c_out/4).
std::int64_t mm_iter(int c_out);

// Per-pair-iteration gather cost: Im2col max(2k*alpha, 2k*c_in*beta),
// Indirect 2k*beta (offset stores), NoIm2col 0.
double gather_cycles(KernelVariant v, const ConvGeometry& g, const HardwareModel& hw);

// Per-block matmul cost. Direct buffers: gamma + delta*ceil(k_run*c_in/4)
// with k_run = k_eff for interleaved NoIm2col. Indirect:
// gamma + k*(gamma_prime + delta*ceil(c_in/4)).
double mm_cycles(KernelVariant v, const ConvGeometry& g, const HardwareModel& hw);

CyclePrediction layer_cycles(KernelVariant v, const ConvGeometry& g,
                             const HardwareModel& hw);

// layer_cycles for a tile of the layer: t_out/c_out overridden, halo and
// input span implied by the parent geometry.
CyclePrediction tile_cycles(KernelVariant v, const ConvGeometry& g,
                            int tile_t_out, int tile_c_out,
                            const HardwareModel& hw);

// All three variants ordered by predicted whole-layer cycles, ascending;
// ties break NoIm2col < Im2col < Indirect.
std::vector<std::pair<KernelVariant, double>>
rank_variants(const ConvGeometry& g, const HardwareModel& hw);

} // namespace tcn

#endif
