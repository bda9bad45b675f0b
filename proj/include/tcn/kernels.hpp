#ifndef TCN_KERNELS_HPP
#define TCN_KERNELS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcn/hardware.hpp"
#include "tcn/layers.hpp"
#include "tcn/tensor.hpp"
#include "tcn/trace.hpp"

namespace tcn {

// The three data-access strategies of the convolution engine:
//   NoIm2col  direct reads, needs consecutive taps (d == 1, or d > 1 run
//             through zero-interleaved weights)
//   Im2col    copies the k dilated taps of each output step into a private
//             contiguous buffer before the matmul
//   Indirect  stores k base offsets per output step and walks them inside
//             the matmul as per-tap segment dots
enum class KernelVariant { NoIm2col, Im2col, Indirect };

const char* to_string(KernelVariant v);
KernelVariant parse_variant(const std::string& name);

// Spreads a k-tap filter of dilation d onto a dense (k-1)*d + 1 grid:
// chronological tap j of the result carries original tap j/d when d divides
// j, zero otherwise. The layer then runs as an undilated filter.
ConvWeights zero_interleave_weights(const ConvWeights& w, int d);

// Entry value marking an out-of-range (causal padding) tap in an indirect
// buffer; the matmul substitutes a shared zero row.
constexpr std::int32_t kZeroRowOffset = -1;

// Per-core staging area for one pair of output steps. Im2col mode fills
// `bytes` (k*c_in gathered values per step), indirect mode fills `offsets`
// (k flat element offsets per step, oldest tap first in both).
struct GatherBuffers {
    int steps = 0; // 1 or 2
    std::array<std::vector<std::int8_t>, 2> bytes;
    std::array<std::vector<std::int32_t>, 2> offsets;
};

// t_first is an output-step index; steps in {1, 2} (a trailing odd step is
// gathered alone). Out-of-range taps are zero-filled / sentinel-marked.
GatherBuffers gather_im2col(const QuantTensorTC& x, const ConvGeometry& g,
                            int t_first, int steps, ExecutionTrace& trace);
GatherBuffers gather_indirect(const QuantTensorTC& x, const ConvGeometry& g,
                              int t_first, int steps, ExecutionTrace& trace);

// Unrolled matmul atom: up to 4 weight rows against up to 2 gathered inputs,
// int32 accumulators in row-major [row][input] order. `len` is the full dot
// length; macgroup accounting pads it to a multiple of 4.
void matmul_block(const std::int8_t* const* rows, int n_rows,
                  const std::int8_t* const* inputs, int n_inputs, int len,
                  std::int32_t* acc, ExecutionTrace& trace);

// Indirect form: each input is an array of k offsets into x (kZeroRowOffset
// selects zero_row) and the dot is k segment dots of length c_in.
void matmul_block_indirect(const std::int8_t* const* rows, int n_rows,
                           const std::int8_t* x_data,
                           const std::int32_t* const* offsets, int n_inputs,
                           int k, int c_in, const std::int8_t* zero_row,
                           std::int32_t* acc, ExecutionTrace& trace);

// Full 4x2 block, the shape the engine runs in its steady state.
std::array<std::int32_t, 8> matmul_4x2(const std::int8_t* const rows[4],
                                       const std::int8_t* const inputs[2],
                                       int len, ExecutionTrace& trace);

// L1 working set of one kernel invocation, in bytes.
struct MemoryFootprint {
    std::size_t input = 0;
    std::size_t output = 0;
    std::size_t weights = 0; // interleaved size for NoIm2col with d > 1
    std::size_t gather = 0;  // all n_cores worth of staging buffers
    std::size_t total() const { return input + output + weights + gather; }
};

MemoryFootprint memory_footprint(KernelVariant v, const ConvGeometry& g,
                                 const HardwareModel& hw);
// Footprint of one (tile_t_out x tile_c_out) tile including its causal input
// halo; clip_at_start drops the part of the halo that falls before t = 0.
MemoryFootprint memory_footprint_tile(KernelVariant v, const ConvGeometry& g,
                                      const HardwareModel& hw, int tile_t_out,
                                      int tile_c_out, bool clip_at_start);

// Tile window for running a kernel on a slice of a longer sequence:
// output j anchors at slice time first_anchor + j*stride. Whole-layer runs
// use {0, g.t_out()}.
struct ConvWindow {
    int first_anchor = 0;
    int n_out = -1; // -1: derive from geometry
};

// Executes one convolution layer with the chosen variant. Output is
// bit-exact against the reference for every variant and worker count;
// n_workers host threads split the simulated cores between them.
std::pair<QuantTensorTC, ExecutionTrace>
run_conv(KernelVariant v, const QuantTensorTC& x, const ConvLayerSpec& spec,
         const HardwareModel& hw, int n_workers);

std::pair<QuantTensorTC, ExecutionTrace>
run_conv_window(KernelVariant v, const QuantTensorTC& x,
                const ConvLayerSpec& spec, const HardwareModel& hw,
                int n_workers, const ConvWindow& window);

} // namespace tcn

#endif
