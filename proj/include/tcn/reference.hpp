#ifndef TCN_REFERENCE_HPP
#define TCN_REFERENCE_HPP

#include <cstdint>
#include <vector>

#include "tcn/layers.hpp"
#include "tcn/tensor.hpp"

// Brute-force reference implementations. Deliberately naive triple loops,
// kept free of any dependency on the optimized kernels so the two routes
// stay independent.

namespace tcn {

// Widened accumulator tensor, int32 payload in TC order.
struct AccTensorTC {
    int channels = 0;
    int timesteps = 0;
    std::vector<std::int32_t> data;

    AccTensorTC() = default;
    AccTensorTC(int channels, int timesteps);

    std::int32_t at(int t, int c) const;
    std::int32_t& at(int t, int c);
};

// Causal dilated convolution accumulators, no requantization.
AccTensorTC conv1d_reference(const QuantTensorTC& x, const ConvLayerSpec& spec);

// Per-element requantization of an accumulator tensor.
QuantTensorTC requant_reference(const AccTensorTC& acc, const RequantParams& rq,
                                double out_scale = 1.0);

std::int8_t requant_one_reference(std::int32_t acc, std::int32_t mult,
                                  std::int32_t bias, int shift, bool relu);

// conv + fused requant, the ground truth a kernel run must match bit-exactly.
QuantTensorTC layer_reference(const QuantTensorTC& x, const ConvLayerSpec& spec);

QuantTensorTC linear_reference(const QuantTensorTC& x, const LinearLayerSpec& spec);

QuantTensorTC avgpool_reference(const QuantTensorTC& x, const AvgPoolLayerSpec& spec);

// Full network pass through the reference path.
QuantTensorTC network_reference(const QuantTensorTC& x, const NetworkSpec& net);

} // namespace tcn

#endif
