#ifndef TCN_LAYERS_HPP
#define TCN_LAYERS_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "tcn/tensor.hpp"

namespace tcn {

// Shape-only description of a dilated causal 1-d convolution. The layer is
// causal: output t reads inputs t - d*i for i in [0, k), with (k-1)*d
// implicit zeros on the left, so t_out == ceil(t_in / stride).
struct ConvGeometry {
    int c_in = 0;
    int c_out = 0;
    int t_in = 0;
    int k = 1;
    int d = 1;
    int stride = 1;

    int t_out() const;
    // Dense tap count after zero-interleaving a dilated filter.
    int k_eff() const { return (k - 1) * d + 1; }
    // Extra input steps a tile needs on its left edge.
    int halo() const { return (k - 1) * d; }

    void validate() const;
};

// Filter bank in output-channel-major order. Tap index runs oldest-to-newest
// so one weight row matches a gathered input row and the inner product is a
// single contiguous scan: element (m, j, l) multiplies x[t - d*(k-1-j)][l].
struct ConvWeights {
    int c_out = 0;
    int k = 0;
    int c_in = 0;
    std::vector<std::int8_t> data; // (m*k + j)*c_in + l

    ConvWeights() = default;
    ConvWeights(int c_out, int k, int c_in);

    std::int8_t at(int m, int tap, int l) const;
    std::int8_t& at(int m, int tap, int l);
    void validate() const;
};

// Fused requantization of an int32 accumulator back to int8:
//   out = clamp((mult[m] * acc + bias[m]) >> shift, lo, 127)
// with arithmetic (floor) shift, lo = 0 when relu else -128. mult/bias are
// per output channel, shift is shared.
struct RequantParams {
    std::vector<std::int32_t> mult;
    std::vector<std::int32_t> bias;
    int shift = 0;
    bool relu = false;

    void validate(int c_out) const;
};

struct ConvLayerSpec {
    ConvGeometry geom;
    ConvWeights weights;
    RequantParams requant;

    void validate() const;
};

// Dense head: consumes the flattened (TC-order) activation of length
// in_features, emits out_features channels at a single time step.
struct LinearLayerSpec {
    int in_features = 0;
    int out_features = 0;
    std::vector<std::int8_t> weights; // out-major: o*in_features + i
    RequantParams requant;

    void validate() const;
};

// Integer average pooling over the time axis, no padding: the window sum is
// divided with truncation toward zero. t_out = (t_in - window)/stride + 1.
struct AvgPoolLayerSpec {
    int window = 0;
    int stride = 0;

    int t_out(int t_in) const;
    void validate() const;
};

using LayerSpec = std::variant<ConvLayerSpec, LinearLayerSpec, AvgPoolLayerSpec>;

struct NetworkSpec {
    std::vector<LayerSpec> layers;

    // Walks the stack from the first layer's declared input shape and checks
    // that consecutive layers agree on channel/time dimensions.
    // Returns the output (channels, timesteps).
    std::pair<int, int> validate_shapes() const;
    std::pair<int, int> input_shape() const;
};

} // namespace tcn

#endif
