#ifndef TCN_NETGEN_HPP
#define TCN_NETGEN_HPP

#include <cstdint>
#include <string>

#include "tcn/layers.hpp"
#include "tcn/tensor.hpp"

namespace tcn {

// Seeded generators for the bundled benchmark networks. Same seed, same
// bytes: weights, requant parameters and inputs all come from one mt19937
// stream per call.

// Single-layer nets for the kernel-comparison shapes
// (c_in x t x c_out, k = 3): row 1 = 64x256x64 d=1, row 2 = 256x16x256 d=2,
// row 3 = 1024x16x1024 d=2.
ConvGeometry benchmark_geometry(int row);
NetworkSpec make_benchmark_layer(int row, std::uint64_t seed);

// 9 conv layers (channels 4 -> 32 -> 64 -> 128, d in {1,2,4,8}, strided
// shrink convs) + avgpool + linear head. Input 4 x 256.
NetworkSpec make_temponet_like(std::uint64_t seed);

// Residual-TCN style stacks with a constant time dimension:
// sound: 8 conv layers, 150 channels, T = 16, k = 3, d in {1,2,4,8}.
// lang: 10 conv layers, 450 channels, T = 50, k = 5, d in {1,2,4,8,16}.
NetworkSpec make_restcn_sound_like(std::uint64_t seed);
NetworkSpec make_restcn_lang_like(std::uint64_t seed);

NetworkSpec make_named_network(const std::string& arch, std::uint64_t seed);

QuantTensorTC make_random_input(int channels, int timesteps, std::uint64_t seed);

// Conv layer with the given geometry and seeded weights / requant
// parameters.
ConvLayerSpec make_conv_layer(const ConvGeometry& g, std::uint64_t seed,
                              bool relu = true);

// Random single conv layer within the given bounds (used by the randomized
// equivalence suites).
ConvLayerSpec make_random_conv(std::uint64_t seed, int max_c = 64, int max_t = 64);

} // namespace tcn

#endif
