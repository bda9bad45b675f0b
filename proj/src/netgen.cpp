// Seeded generators for benchmark layers, small reference networks and
// random test cases. All draws go through raw mt19937 words + modulo so the
// streams do not depend on distribution internals and stay identical across
// standard libraries.

#include "tcn/netgen.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <stdexcept>

namespace tcn {

namespace {

struct Rng {
    std::mt19937 g;
    explicit Rng(std::uint64_t seed)
        : g(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}
    int in_range(int lo, int hi) {
        return lo + static_cast<int>(g() % static_cast<std::uint32_t>(hi - lo + 1));
    }
    int pick(std::initializer_list<int> opts) {
        return *(opts.begin() + in_range(0, static_cast<int>(opts.size()) - 1));
    }
};

// Shift that keeps requantized outputs in a useful range for typical
// accumulator magnitude ~127^2 * sqrt(macs) and mult ~64.
int shift_for(int macs_per_out) {
    const int bw = std::bit_width(static_cast<unsigned>(macs_per_out));
    return std::clamp(13 + bw / 2, 0, 31);
}

ConvLayerSpec random_conv_layer(const ConvGeometry& g, Rng& rng, bool relu) {
    ConvLayerSpec s;
    s.geom = g;
    s.weights = ConvWeights(g.c_out, g.k, g.c_in);
    for (auto& w : s.weights.data) w = static_cast<std::int8_t>(rng.in_range(-127, 127));
    s.requant.mult.resize(g.c_out);
    s.requant.bias.resize(g.c_out);
    for (auto& m : s.requant.mult) m = rng.in_range(16, 128);
    for (auto& b : s.requant.bias) b = rng.in_range(-32768, 32767);
    s.requant.shift = shift_for(g.k * g.c_in);
    s.requant.relu = relu;
    return s;
}

ConvGeometry conv_geom(int c_in, int t_in, int c_out, int k, int d, int stride = 1) {
    ConvGeometry g;
    g.c_in = c_in;
    g.t_in = t_in;
    g.c_out = c_out;
    g.k = k;
    g.d = d;
    g.stride = stride;
    return g;
}

LinearLayerSpec random_linear_layer(int in_features, int out_features, Rng& rng) {
    LinearLayerSpec s;
    s.in_features = in_features;
    s.out_features = out_features;
    s.weights.resize(static_cast<std::size_t>(in_features) * out_features);
    for (auto& w : s.weights) w = static_cast<std::int8_t>(rng.in_range(-127, 127));
    s.requant.mult.resize(out_features);
    s.requant.bias.resize(out_features);
    for (auto& m : s.requant.mult) m = rng.in_range(16, 128);
    for (auto& b : s.requant.bias) b = rng.in_range(-32768, 32767);
    s.requant.shift = shift_for(in_features);
    s.requant.relu = false;
    return s;
}

} // namespace

ConvGeometry benchmark_geometry(int row) {
    switch (row) {
    case 1: return conv_geom(64, 256, 64, 3, 1);
    case 2: return conv_geom(256, 16, 256, 3, 2);
    case 3: return conv_geom(1024, 16, 1024, 3, 2);
    }
    throw std::invalid_argument("benchmark_geometry: row must be 1, 2 or 3");
}

NetworkSpec make_benchmark_layer(int row, std::uint64_t seed) {
    Rng rng(seed);
    NetworkSpec net;
    net.layers.emplace_back(random_conv_layer(benchmark_geometry(row), rng, true));
    net.validate_shapes();
    return net;
}

NetworkSpec make_temponet_like(std::uint64_t seed) {
    Rng rng(seed);
    NetworkSpec net;
    auto conv = [&](int c_in, int t, int c_out, int k, int d, int s = 1) {
        net.layers.emplace_back(random_conv_layer(conv_geom(c_in, t, c_out, k, d, s), rng, true));
    };
    conv(4, 256, 32, 3, 1);
    conv(32, 256, 32, 3, 2);
    conv(32, 256, 32, 5, 1, 2);
    conv(32, 128, 64, 3, 4);
    conv(64, 128, 64, 3, 4);
    conv(64, 128, 64, 5, 1, 2);
    conv(64, 64, 128, 3, 8);
    conv(128, 64, 128, 3, 8);
    conv(128, 64, 128, 5, 1, 2);
    AvgPoolLayerSpec pool;
    pool.window = 2;
    pool.stride = 2;
    net.layers.emplace_back(pool);
    net.layers.emplace_back(random_linear_layer(128 * 16, 8, rng));
    net.validate_shapes();
    return net;
}

NetworkSpec make_restcn_sound_like(std::uint64_t seed) {
    Rng rng(seed);
    NetworkSpec net;
    const int dil[] = {1, 1, 2, 2, 4, 4, 8, 8};
    for (int i = 0; i < 8; ++i)
        net.layers.emplace_back(
            random_conv_layer(conv_geom(150, 16, 150, 3, dil[i]), rng, i != 7));
    net.validate_shapes();
    return net;
}

NetworkSpec make_restcn_lang_like(std::uint64_t seed) {
    Rng rng(seed);
    NetworkSpec net;
    const int dil[] = {1, 1, 2, 2, 4, 4, 8, 8, 16, 16};
    for (int i = 0; i < 10; ++i)
        net.layers.emplace_back(
            random_conv_layer(conv_geom(450, 50, 450, 5, dil[i]), rng, i != 9));
    net.validate_shapes();
    return net;
}

NetworkSpec make_named_network(const std::string& arch, std::uint64_t seed) {
    if (arch == "temponet") return make_temponet_like(seed);
    if (arch == "restcn-sound") return make_restcn_sound_like(seed);
    if (arch == "restcn-lang") return make_restcn_lang_like(seed);
    for (int row = 1; row <= 3; ++row)
        if (arch == "bench" + std::to_string(row)) return make_benchmark_layer(row, seed);
    throw std::invalid_argument("make_named_network: unknown architecture '" + arch +
                                "' (expected temponet, restcn-sound, restcn-lang, "
                                "bench1, bench2 or bench3)");
}

QuantTensorTC make_random_input(int channels, int timesteps, std::uint64_t seed) {
    Rng rng(seed);
    QuantTensorTC x(channels, timesteps, 0.0625);
    for (auto& v : x.data) v = static_cast<std::int8_t>(rng.in_range(-128, 127));
    return x;
}

ConvLayerSpec make_conv_layer(const ConvGeometry& g, std::uint64_t seed, bool relu) {
    Rng rng(seed);
    return random_conv_layer(g, rng, relu);
}

ConvLayerSpec make_random_conv(std::uint64_t seed, int max_c, int max_t) {
    Rng rng(seed);
    ConvGeometry g;
    g.c_in = rng.in_range(1, max_c);
    g.c_out = rng.in_range(1, max_c);
    g.t_in = rng.in_range(1, max_t);
    g.k = rng.pick({1, 3, 5, 7});
    g.d = rng.pick({1, 2, 4, 16});
    g.stride = rng.pick({1, 2});
    return random_conv_layer(g, rng, rng.in_range(0, 1) == 1);
}

} // namespace tcn
