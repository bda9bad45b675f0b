#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <random>

#include "tcn/kernels.hpp"
#include "tcn/netgen.hpp"
#include "tcn/reference.hpp"

using namespace tcn;

namespace {

ConvLayerSpec ones_layer(int c_in, int c_out, int t_in, int k, int d, int stride = 1) {
    ConvLayerSpec s;
    s.geom.c_in = c_in;
    s.geom.c_out = c_out;
    s.geom.t_in = t_in;
    s.geom.k = k;
    s.geom.d = d;
    s.geom.stride = stride;
    s.weights = ConvWeights(c_out, k, c_in);
    for (auto& w : s.weights.data) w = 1;
    s.requant.mult.assign(c_out, 1);
    s.requant.bias.assign(c_out, 0);
    s.requant.shift = 0;
    s.requant.relu = false;
    return s;
}

QuantTensorTC line_input(std::initializer_list<int> values) {
    QuantTensorTC x(1, static_cast<int>(values.size()));
    int t = 0;
    for (int v : values) x.at(t++, 0) = static_cast<std::int8_t>(v);
    return x;
}

// Independent accumulator recompute used to cross-check conv1d_reference:
// different loop nest, different index arithmetic, int64 throughout.
std::int64_t recompute_acc(const QuantTensorTC& x, const ConvLayerSpec& s, int t_out,
                           int m) {
    std::int64_t acc = 0;
    const int anchor = t_out * s.geom.stride;
    for (int l = 0; l < s.geom.c_in; ++l)
        for (int i = 0; i < s.geom.k; ++i) {
            const int t = anchor - s.geom.d * i;
            if (t < 0) continue;
            // Tap index i counts back from the newest sample; the weight
            // array stores taps oldest first.
            acc += static_cast<std::int64_t>(x.at(t, l)) *
                   s.weights.at(m, s.geom.k - 1 - i, l);
        }
    return acc;
}

} // namespace

TEST_CASE("frozen: undilated 2-tap sum over [1,2,3] is [1,3,5]") {
    const ConvLayerSpec s = ones_layer(1, 1, 3, 2, 1);
    const AccTensorTC acc = conv1d_reference(line_input({1, 2, 3}), s);
    REQUIRE(acc.timesteps == 3);
    CHECK(acc.at(0, 0) == 1);
    CHECK(acc.at(1, 0) == 3);
    CHECK(acc.at(2, 0) == 5);
}

TEST_CASE("frozen: the same taps at dilation 2 give [1,2,4]") {
    const ConvLayerSpec s = ones_layer(1, 1, 3, 2, 2);
    const AccTensorTC acc = conv1d_reference(line_input({1, 2, 3}), s);
    CHECK(acc.at(0, 0) == 1); // x[-2] is implicit zero
    CHECK(acc.at(1, 0) == 2);
    CHECK(acc.at(2, 0) == 4); // x[0] + x[2]
}

TEST_CASE("frozen: stride 2 keeps even anchors of the undilated sum") {
    const ConvLayerSpec s = ones_layer(1, 1, 5, 2, 1, 2);
    const AccTensorTC acc = conv1d_reference(line_input({1, 2, 3, 4, 5}), s);
    REQUIRE(acc.timesteps == 3);
    CHECK(acc.at(0, 0) == 1);
    CHECK(acc.at(1, 0) == 5); // x[1] + x[2]
    CHECK(acc.at(2, 0) == 9); // x[3] + x[4]
}

TEST_CASE("frozen: requant scales, floors and clamps") {
    CHECK(requant_one_reference(1000, 1, 24, 5, false) == 32);
    CHECK(requant_one_reference(1000000, 1, 0, 0, false) == 127);
    CHECK(requant_one_reference(-1000000, 1, 0, 0, false) == -128);
    CHECK(requant_one_reference(-5, 1, 0, 0, true) == 0);
    CHECK(requant_one_reference(0, 123, 0, 7, true) == 0);
}

TEST_CASE("requant shift is an arithmetic floor, not truncation") {
    CHECK(requant_one_reference(-3, 1, 0, 1, false) == -2); // floor(-1.5)
    CHECK(requant_one_reference(-1, 1, 0, 5, false) == -1); // floor(-1/32)
    CHECK(requant_one_reference(3, 1, 0, 1, false) == 1);
}

TEST_CASE("requant works in 64-bit: mult*acc may exceed int32") {
    // 100000 * 2000000 = 2e11 overflows int32; >> 31 lands back in range.
    CHECK(requant_one_reference(2000000, 100000, 0, 31, false) == 93);
    const auto v = (static_cast<std::int64_t>(100000) * 2000000) >> 31;
    CHECK(static_cast<int>(v) == 93);
}

TEST_CASE("frozen: avgpool truncates the window mean toward zero") {
    {
        AvgPoolLayerSpec p;
        p.window = 2;
        p.stride = 2;
        const QuantTensorTC y = avgpool_reference(line_input({2, 4, 6, 8}), p);
        REQUIRE(y.timesteps == 2);
        CHECK(y.at(0, 0) == 3);
        CHECK(y.at(1, 0) == 7);
    }
    {
        AvgPoolLayerSpec p;
        p.window = 2;
        p.stride = 1;
        const QuantTensorTC y = avgpool_reference(line_input({1, 2}), p);
        REQUIRE(y.timesteps == 1);
        CHECK(y.at(0, 0) == 1); // 3/2 truncates
        const QuantTensorTC z = avgpool_reference(line_input({-1, -2}), p);
        CHECK(z.at(0, 0) == -1); // -3/2 truncates toward zero
    }
}

TEST_CASE("linear head consumes the flattened TC activation") {
    QuantTensorTC x(2, 3); // flat: [t0c0 t0c1 t1c0 t1c1 t2c0 t2c1]
    int v = 1;
    for (int t = 0; t < 3; ++t)
        for (int c = 0; c < 2; ++c) x.at(t, c) = static_cast<std::int8_t>(v++);
    LinearLayerSpec lin;
    lin.in_features = 6;
    lin.out_features = 2;
    lin.weights.assign(12, 0);
    lin.weights[0] = 1;                    // out 0 reads x flat[0] = 1
    lin.weights[1 * 6 + 5] = 2;            // out 1 reads 2 * flat[5] = 12
    lin.requant.mult = {1, 1};
    lin.requant.bias = {0, 0};
    lin.requant.shift = 0;
    lin.requant.relu = false;
    const QuantTensorTC y = linear_reference(x, lin);
    REQUIRE(y.channels == 2);
    REQUIRE(y.timesteps == 1);
    CHECK(y.at(0, 0) == 1);
    CHECK(y.at(0, 1) == 12);
}

TEST_CASE("conv accumulators are linear in the weights") {
    const QuantTensorTC x = make_random_input(6, 20, 101);
    ConvLayerSpec a = make_conv_layer({6, 5, 20, 3, 2, 1}, 102);
    ConvLayerSpec b = make_conv_layer({6, 5, 20, 3, 2, 1}, 103);
    // Halve to keep the summed weights inside int8.
    for (auto& w : a.weights.data) w = static_cast<std::int8_t>(w / 2);
    for (auto& w : b.weights.data) w = static_cast<std::int8_t>(w / 2);
    ConvLayerSpec sum = a;
    for (std::size_t i = 0; i < sum.weights.data.size(); ++i)
        sum.weights.data[i] =
            static_cast<std::int8_t>(a.weights.data[i] + b.weights.data[i]);

    const AccTensorTC ya = conv1d_reference(x, a);
    const AccTensorTC yb = conv1d_reference(x, b);
    const AccTensorTC ys = conv1d_reference(x, sum);
    for (std::size_t i = 0; i < ys.data.size(); ++i)
        CHECK(ys.data[i] == ya.data[i] + yb.data[i]);
}

TEST_CASE("outputs are causal: changing the future never changes the past") {
    const ConvGeometry g{3, 4, 30, 5, 2, 1};
    const ConvLayerSpec s = make_conv_layer(g, 201);
    QuantTensorTC x = make_random_input(3, 30, 202);
    const AccTensorTC before = conv1d_reference(x, s);

    const int flip_t = 17;
    for (int c = 0; c < 3; ++c)
        x.at(flip_t, c) = static_cast<std::int8_t>(~x.at(flip_t, c));
    const AccTensorTC after = conv1d_reference(x, s);

    for (int t = 0; t < flip_t; ++t)
        for (int m = 0; m < 4; ++m) CHECK(before.at(t, m) == after.at(t, m));
    bool any_diff = false;
    for (int t = flip_t; t < 30; ++t)
        for (int m = 0; m < 4; ++m) any_diff |= before.at(t, m) != after.at(t, m);
    CHECK(any_diff);
}

TEST_CASE("a dilated filter equals its zero-interleaved dense form") {
    for (std::uint64_t seed : {301, 302, 303}) {
        const ConvLayerSpec s = make_conv_layer({5, 6, 25, 3, 4, 1}, seed);
        const QuantTensorTC x = make_random_input(5, 25, seed + 50);

        ConvLayerSpec dense = s;
        dense.weights = zero_interleave_weights(s.weights, s.geom.d);
        dense.geom.k = s.geom.k_eff();
        dense.geom.d = 1;

        const AccTensorTC a = conv1d_reference(x, s);
        const AccTensorTC b = conv1d_reference(x, dense);
        CHECK(a.data == b.data);
    }
}

TEST_CASE("accumulators agree with an independently written recompute") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const ConvLayerSpec s = make_random_conv(seed, 12, 24);
        const QuantTensorTC x = make_random_input(s.geom.c_in, s.geom.t_in, seed + 999);
        const AccTensorTC acc = conv1d_reference(x, s);
        std::mt19937 pick(static_cast<std::uint32_t>(seed));
        for (int probe = 0; probe < 10; ++probe) {
            const int t = static_cast<int>(pick() % static_cast<unsigned>(s.geom.t_out()));
            const int m = static_cast<int>(pick() % static_cast<unsigned>(s.geom.c_out));
            CHECK(static_cast<std::int64_t>(acc.at(t, m)) == recompute_acc(x, s, t, m));
        }
    }
}

TEST_CASE("layer reference equals conv then requant done separately") {
    const ConvLayerSpec s = make_conv_layer({7, 9, 18, 3, 2, 2}, 401);
    const QuantTensorTC x = make_random_input(7, 18, 402);
    const QuantTensorTC fused = layer_reference(x, s);
    const QuantTensorTC staged = requant_reference(conv1d_reference(x, s), s.requant);
    CHECK(fused.data == staged.data);
}

TEST_CASE("network reference output shape matches the declared stack") {
    const NetworkSpec net = make_temponet_like(11);
    const QuantTensorTC x = make_random_input(4, 256, 12);
    const QuantTensorTC y = network_reference(x, net);
    CHECK(y.channels == 8);
    CHECK(y.timesteps == 1);
}
