#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tcn/io.hpp"
#include "tcn/layers.hpp"
#include "tcn/netgen.hpp"
#include "tcn/tensor.hpp"

namespace fs = std::filesystem;
using namespace tcn;

namespace {

fs::path test_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "tcn_test_core";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

} // namespace

TEST_CASE("tc offset maps (t, c) to time-major flat positions") {
    CHECK(tc_offset(0, 0, 8) == 0);
    CHECK(tc_offset(0, 7, 8) == 7);
    CHECK(tc_offset(1, 0, 8) == 8);
    CHECK(tc_offset(3, 5, 8) == 29);
    CHECK(tc_offset(3, 5, 1024) == 3077);
}

TEST_CASE("tc offset is a bijection over a tensor's index box") {
    const int channels = 7, timesteps = 5;
    std::vector<int> hits(static_cast<std::size_t>(channels) * timesteps, 0);
    for (int t = 0; t < timesteps; ++t)
        for (int c = 0; c < channels; ++c)
            hits[tc_offset(t, c, channels)] += 1;
    for (int h : hits) CHECK(h == 1);
}

TEST_CASE("tc offset rejects out-of-range coordinates") {
    CHECK_THROWS_AS(tc_offset(-1, 0, 4), std::out_of_range);
    CHECK_THROWS_AS(tc_offset(0, -1, 4), std::out_of_range);
    CHECK_THROWS_AS(tc_offset(0, 4, 4), std::out_of_range);
    CHECK_THROWS_AS(tc_offset(0, 0, 0), std::out_of_range);
}

TEST_CASE("quantized tensor element access matches the layout contract") {
    QuantTensorTC x(3, 4, 0.5);
    REQUIRE(x.size_bytes() == 12);
    for (int t = 0; t < 4; ++t)
        for (int c = 0; c < 3; ++c)
            x.at(t, c) = static_cast<std::int8_t>(10 * t + c);
    CHECK(x.data[0] == 0);
    CHECK(x.data[1] == 1);
    CHECK(x.data[3] == 10);
    CHECK(x.at(3, 2) == 32);
    CHECK_NOTHROW(x.validate());
    x.data.pop_back();
    CHECK_THROWS(x.validate());
}

TEST_CASE("conv geometry derives output length, dense tap count and halo") {
    ConvGeometry g;
    g.c_in = 4;
    g.c_out = 4;
    g.t_in = 10;
    g.k = 3;
    g.d = 4;
    g.stride = 1;
    CHECK(g.t_out() == 10);
    CHECK(g.k_eff() == 9);
    CHECK(g.halo() == 8);
    g.stride = 2;
    CHECK(g.t_out() == 5);
    g.t_in = 9;
    CHECK(g.t_out() == 5);
    CHECK_NOTHROW(g.validate());
    g.k = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("conv weights index taps oldest first") {
    ConvWeights w(2, 3, 4);
    REQUIRE(w.data.size() == 24);
    w.at(1, 2, 3) = 77;
    CHECK(w.data[(1 * 3 + 2) * 4 + 3] == 77);
    CHECK_NOTHROW(w.validate());
}

TEST_CASE("requant params validate per-channel lengths and shift range") {
    RequantParams rq;
    rq.mult = {1, 2};
    rq.bias = {0, 0};
    rq.shift = 31;
    CHECK_NOTHROW(rq.validate(2));
    CHECK_THROWS_AS(rq.validate(3), std::invalid_argument);
    rq.shift = 32;
    CHECK_THROWS_AS(rq.validate(2), std::invalid_argument);
    rq.shift = -1;
    CHECK_THROWS_AS(rq.validate(2), std::invalid_argument);
}

TEST_CASE("network shape walk accepts a consistent stack and reports output") {
    NetworkSpec net = make_temponet_like(5);
    auto [c, t] = net.validate_shapes();
    CHECK(c == 8);
    CHECK(t == 1);
    auto [c0, t0] = net.input_shape();
    CHECK(c0 == 4);
    CHECK(t0 == 256);
}

TEST_CASE("network shape walk rejects a channel mismatch") {
    NetworkSpec net = make_restcn_sound_like(5);
    auto& conv = std::get<ConvLayerSpec>(net.layers[3]);
    conv.geom.c_in = 149;
    conv.weights = ConvWeights(conv.geom.c_out, conv.geom.k, 149);
    CHECK_THROWS_AS(net.validate_shapes(), std::invalid_argument);
}

TEST_CASE("tensor files survive a store/load round trip") {
    QuantTensorTC x = make_random_input(5, 9, 42);
    x.scale = 0.125;
    const fs::path p = test_dir() / "roundtrip.tensor";
    store_tensor(x, p);
    const QuantTensorTC y = load_tensor(p);
    CHECK(y.channels == 5);
    CHECK(y.timesteps == 9);
    CHECK(y.scale == doctest::Approx(0.125));
    CHECK(y.data == x.data);
}

TEST_CASE("tensor file header prefix is 16 bytes of left-justified decimal") {
    QuantTensorTC x = make_random_input(2, 2, 1);
    const fs::path p = test_dir() / "prefix.tensor";
    store_tensor(x, p);
    std::ifstream in(p, std::ios::binary);
    char prefix[17] = {0};
    in.read(prefix, 16);
    REQUIRE(in.gcount() == 16);
    std::string s(prefix, 16);
    const std::size_t digits = s.find(' ');
    REQUIRE(digits != std::string::npos);
    REQUIRE(digits >= 1);
    for (std::size_t i = 0; i < digits; ++i) CHECK(std::isdigit(s[i]));
    for (std::size_t i = digits; i < 16; ++i) CHECK(s[i] == ' ');
    const std::size_t header_len = std::stoul(s);
    std::string header(header_len, 0);
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    CHECK(header.front() == '{');
    CHECK(header.back() == '}');
}

TEST_CASE("truncated tensor payload is a parse error naming the problem") {
    QuantTensorTC x = make_random_input(4, 8, 3);
    const fs::path p = test_dir() / "truncated.tensor";
    store_tensor(x, p);
    fs::resize_file(p, fs::file_size(p) - 1);
    CHECK_THROWS_AS(load_tensor(p), ParseError);
    try {
        load_tensor(p);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("payload") != std::string::npos);
    }
}

TEST_CASE("trailing bytes after the payload are a parse error") {
    QuantTensorTC x = make_random_input(4, 8, 3);
    const fs::path p = test_dir() / "trailing.tensor";
    store_tensor(x, p);
    std::ofstream(p, std::ios::binary | std::ios::app) << "x";
    CHECK_THROWS_AS(load_tensor(p), ParseError);
}

TEST_CASE("garbage prefix is a parse error") {
    const fs::path p = test_dir() / "garbage.tensor";
    std::ofstream(p, std::ios::binary) << "not a tensor file at all";
    CHECK_THROWS_AS(load_tensor(p), ParseError);
}

TEST_CASE("missing tensor file is a parse error") {
    CHECK_THROWS_AS(load_tensor(test_dir() / "does_not_exist.tensor"), ParseError);
}

TEST_CASE("network files survive a store/load round trip") {
    const NetworkSpec net = make_temponet_like(77);
    const fs::path p = test_dir() / "net.json";
    store_network(net, p);
    const NetworkSpec back = load_network(p);
    REQUIRE(back.layers.size() == net.layers.size());
    auto [c, t] = back.validate_shapes();
    CHECK(c == 8);
    CHECK(t == 1);

    const auto& a = std::get<ConvLayerSpec>(net.layers[4]);
    const auto& b = std::get<ConvLayerSpec>(back.layers[4]);
    CHECK(a.weights.data == b.weights.data);
    CHECK(a.requant.mult == b.requant.mult);
    CHECK(a.requant.bias == b.requant.bias);
    CHECK(a.requant.shift == b.requant.shift);
    CHECK(a.geom.d == b.geom.d);

    const auto& la = std::get<LinearLayerSpec>(net.layers[10]);
    const auto& lb = std::get<LinearLayerSpec>(back.layers[10]);
    CHECK(la.weights == lb.weights);
}

TEST_CASE("network loader names a missing field") {
    const fs::path p = test_dir() / "bad_net.json";
    std::ofstream(p) << R"({"layers":[{"type":"conv1d","c_in":2,"c_out":2,"t_in":4,)"
                        R"("d":1,"stride":1,"weights":"nope.tensor",)"
                        R"("requant":{"mult":[1,1],"bias":[0,0],"shift":0,"relu":false}}]})";
    try {
        load_network(p);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'k'") != std::string::npos);
    }
}

TEST_CASE("network loader rejects an unknown layer type") {
    const fs::path p = test_dir() / "bad_type.json";
    std::ofstream(p) << R"({"layers":[{"type":"maxpool9d"}]})";
    CHECK_THROWS_AS(load_network(p), ParseError);
}

TEST_CASE("hardware files survive a round trip and apply defaults") {
    HardwareModel hw;
    hw.n_cores = 4;
    hw.l1_bytes = 1 << 15;
    hw.l2_bytes = 1 << 20;
    hw.alpha = 7.0;
    hw.beta = 0.5;
    hw.gamma = 6.0;
    hw.delta = 2.0;
    hw.epsilon = 11.0;
    hw.gamma_prime = 9.0;
    hw.offset_bytes = 2;
    const fs::path p = test_dir() / "hw.json";
    store_hardware(hw, p);
    const HardwareModel back = load_hardware(p);
    CHECK(back.n_cores == 4);
    CHECK(back.l1_bytes == (1u << 15));
    CHECK(back.gamma_prime == doctest::Approx(9.0));
    CHECK(back.offset_bytes == 2);

    // gamma_prime falls back to gamma/2, offset size to 4 bytes.
    const fs::path q = test_dir() / "hw_defaults.json";
    std::ofstream(q) << R"({"n_cores":8,"l1_bytes":65536,"l2_bytes":4194304,)"
                        R"("alpha":10.0,"beta":0.25,"gamma":8.0,"delta":1.0,)"
                        R"("epsilon":20.0})";
    const HardwareModel d = load_hardware(q);
    CHECK(d.gamma_prime == doctest::Approx(4.0));
    CHECK(d.offset_bytes == 4);
}

TEST_CASE("hardware loader rejects malformed JSON") {
    const fs::path p = test_dir() / "hw_broken.json";
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_AS(load_hardware(p), ParseError);
}
