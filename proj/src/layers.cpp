#include "tcn/layers.hpp"

#include <stdexcept>
#include <string>

namespace tcn {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

int ConvGeometry::t_out() const {
    return (t_in + stride - 1) / stride;
}

void ConvGeometry::validate() const {
    require(c_in > 0, "ConvGeometry: c_in must be positive, got " + std::to_string(c_in));
    require(c_out > 0, "ConvGeometry: c_out must be positive, got " + std::to_string(c_out));
    require(t_in > 0, "ConvGeometry: t_in must be positive, got " + std::to_string(t_in));
    require(k > 0, "ConvGeometry: k must be positive, got " + std::to_string(k));
    require(d > 0, "ConvGeometry: d must be positive, got " + std::to_string(d));
    require(stride > 0, "ConvGeometry: stride must be positive, got " + std::to_string(stride));
}

ConvWeights::ConvWeights(int c_out_, int k_, int c_in_)
    : c_out(c_out_), k(k_), c_in(c_in_),
      data(static_cast<std::size_t>(c_out_) * k_ * c_in_) {
    validate();
}

void ConvWeights::validate() const {
    require(c_out > 0 && k > 0 && c_in > 0,
            "ConvWeights: dimensions must be positive (c_out=" + std::to_string(c_out) +
                ", k=" + std::to_string(k) + ", c_in=" + std::to_string(c_in) + ")");
    if (data.size() != static_cast<std::size_t>(c_out) * k * c_in)
        throw std::invalid_argument("ConvWeights: payload size " + std::to_string(data.size()) +
                                    " does not match c_out*k*c_in");
}

std::int8_t ConvWeights::at(int m, int tap, int l) const {
    return data[(static_cast<std::size_t>(m) * k + tap) * c_in + l];
}

std::int8_t& ConvWeights::at(int m, int tap, int l) {
    return data[(static_cast<std::size_t>(m) * k + tap) * c_in + l];
}

void RequantParams::validate(int c_out) const {
    if (mult.size() != static_cast<std::size_t>(c_out))
        throw std::invalid_argument("RequantParams: mult has " + std::to_string(mult.size()) +
                                    " entries, expected c_out=" + std::to_string(c_out));
    if (bias.size() != static_cast<std::size_t>(c_out))
        throw std::invalid_argument("RequantParams: bias has " + std::to_string(bias.size()) +
                                    " entries, expected c_out=" + std::to_string(c_out));
    if (shift < 0 || shift > 31)
        throw std::invalid_argument("RequantParams: shift " + std::to_string(shift) +
                                    " outside [0, 31]");
}

void ConvLayerSpec::validate() const {
    geom.validate();
    weights.validate();
    if (weights.c_out != geom.c_out || weights.k != geom.k || weights.c_in != geom.c_in)
        throw std::invalid_argument(
            "ConvLayerSpec: weight dimensions (" + std::to_string(weights.c_out) + "," +
            std::to_string(weights.k) + "," + std::to_string(weights.c_in) +
            ") do not match geometry (" + std::to_string(geom.c_out) + "," +
            std::to_string(geom.k) + "," + std::to_string(geom.c_in) + ")");
    requant.validate(geom.c_out);
    // int32 accumulator headroom: worst-case |acc| = k*c_in*127*127.
    const long long worst = static_cast<long long>(geom.k) * geom.c_in * 127LL * 127LL;
    if (worst > 2147483647LL)
        throw std::invalid_argument("ConvLayerSpec: k*c_in = " +
                                    std::to_string(static_cast<long long>(geom.k) * geom.c_in) +
                                    " overflows the int32 accumulator bound");
}

void LinearLayerSpec::validate() const {
    require(in_features > 0, "LinearLayerSpec: in_features must be positive");
    require(out_features > 0, "LinearLayerSpec: out_features must be positive");
    if (weights.size() != static_cast<std::size_t>(in_features) * out_features)
        throw std::invalid_argument("LinearLayerSpec: weight size " +
                                    std::to_string(weights.size()) +
                                    " does not match in_features*out_features");
    requant.validate(out_features);
    const long long worst = static_cast<long long>(in_features) * 127LL * 127LL;
    if (worst > 2147483647LL)
        throw std::invalid_argument("LinearLayerSpec: in_features overflows the int32 "
                                    "accumulator bound");
}

int AvgPoolLayerSpec::t_out(int t_in) const {
    if (t_in < window)
        throw std::invalid_argument("AvgPoolLayerSpec: t_in " + std::to_string(t_in) +
                                    " shorter than window " + std::to_string(window));
    return (t_in - window) / stride + 1;
}

void AvgPoolLayerSpec::validate() const {
    require(window > 0, "AvgPoolLayerSpec: window must be positive");
    require(stride > 0, "AvgPoolLayerSpec: stride must be positive");
}

std::pair<int, int> NetworkSpec::input_shape() const {
    if (layers.empty())
        throw std::invalid_argument("NetworkSpec: network has no layers");
    if (const auto* conv = std::get_if<ConvLayerSpec>(&layers.front()))
        return {conv->geom.c_in, conv->geom.t_in};
    if (const auto* lin = std::get_if<LinearLayerSpec>(&layers.front()))
        return {lin->in_features, 1};
    throw std::invalid_argument("NetworkSpec: first layer must declare an input shape "
                                "(conv or linear)");
}

std::pair<int, int> NetworkSpec::validate_shapes() const {
    auto [c, t] = input_shape();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& layer = layers[i];
        if (const auto* conv = std::get_if<ConvLayerSpec>(&layer)) {
            conv->validate();
            if (conv->geom.c_in != c || conv->geom.t_in != t)
                throw std::invalid_argument(
                    "NetworkSpec: layer " + std::to_string(i) + " expects " +
                    std::to_string(conv->geom.c_in) + "x" + std::to_string(conv->geom.t_in) +
                    " but receives " + std::to_string(c) + "x" + std::to_string(t));
            c = conv->geom.c_out;
            t = conv->geom.t_out();
        } else if (const auto* lin = std::get_if<LinearLayerSpec>(&layer)) {
            lin->validate();
            if (lin->in_features != c * t)
                throw std::invalid_argument(
                    "NetworkSpec: layer " + std::to_string(i) + " (linear) expects " +
                    std::to_string(lin->in_features) + " features but receives " +
                    std::to_string(c) + "x" + std::to_string(t) + " = " +
                    std::to_string(c * t));
            c = lin->out_features;
            t = 1;
        } else {
            const auto& pool = std::get<AvgPoolLayerSpec>(layer);
            pool.validate();
            t = pool.t_out(t); // throws when the window no longer fits
        }
    }
    return {c, t};
}

} // namespace tcn
