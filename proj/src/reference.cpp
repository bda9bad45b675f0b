#include "tcn/reference.hpp"

#include <stdexcept>
#include <string>

namespace tcn {

AccTensorTC::AccTensorTC(int channels_, int timesteps_)
    : channels(channels_), timesteps(timesteps_),
      data(static_cast<std::size_t>(channels_) * timesteps_) {
    if (channels <= 0 || timesteps <= 0)
        throw std::invalid_argument("AccTensorTC: dimensions must be positive");
}

std::int32_t AccTensorTC::at(int t, int c) const {
    return data[tc_offset(t, c, channels)];
}

std::int32_t& AccTensorTC::at(int t, int c) {
    return data[tc_offset(t, c, channels)];
}

AccTensorTC conv1d_reference(const QuantTensorTC& x, const ConvLayerSpec& spec) {
    spec.validate();
    const ConvGeometry& g = spec.geom;
    if (x.channels != g.c_in || x.timesteps != g.t_in)
        throw std::invalid_argument("conv1d_reference: input is " + std::to_string(x.channels) +
                                    "x" + std::to_string(x.timesteps) + ", layer wants " +
                                    std::to_string(g.c_in) + "x" + std::to_string(g.t_in));

    AccTensorTC acc(g.c_out, g.t_out());
    for (int to = 0; to < g.t_out(); ++to) {
        const int anchor = to * g.stride;
        for (int m = 0; m < g.c_out; ++m) {
            std::int32_t sum = 0;
            // Chronological taps; anything left of t = 0 is causal zero padding.
            for (int j = 0; j < g.k; ++j) {
                const int t = anchor - g.d * (g.k - 1 - j);
                if (t < 0) continue;
                for (int l = 0; l < g.c_in; ++l)
                    sum += static_cast<std::int32_t>(x.at(t, l)) *
                           static_cast<std::int32_t>(spec.weights.at(m, j, l));
            }
            acc.at(to, m) = sum;
        }
    }
    return acc;
}

std::int8_t requant_one_reference(std::int32_t acc, std::int32_t mult,
                                  std::int32_t bias, int shift, bool relu) {
    // int64 keeps mult*acc exact; >> on a negative value floors (arithmetic
    // shift, well defined since C++20).
    std::int64_t v = static_cast<std::int64_t>(mult) * acc + bias;
    v >>= shift;
    const std::int64_t lo = relu ? 0 : -128;
    if (v < lo) v = lo;
    if (v > 127) v = 127;
    return static_cast<std::int8_t>(v);
}

QuantTensorTC requant_reference(const AccTensorTC& acc, const RequantParams& rq,
                                double out_scale) {
    rq.validate(acc.channels);
    QuantTensorTC out(acc.channels, acc.timesteps, out_scale);
    for (int t = 0; t < acc.timesteps; ++t)
        for (int c = 0; c < acc.channels; ++c)
            out.at(t, c) = requant_one_reference(acc.at(t, c), rq.mult[c], rq.bias[c],
                                                 rq.shift, rq.relu);
    return out;
}

QuantTensorTC layer_reference(const QuantTensorTC& x, const ConvLayerSpec& spec) {
    return requant_reference(conv1d_reference(x, spec), spec.requant, x.scale);
}

QuantTensorTC linear_reference(const QuantTensorTC& x, const LinearLayerSpec& spec) {
    spec.validate();
    const int n = x.channels * x.timesteps;
    if (n != spec.in_features)
        throw std::invalid_argument("linear_reference: input has " + std::to_string(n) +
                                    " elements, layer wants " +
                                    std::to_string(spec.in_features));
    QuantTensorTC out(spec.out_features, 1, x.scale);
    for (int o = 0; o < spec.out_features; ++o) {
        std::int32_t sum = 0;
        for (int i = 0; i < n; ++i)
            sum += static_cast<std::int32_t>(x.data[i]) *
                   static_cast<std::int32_t>(
                       spec.weights[static_cast<std::size_t>(o) * n + i]);
        out.at(0, o) = requant_one_reference(sum, spec.requant.mult[o], spec.requant.bias[o],
                                             spec.requant.shift, spec.requant.relu);
    }
    return out;
}

QuantTensorTC avgpool_reference(const QuantTensorTC& x, const AvgPoolLayerSpec& spec) {
    spec.validate();
    const int t_out = spec.t_out(x.timesteps);
    QuantTensorTC out(x.channels, t_out, x.scale);
    for (int to = 0; to < t_out; ++to)
        for (int c = 0; c < x.channels; ++c) {
            std::int32_t sum = 0;
            for (int j = 0; j < spec.window; ++j)
                sum += x.at(to * spec.stride + j, c);
            out.at(to, c) = static_cast<std::int8_t>(sum / spec.window); // trunc toward zero
        }
    return out;
}

QuantTensorTC network_reference(const QuantTensorTC& x, const NetworkSpec& net) {
    net.validate_shapes();
    QuantTensorTC cur = x;
    for (const auto& layer : net.layers) {
        if (const auto* conv = std::get_if<ConvLayerSpec>(&layer))
            cur = layer_reference(cur, *conv);
        else if (const auto* lin = std::get_if<LinearLayerSpec>(&layer))
            cur = linear_reference(cur, *lin);
        else
            cur = avgpool_reference(cur, std::get<AvgPoolLayerSpec>(layer));
    }
    return cur;
}

} // namespace tcn
