#include "tcn/tensor.hpp"

#include <stdexcept>
#include <string>

namespace tcn {

std::size_t tc_offset(int t, int c, int channels) {
    if (channels <= 0)
        throw std::out_of_range("tc_offset: channels must be positive, got " +
                                std::to_string(channels));
    if (t < 0)
        throw std::out_of_range("tc_offset: negative time index " + std::to_string(t));
    if (c < 0 || c >= channels)
        throw std::out_of_range("tc_offset: channel " + std::to_string(c) +
                                " out of range [0, " + std::to_string(channels) + ")");
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
}

QuantTensorTC::QuantTensorTC(int channels_, int timesteps_, double scale_)
    : channels(channels_), timesteps(timesteps_), scale(scale_),
      data(static_cast<std::size_t>(channels_ > 0 && timesteps_ > 0
                                        ? channels_ * static_cast<std::size_t>(timesteps_)
                                        : 0)) {
    validate();
}

void QuantTensorTC::validate() const {
    if (channels <= 0)
        throw std::invalid_argument("QuantTensorTC: channels must be positive, got " +
                                    std::to_string(channels));
    if (timesteps <= 0)
        throw std::invalid_argument("QuantTensorTC: timesteps must be positive, got " +
                                    std::to_string(timesteps));
    if (!(scale > 0.0))
        throw std::invalid_argument("QuantTensorTC: scale must be positive");
    if (data.size() != static_cast<std::size_t>(channels) * static_cast<std::size_t>(timesteps))
        throw std::invalid_argument("QuantTensorTC: payload size " +
                                    std::to_string(data.size()) + " does not match " +
                                    std::to_string(channels) + "x" + std::to_string(timesteps));
}

std::int8_t QuantTensorTC::at(int t, int c) const {
    if (t >= timesteps)
        throw std::out_of_range("QuantTensorTC::at: time " + std::to_string(t) +
                                " out of range [0, " + std::to_string(timesteps) + ")");
    return data[tc_offset(t, c, channels)];
}

std::int8_t& QuantTensorTC::at(int t, int c) {
    if (t >= timesteps)
        throw std::out_of_range("QuantTensorTC::at: time " + std::to_string(t) +
                                " out of range [0, " + std::to_string(timesteps) + ")");
    return data[tc_offset(t, c, channels)];
}

} // namespace tcn
