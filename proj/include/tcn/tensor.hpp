#ifndef TCN_TENSOR_HPP
#define TCN_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tcn {

// Flat offset of element (t, c) in time-major (TC) storage: consecutive
// channels of one time step are adjacent, so a run of time steps is one
// contiguous span. Throws std::out_of_range on negative t or c >= channels.
std::size_t tc_offset(int t, int c, int channels);

// Quantized activation tensor, int8 payload in TC order. `scale` maps raw
// values back to real units; it is carried through I/O but never used in
// integer arithmetic.
struct QuantTensorTC {
    int channels = 0;
    int timesteps = 0;
    double scale = 1.0;
    std::vector<std::int8_t> data;

    QuantTensorTC() = default;
    QuantTensorTC(int channels, int timesteps, double scale = 1.0);

    std::int8_t at(int t, int c) const;
    std::int8_t& at(int t, int c);

    std::size_t size_bytes() const { return data.size(); }
    void validate() const;
};

} // namespace tcn

#endif
