#ifndef TCN_IO_HPP
#define TCN_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "tcn/hardware.hpp"
#include "tcn/layers.hpp"
#include "tcn/tensor.hpp"

namespace tcn {

// Malformed file contents (bad JSON, missing/ill-typed field, dimension
// mismatch, truncated payload). The message names the offending field.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor container: 16-byte decimal ASCII length prefix (left-justified,
// space-padded) for the JSON header {"c":..,"t":..,"scale":..}, followed by
// c*t raw int8 payload bytes in TC order.
QuantTensorTC load_tensor(const std::filesystem::path& path);
void store_tensor(const QuantTensorTC& tensor, const std::filesystem::path& path);

// Network description JSON. Weight payloads live in tensor files referenced
// by path, resolved relative to the JSON's directory. store_network writes
// the weight files next to the JSON as "<stem>_w<layer>.tensor".
NetworkSpec load_network(const std::filesystem::path& path);
void store_network(const NetworkSpec& net, const std::filesystem::path& path);

HardwareModel load_hardware(const std::filesystem::path& path);
void store_hardware(const HardwareModel& hw, const std::filesystem::path& path);

} // namespace tcn

#endif
