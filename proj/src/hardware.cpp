#include "tcn/hardware.hpp"

#include <stdexcept>
#include <string>

namespace tcn {

void HardwareModel::validate() const {
    if (n_cores <= 0)
        throw std::invalid_argument("HardwareModel: n_cores must be positive, got " +
                                    std::to_string(n_cores));
    if (l1_bytes == 0 || l2_bytes == 0)
        throw std::invalid_argument("HardwareModel: l1_bytes and l2_bytes must be positive");
    if (l1_bytes >= l2_bytes)
        throw std::invalid_argument("HardwareModel: l1_bytes (" + std::to_string(l1_bytes) +
                                    ") must be smaller than l2_bytes (" +
                                    std::to_string(l2_bytes) + ")");
    if (alpha < 0 || beta < 0 || gamma < 0 || delta < 0 || epsilon < 0 || gamma_prime < 0)
        throw std::invalid_argument("HardwareModel: cost constants must be non-negative");
    if (offset_bytes <= 0)
        throw std::invalid_argument("HardwareModel: offset_bytes must be positive, got " +
                                    std::to_string(offset_bytes));
}

} // namespace tcn
