#ifndef TCN_CALIBRATE_HPP
#define TCN_CALIBRATE_HPP

#include <optional>
#include <vector>

#include "tcn/hardware.hpp"

namespace tcn {

// Lattice over (alpha, beta, gamma, delta, epsilon, gamma_prime). Values
// are tried in listed order, earlier constants varying slowest; the
// standard lattice is ordered so its first valid point equals the shipped
// defaults. The degenerate lattice ties alpha = beta = gamma = delta =
// epsilon and gamma_prime = gamma/2, which cannot reproduce the benchmark
// column (expected failure path).
struct CalibrationLattice {
    std::vector<double> alpha, beta, gamma, delta, epsilon, gamma_prime;

    static CalibrationLattice standard();
    static CalibrationLattice degenerate();
};

// First constant set in lexicographic lattice order for which select_kernel
// under the embedded-target memory budget picks no-im2col / im2col /
// indirect on benchmark rows 1..3. Returns nullopt when the lattice is
// exhausted. Everything but the six constants is taken from `base`.
std::optional<HardwareModel> calibrate_constants(const HardwareModel& base,
                                                 const CalibrationLattice& lattice);

} // namespace tcn

#endif
