// Grid search over candidate cost constants. A constant set is accepted when
// kernel selection on the three reference benchmark layers, run on the
// embedded reference configuration (8 cores, 64 KiB L1), picks the expected
// variant column: direct, gathered, then offset-based. Values are tried in
// listed order per constant, earlier constants varying slowest, and the
// first valid set wins, so the result is deterministic.

#include "tcn/calibrate.hpp"

#include "tcn/mapper.hpp"
#include "tcn/netgen.hpp"

namespace tcn {

CalibrationLattice CalibrationLattice::standard() {
    CalibrationLattice l;
    l.alpha = {10.0, 5.0, 20.0};
    l.beta = {0.25, 0.5};
    l.gamma = {8.0, 4.0};
    l.delta = {1.0, 2.0};
    l.epsilon = {20.0, 10.0};
    l.gamma_prime = {4.0, 2.0, 8.0, 12.0, 16.0};
    return l;
}

// All stage costs collapse to the same value; no point separates the
// variants the right way, so calibration must report failure.
CalibrationLattice CalibrationLattice::degenerate() {
    CalibrationLattice l;
    l.alpha = {1.0};
    l.beta = {1.0};
    l.gamma = {1.0};
    l.delta = {1.0};
    l.epsilon = {1.0};
    l.gamma_prime = {0.5};
    return l;
}

namespace {

bool reproduces_reference_column(const HardwareModel& hw) {
    static const KernelVariant expected[3] = {
        KernelVariant::NoIm2col, KernelVariant::Im2col, KernelVariant::Indirect};
    for (int row = 1; row <= 3; ++row) {
        try {
            KernelChoice c = select_kernel(benchmark_geometry(row), hw, Objective::Model);
            if (c.variant != expected[row - 1]) return false;
        } catch (const OomError&) {
            return false;
        }
    }
    return true;
}

} // namespace

std::optional<HardwareModel> calibrate_constants(const HardwareModel& base,
                                                 const CalibrationLattice& lattice) {
    HardwareModel ref;
    ref.n_cores = 8;
    ref.l1_bytes = 64 * 1024;
    ref.l2_bytes = 4 * 1024 * 1024;
    ref.offset_bytes = 4;

    for (double a : lattice.alpha)
        for (double b : lattice.beta)
            for (double g : lattice.gamma)
                for (double d : lattice.delta)
                    for (double e : lattice.epsilon)
                        for (double gp : lattice.gamma_prime) {
                            ref.alpha = a;
                            ref.beta = b;
                            ref.gamma = g;
                            ref.delta = d;
                            ref.epsilon = e;
                            ref.gamma_prime = gp;
                            if (!reproduces_reference_column(ref)) continue;
                            HardwareModel out = base;
                            out.alpha = a;
                            out.beta = b;
                            out.gamma = g;
                            out.delta = d;
                            out.epsilon = e;
                            out.gamma_prime = gp;
                            return out;
                        }
    return std::nullopt;
}

} // namespace tcn
