#include "tcn/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcn {

namespace {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

double gather_for_steps(KernelVariant v, const ConvGeometry& g, const HardwareModel& hw,
                        int steps) {
    switch (v) {
    case KernelVariant::Im2col:
        return std::max(hw.alpha * steps * g.k, hw.beta * steps * g.k * g.c_in);
    case KernelVariant::Indirect:
        return hw.beta * steps * g.k;
    case KernelVariant::NoIm2col:
        return 0.0;
    }
    return 0.0;
}

} // namespace

std::int64_t core_iter(int t_out, int n_cores) {
    if (t_out <= 0 || n_cores <= 0)
        throw std::invalid_argument("core_iter: t_out and n_cores must be positive");
    return ceil_div(ceil_div(t_out, n_cores), 2);
}

std::int64_t mm_iter(int c_out) {
    if (c_out <= 0) throw std::invalid_argument("mm_iter: c_out must be positive");
    return ceil_div(c_out, 4);
}

double gather_cycles(KernelVariant v, const ConvGeometry& g, const HardwareModel& hw) {
    g.validate();
    hw.validate();
    return gather_for_steps(v, g, hw, 2);
}

double mm_cycles(KernelVariant v, const ConvGeometry& g, const HardwareModel& hw) {
    g.validate();
    hw.validate();
    switch (v) {
    case KernelVariant::NoIm2col:
        return hw.gamma + hw.delta * static_cast<double>(ceil_div(
                              static_cast<std::int64_t>(g.k_eff()) * g.c_in, 4));
    case KernelVariant::Im2col:
        return hw.gamma + hw.delta * static_cast<double>(ceil_div(
                              static_cast<std::int64_t>(g.k) * g.c_in, 4));
    case KernelVariant::Indirect:
        return hw.gamma +
               g.k * (hw.gamma_prime + hw.delta * static_cast<double>(ceil_div(g.c_in, 4)));
    }
    return 0.0;
}

CyclePrediction tile_cycles(KernelVariant v, const ConvGeometry& g, int tile_t_out,
                            int tile_c_out, const HardwareModel& hw) {
    g.validate();
    hw.validate();
    if (tile_t_out <= 0 || tile_c_out <= 0)
        throw std::invalid_argument("tile_cycles: tile dims must be positive");

    CyclePrediction p;
    p.core_iter = core_iter(tile_t_out, hw.n_cores);
    p.mm_iter = mm_iter(tile_c_out);
    p.gather_cyc = gather_for_steps(v, g, hw, 2);
    p.mm_cyc = mm_cycles(v, g, hw);

    // Most-loaded core: ceil(t_out/n_cores) steps, walked in pairs with a
    // possible trailing single step that gathers half a pair.
    const std::int64_t steps = ceil_div(tile_t_out, hw.n_cores);
    const std::int64_t pairs = steps / 2;
    const std::int64_t singles = steps % 2;
    const double per_iter_mm = static_cast<double>(p.mm_iter) * p.mm_cyc;
    p.total_cyc = static_cast<double>(pairs) * (hw.epsilon + p.gather_cyc + per_iter_mm) +
                  static_cast<double>(singles) *
                      (hw.epsilon + gather_for_steps(v, g, hw, 1) + per_iter_mm);
    return p;
}

CyclePrediction layer_cycles(KernelVariant v, const ConvGeometry& g,
                             const HardwareModel& hw) {
    return tile_cycles(v, g, g.t_out(), g.c_out, hw);
}

std::vector<std::pair<KernelVariant, double>>
rank_variants(const ConvGeometry& g, const HardwareModel& hw) {
    std::vector<std::pair<KernelVariant, double>> ranking;
    for (KernelVariant v :
         {KernelVariant::NoIm2col, KernelVariant::Im2col, KernelVariant::Indirect})
        ranking.emplace_back(v, layer_cycles(v, g, hw).total_cyc);
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return ranking;
}

} // namespace tcn
