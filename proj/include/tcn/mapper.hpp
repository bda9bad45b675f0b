#ifndef TCN_MAPPER_HPP
#define TCN_MAPPER_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcn/costmodel.hpp"
#include "tcn/hardware.hpp"
#include "tcn/kernels.hpp"
#include "tcn/layers.hpp"
#include "tcn/trace.hpp"

namespace tcn {

// No candidate tile of a layer fits L1 for the requested variant. The
// message names the buffer that dominates the smallest candidate.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A layer exceeds L2 (weights + activations), or every variant is
// L1-infeasible. `layers` lists the offending layer indices.
struct OomError : std::runtime_error {
    std::vector<int> layers;
    OomError(const std::string& msg, std::vector<int> layers_)
        : std::runtime_error(msg), layers(std::move(layers_)) {}
};

// Plan does not match the network/hardware it is executed against.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Objective { Model, Heuristic, Memory };
const char* to_string(Objective o);
Objective parse_objective(const std::string& name);

// One layer's tiling: body tiles of tile_t_out x tile_c_out output elements
// plus smaller border tiles on either axis. c_in is never tiled.
struct TilePlan {
    int tile_t_out = 0;
    int tile_c_out = 0;
    int n_tiles_t = 0;
    int n_tiles_c = 0;
    int border_t = 0; // trailing tile sizes, 0 when the axis divides evenly
    int border_c = 0;
    MemoryFootprint worst_bytes; // the largest tile's L1 breakdown
    double predicted_cycles = 0.0; // model score summed over all tiles

    int n_tiles() const { return n_tiles_t * n_tiles_c; }
};

TilePlan tile_search(const ConvGeometry& g, KernelVariant v,
                     const HardwareModel& hw, Objective objective);

struct KernelChoice {
    KernelVariant variant = KernelVariant::NoIm2col;
    TilePlan tile;
};

// Best variant for one layer: per-variant tile_search, then minimum total
// modeled cycles (ties break NoIm2col < Im2col < Indirect). Throws OomError
// when every variant is infeasible.
KernelChoice select_kernel(const ConvGeometry& g, const HardwareModel& hw,
                           Objective objective);

struct LayerPlan {
    int index = 0;
    std::string kernel; // variant name, "linear" or "avgpool"
    TilePlan tile;
};

struct MappingPlan {
    std::vector<LayerPlan> layers;
    double total_predicted_cycles = 0.0;
};

// Plans a whole network. Conv layers get a variant (or `force`d one),
// linear/pool layers get fixed reference mappings tiled to fit L1. Every
// layer must fit L2 in total; violators are collected into one OomError.
MappingPlan plan_network(const NetworkSpec& net, const HardwareModel& hw,
                         Objective objective,
                         std::optional<KernelVariant> force = std::nullopt);

void store_plan(const MappingPlan& plan, const std::filesystem::path& path);
MappingPlan load_plan(const std::filesystem::path& path);

// One simulated L2<->L1 transfer batch. Weights move once per c_out tile and
// are reused across time tiles (time is the inner loop).
struct DmaRecord {
    int layer = 0;
    int c_tile = 0;
    int t_tile = 0;
    std::size_t bytes_in_input = 0;
    std::size_t bytes_in_weights = 0;
    std::size_t bytes_out = 0;
};

struct ExecutionResult {
    QuantTensorTC output;
    std::vector<ExecutionTrace> layer_traces;
    std::vector<double> layer_event_cycles; // kernel events + DMA charges
    std::vector<DmaRecord> dma;
    double total_event_cycles = 0.0;
};

// Runs the plan on the abstract machine: per tile, input halo and weights in,
// kernel on the tile slice, output back. Tile DMA is charged alpha per
// transfer plus beta per byte on top of the kernel's own events. The final
// output is bit-exact against the untiled reference path.
ExecutionResult execute_plan(const NetworkSpec& net, const MappingPlan& plan,
                             const QuantTensorTC& input,
                             const HardwareModel& hw, int n_workers);

} // namespace tcn

#endif
