// Tiling and kernel-selection layer. A conv layer is cut into
// tile_t_out x tile_c_out output tiles (c_in is never tiled); every tile,
// with its causal input halo and weight slice, must fit L1 next to the
// variant's gather buffers. Candidate tilings are enumerated exhaustively
// and scored by the chosen objective; variants then compete on total
// modeled cycles. The executor replays a plan tile by tile with explicit
// L2<->L1 transfers and is bit-exact against the untiled reference.

#include "tcn/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "tcn/io.hpp"
#include "tcn/reference.hpp"

namespace tcn {

using json = nlohmann::ordered_json;

const char* to_string(Objective o) {
    switch (o) {
    case Objective::Model: return "model";
    case Objective::Heuristic: return "heuristic";
    case Objective::Memory: return "memory";
    }
    return "?";
}

Objective parse_objective(const std::string& name) {
    if (name == "model") return Objective::Model;
    if (name == "heuristic") return Objective::Heuristic;
    if (name == "memory") return Objective::Memory;
    throw std::invalid_argument("unknown objective '" + name +
                                "' (expected model, heuristic or memory)");
}

/* TILE SEARCH */

namespace {

// Multiples of `step` in [4, dim], plus the full dimension.
std::vector<int> tile_candidates(int dim, int step) {
    std::vector<int> out;
    for (int v = 4; v <= dim; v += step) out.push_back(v);
    out.push_back(dim);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct GridScore {
    double model_cycles = 0.0;
    double utilization = 0.0;
    double heuristic = 0.0;
    int n_tiles = 0;
};

// Sums the model over body and border tiles, each scored with its exact
// smaller dimensions.
GridScore score_grid(const ConvGeometry& g, KernelVariant v, const HardwareModel& hw,
                     int tt, int tc, const MemoryFootprint& worst) {
    const int t_out = g.t_out();
    const int nt_full = t_out / tt;
    const int bt = t_out % tt;
    const int nc_full = g.c_out / tc;
    const int bc = g.c_out % tc;

    auto cyc = [&](int a, int b) { return tile_cycles(v, g, a, b, hw).total_cyc; };
    GridScore s;
    s.model_cycles = nt_full * nc_full * cyc(tt, tc);
    if (bc) s.model_cycles += nt_full * cyc(tt, bc);
    if (bt) s.model_cycles += nc_full * cyc(bt, tc);
    if (bt && bc) s.model_cycles += cyc(bt, bc);
    s.n_tiles = (nt_full + (bt ? 1 : 0)) * (nc_full + (bc ? 1 : 0));
    s.utilization = static_cast<double>(worst.total()) / static_cast<double>(hw.l1_bytes);
    s.heuristic = s.utilization + (bt == 0 ? 0.25 : 0.0) + (bc == 0 ? 0.25 : 0.0);
    return s;
}

const char* dominant_buffer(const MemoryFootprint& fp) {
    std::size_t m = std::max({fp.input, fp.output, fp.weights, fp.gather});
    if (m == fp.gather) return "gather";
    if (m == fp.weights) return "weights";
    if (m == fp.input) return "input";
    return "output";
}

} // namespace

TilePlan tile_search(const ConvGeometry& g, KernelVariant v, const HardwareModel& hw,
                     Objective objective) {
    g.validate();
    hw.validate();
    const int t_out = g.t_out();
    const auto t_cands = tile_candidates(t_out, 2);
    const auto c_cands = tile_candidates(g.c_out, 4);

    bool found = false;
    TilePlan best;
    GridScore best_score;

    for (int tt : t_cands) {
        for (int tc : c_cands) {
            // Worst tile: a full-size body tile with unclipped halo (only a
            // single time tile starts at the sequence head).
            const bool clip = (t_out / tt) + (t_out % tt ? 1 : 0) == 1;
            const MemoryFootprint worst = memory_footprint_tile(v, g, hw, tt, tc, clip);
            if (worst.total() > hw.l1_bytes) continue;
            const GridScore s = score_grid(g, v, hw, tt, tc, worst);

            bool better = false;
            if (!found) {
                better = true;
            } else {
                double a, b;
                switch (objective) {
                case Objective::Model:
                    a = -s.model_cycles; b = -best_score.model_cycles; break;
                case Objective::Memory:
                    a = s.utilization; b = best_score.utilization; break;
                case Objective::Heuristic:
                    a = s.heuristic; b = best_score.heuristic; break;
                default: a = b = 0.0;
                }
                if (a != b) {
                    better = a > b;
                } else if (s.model_cycles != best_score.model_cycles) {
                    better = s.model_cycles < best_score.model_cycles;
                } else if (s.n_tiles != best_score.n_tiles) {
                    better = s.n_tiles < best_score.n_tiles;
                } else if (tt != best.tile_t_out) {
                    better = tt > best.tile_t_out;
                } else {
                    better = tc > best.tile_c_out;
                }
            }
            if (better) {
                found = true;
                best_score = s;
                best.tile_t_out = tt;
                best.tile_c_out = tc;
                best.n_tiles_t = t_out / tt + (t_out % tt ? 1 : 0);
                best.n_tiles_c = g.c_out / tc + (g.c_out % tc ? 1 : 0);
                best.border_t = t_out % tt;
                best.border_c = g.c_out % tc;
                best.worst_bytes = worst;
                best.predicted_cycles = s.model_cycles;
            }
        }
    }

    if (!found) {
        const MemoryFootprint fp =
            memory_footprint_tile(v, g, hw, t_cands.front(), c_cands.front(), false);
        throw InfeasibleError(
            "tile_search: no tile of a " + std::to_string(g.c_in) + "x" +
            std::to_string(g.t_in) + "x" + std::to_string(g.c_out) + " layer fits " +
            std::to_string(hw.l1_bytes) + " B of L1 with kernel " + to_string(v) +
            "; smallest candidate needs " + std::to_string(fp.total()) +
            " B, dominated by the " + dominant_buffer(fp) + " buffer (" +
            std::to_string(std::max({fp.input, fp.output, fp.weights, fp.gather})) + " B)");
    }
    return best;
}

KernelChoice select_kernel(const ConvGeometry& g, const HardwareModel& hw,
                           Objective objective) {
    // The variant always competes on model-optimal tilings; the requested
    // objective only shapes the tiling of the winner. Otherwise a
    // utilization-driven tile could make a slower variant look fastest.
    bool found = false;
    KernelChoice best;
    std::string reasons;
    for (KernelVariant v :
         {KernelVariant::NoIm2col, KernelVariant::Im2col, KernelVariant::Indirect}) {
        try {
            TilePlan plan = tile_search(g, v, hw, Objective::Model);
            if (!found || plan.predicted_cycles < best.tile.predicted_cycles) {
                found = true;
                best.variant = v;
                best.tile = plan;
            }
        } catch (const InfeasibleError& e) {
            reasons += std::string(reasons.empty() ? "" : "; ") + e.what();
        }
    }
    if (!found)
        throw OomError("select_kernel: every variant is L1-infeasible: " + reasons, {});
    if (objective != Objective::Model)
        best.tile = tile_search(g, best.variant, hw, objective);
    return best;
}

/* NETWORK PLANNING */

namespace {

// Pool cost: same outer structure as the conv model, window-sum blocks in
// place of matmul blocks, no gather stage.
double pool_tile_cycles(int tile_t_out, int channels, int window, const HardwareModel& hw) {
    const std::int64_t steps = (tile_t_out + hw.n_cores - 1) / hw.n_cores;
    const std::int64_t iters = (steps + 1) / 2;
    const double block = hw.gamma + hw.delta * ((window + 3) / 4);
    const double blocks = static_cast<double>((channels + 3) / 4);
    return static_cast<double>(iters) * (hw.epsilon + blocks * block);
}

ConvGeometry linear_as_conv(const LinearLayerSpec& lin) {
    ConvGeometry g;
    g.c_in = lin.in_features;
    g.c_out = lin.out_features;
    g.t_in = 1;
    g.k = 1;
    g.d = 1;
    g.stride = 1;
    return g;
}

std::size_t conv_weight_bytes(KernelVariant v, const ConvGeometry& g) {
    const int k_store = (v == KernelVariant::NoIm2col) ? g.k_eff() : g.k;
    return static_cast<std::size_t>(g.c_out) * k_store * g.c_in;
}

} // namespace

MappingPlan plan_network(const NetworkSpec& net, const HardwareModel& hw,
                         Objective objective, std::optional<KernelVariant> force) {
    net.validate_shapes();
    hw.validate();

    MappingPlan plan;
    std::vector<int> oom_layers;
    std::string oom_msg;
    auto note_oom = [&](int idx, const std::string& why) {
        oom_layers.push_back(idx);
        oom_msg += (oom_msg.empty() ? "" : "; ") + ("layer " + std::to_string(idx) + ": " + why);
    };

    auto [c, t] = net.input_shape();
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        LayerPlan lp;
        lp.index = static_cast<int>(i);
        const auto& layer = net.layers[i];

        if (const auto* conv = std::get_if<ConvLayerSpec>(&layer)) {
            const ConvGeometry& g = conv->geom;
            try {
                KernelChoice choice;
                if (force) {
                    choice.variant = *force;
                    choice.tile = tile_search(g, *force, hw, objective);
                } else {
                    choice = select_kernel(g, hw, objective);
                }
                const std::size_t l2_need =
                    conv_weight_bytes(choice.variant, g) +
                    static_cast<std::size_t>(g.c_in) * g.t_in +
                    static_cast<std::size_t>(g.c_out) * g.t_out();
                if (l2_need > hw.l2_bytes) {
                    note_oom(lp.index, "weights + activations need " +
                                           std::to_string(l2_need) + " B of L2, limit " +
                                           std::to_string(hw.l2_bytes) + " B");
                } else {
                    lp.kernel = to_string(choice.variant);
                    lp.tile = choice.tile;
                }
            } catch (const InfeasibleError& e) {
                note_oom(lp.index, e.what());
            } catch (const OomError& e) {
                note_oom(lp.index, e.what());
            }
            c = g.c_out;
            t = g.t_out();
        } else if (const auto* lin = std::get_if<LinearLayerSpec>(&layer)) {
            const ConvGeometry g = linear_as_conv(*lin);
            try {
                TilePlan tp = tile_search(g, KernelVariant::NoIm2col, hw, objective);
                const std::size_t l2_need =
                    static_cast<std::size_t>(lin->in_features) * lin->out_features +
                    lin->in_features + lin->out_features;
                if (l2_need > hw.l2_bytes) {
                    note_oom(lp.index, "linear weights + activations need " +
                                           std::to_string(l2_need) + " B of L2");
                } else {
                    lp.kernel = "linear";
                    lp.tile = tp;
                }
            } catch (const InfeasibleError& e) {
                note_oom(lp.index, e.what());
            }
            c = lin->out_features;
            t = 1;
        } else {
            const auto& pool = std::get<AvgPoolLayerSpec>(layer);
            const int t_out = pool.t_out(t);
            // Largest feasible time tile; pooling has no variants to weigh.
            int tile_t = 0;
            MemoryFootprint worst;
            for (int cand : tile_candidates(t_out, 2)) {
                const int span = (cand - 1) * pool.stride + pool.window;
                MemoryFootprint fp;
                fp.input = static_cast<std::size_t>(std::min(span, t)) * c;
                fp.output = static_cast<std::size_t>(cand) * c;
                if (fp.total() <= hw.l1_bytes && cand > tile_t) {
                    tile_t = cand;
                    worst = fp;
                }
            }
            const std::size_t l2_need = static_cast<std::size_t>(c) * t +
                                        static_cast<std::size_t>(c) * t_out;
            if (tile_t == 0) {
                note_oom(lp.index, "no pooling tile fits L1");
            } else if (l2_need > hw.l2_bytes) {
                note_oom(lp.index, "pool activations need " + std::to_string(l2_need) +
                                       " B of L2");
            } else {
                lp.kernel = "avgpool";
                lp.tile.tile_t_out = tile_t;
                lp.tile.tile_c_out = c;
                lp.tile.n_tiles_t = t_out / tile_t + (t_out % tile_t ? 1 : 0);
                lp.tile.n_tiles_c = 1;
                lp.tile.border_t = t_out % tile_t;
                lp.tile.border_c = 0;
                lp.tile.worst_bytes = worst;
                double cycles = 0.0;
                for (int it = 0; it < lp.tile.n_tiles_t; ++it) {
                    const int tt = (it + 1) * tile_t <= t_out ? tile_t : t_out - it * tile_t;
                    cycles += pool_tile_cycles(tt, c, pool.window, hw);
                }
                lp.tile.predicted_cycles = cycles;
            }
            t = t_out;
        }
        plan.layers.push_back(std::move(lp));
    }

    if (!oom_layers.empty())
        throw OomError("plan_network: " + std::to_string(oom_layers.size()) +
                           " layer(s) do not fit: " + oom_msg,
                       oom_layers);

    plan.total_predicted_cycles = 0.0;
    for (const auto& lp : plan.layers)
        plan.total_predicted_cycles += lp.tile.predicted_cycles;
    return plan;
}

/* PLAN SERIALIZATION */

namespace {

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

} // namespace

void store_plan(const MappingPlan& plan, const std::filesystem::path& path) {
    json j;
    j["layers"] = json::array();
    for (const auto& lp : plan.layers) {
        json lj;
        lj["index"] = lp.index;
        lj["kernel"] = lp.kernel;
        lj["tile_t_out"] = lp.tile.tile_t_out;
        lj["tile_c_out"] = lp.tile.tile_c_out;
        lj["predicted_cycles"] = round4(lp.tile.predicted_cycles);
        json bytes;
        bytes["input"] = lp.tile.worst_bytes.input;
        bytes["output"] = lp.tile.worst_bytes.output;
        bytes["weights"] = lp.tile.worst_bytes.weights;
        bytes["gather"] = lp.tile.worst_bytes.gather;
        lj["l1_bytes_used"] = std::move(bytes);
        j["layers"].push_back(std::move(lj));
    }
    j["total_predicted_cycles"] = round4(plan.total_predicted_cycles);

    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ParseError("store_plan: cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
}

MappingPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("load_plan: cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("load_plan: malformed JSON in '" + path.string() + "': " +
                         e.what());
    }
    if (!j.contains("layers") || !j.at("layers").is_array())
        throw ParseError("load_plan: missing or non-array field 'layers'");

    MappingPlan plan;
    for (const auto& lj : j.at("layers")) {
        LayerPlan lp;
        try {
            lp.index = lj.at("index").get<int>();
            lp.kernel = lj.at("kernel").get<std::string>();
            lp.tile.tile_t_out = lj.at("tile_t_out").get<int>();
            lp.tile.tile_c_out = lj.at("tile_c_out").get<int>();
            lp.tile.predicted_cycles = lj.at("predicted_cycles").get<double>();
            const auto& bytes = lj.at("l1_bytes_used");
            lp.tile.worst_bytes.input = bytes.at("input").get<std::size_t>();
            lp.tile.worst_bytes.output = bytes.at("output").get<std::size_t>();
            lp.tile.worst_bytes.weights = bytes.at("weights").get<std::size_t>();
            lp.tile.worst_bytes.gather = bytes.at("gather").get<std::size_t>();
        } catch (const json::exception& e) {
            throw ParseError("load_plan: layer entry " +
                             std::to_string(plan.layers.size()) +
                             ": missing or ill-typed field (" + e.what() + ")");
        }
        plan.layers.push_back(std::move(lp));
    }
    if (!j.contains("total_predicted_cycles"))
        throw ParseError("load_plan: missing field 'total_predicted_cycles'");
    plan.total_predicted_cycles = j.at("total_predicted_cycles").get<double>();
    return plan;
}

/* EXECUTION */

namespace {

struct DmaCharge {
    double cycles = 0.0;
    void add(const HardwareModel& hw, std::size_t bytes) {
        cycles += hw.alpha + hw.beta * static_cast<double>(bytes);
    }
};

QuantTensorTC slice_time(const QuantTensorTC& x, int t_lo, int t_hi) {
    QuantTensorTC out(x.channels, t_hi - t_lo, x.scale);
    std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(t_lo) * x.channels,
              x.data.begin() + static_cast<std::ptrdiff_t>(t_hi) * x.channels,
              out.data.begin());
    return out;
}

void execute_conv_layer(const ConvLayerSpec& conv, const LayerPlan& lp,
                        const QuantTensorTC& in, QuantTensorTC& out,
                        const HardwareModel& hw, int n_workers, int layer_idx,
                        ExecutionTrace& layer_trace, std::vector<DmaRecord>& dma,
                        DmaCharge& charge) {
    const ConvGeometry& g = conv.geom;
    KernelVariant v;
    try {
        v = parse_variant(lp.kernel);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("execute_plan: layer " + std::to_string(layer_idx) +
                          ": " + e.what());
    }
    const int t_out = g.t_out();
    const int tt = lp.tile.tile_t_out;
    const int tc = lp.tile.tile_c_out;
    if (tt < 1 || tt > t_out || tc < 1 || tc > g.c_out)
        throw ConfigError("execute_plan: layer " + std::to_string(layer_idx) +
                          ": tile " + std::to_string(tt) + "x" + std::to_string(tc) +
                          " does not fit output " + std::to_string(t_out) + "x" +
                          std::to_string(g.c_out));
    {
        const bool clip = (t_out / tt) + (t_out % tt ? 1 : 0) == 1;
        const MemoryFootprint worst = memory_footprint_tile(v, g, hw, tt, tc, clip);
        if (worst.total() > hw.l1_bytes)
            throw ConfigError("execute_plan: layer " + std::to_string(layer_idx) +
                              ": planned tile needs " + std::to_string(worst.total()) +
                              " B of L1, limit " + std::to_string(hw.l1_bytes) + " B");
    }

    const int n_ct = g.c_out / tc + (g.c_out % tc ? 1 : 0);
    const int n_tt = t_out / tt + (t_out % tt ? 1 : 0);
    const int k_store = (v == KernelVariant::NoIm2col) ? g.k_eff() : g.k;

    for (int ic = 0; ic < n_ct; ++ic) {
        const int c0 = ic * tc;
        const int tc_act = std::min(tc, g.c_out - c0);

        // Weight and requant slice for this channel strip.
        ConvLayerSpec tile_spec;
        tile_spec.geom = g;
        tile_spec.geom.c_out = tc_act;
        tile_spec.weights = ConvWeights(tc_act, g.k, g.c_in);
        std::copy(conv.weights.data.begin() +
                      static_cast<std::ptrdiff_t>(c0) * g.k * g.c_in,
                  conv.weights.data.begin() +
                      static_cast<std::ptrdiff_t>(c0 + tc_act) * g.k * g.c_in,
                  tile_spec.weights.data.begin());
        tile_spec.requant.mult.assign(conv.requant.mult.begin() + c0,
                                      conv.requant.mult.begin() + c0 + tc_act);
        tile_spec.requant.bias.assign(conv.requant.bias.begin() + c0,
                                      conv.requant.bias.begin() + c0 + tc_act);
        tile_spec.requant.shift = conv.requant.shift;
        tile_spec.requant.relu = conv.requant.relu;

        const std::size_t w_bytes = static_cast<std::size_t>(tc_act) * k_store * g.c_in;

        for (int it = 0; it < n_tt; ++it) {
            const int o0 = it * tt;
            const int tt_act = std::min(tt, t_out - o0);
            const int t_lo = std::max(0, o0 * g.stride - g.halo());
            const int t_hi = (o0 + tt_act - 1) * g.stride + 1;

            // L2 -> L1: input slice every tile, weights once per strip.
            QuantTensorTC x_tile = slice_time(in, t_lo, t_hi);
            tile_spec.geom.t_in = t_hi - t_lo;

            ConvWindow window;
            window.first_anchor = o0 * g.stride - t_lo;
            window.n_out = tt_act;
            auto [y_tile, trace] =
                run_conv_window(v, x_tile, tile_spec, hw, n_workers, window);

            for (int j = 0; j < tt_act; ++j)
                for (int m = 0; m < tc_act; ++m)
                    out.at(o0 + j, c0 + m) = y_tile.at(j, m);

            layer_trace += trace;
            DmaRecord rec;
            rec.layer = layer_idx;
            rec.c_tile = ic;
            rec.t_tile = it;
            rec.bytes_in_input = static_cast<std::size_t>(t_hi - t_lo) * g.c_in;
            rec.bytes_in_weights = it == 0 ? w_bytes : 0;
            rec.bytes_out = static_cast<std::size_t>(tt_act) * tc_act;
            charge.add(hw, rec.bytes_in_input);
            if (it == 0) charge.add(hw, rec.bytes_in_weights);
            charge.add(hw, rec.bytes_out);
            dma.push_back(rec);
        }
    }
}

} // namespace

ExecutionResult execute_plan(const NetworkSpec& net, const MappingPlan& plan,
                             const QuantTensorTC& input, const HardwareModel& hw,
                             int n_workers) {
    net.validate_shapes();
    hw.validate();
    input.validate();
    if (plan.layers.size() != net.layers.size())
        throw ConfigError("execute_plan: plan has " + std::to_string(plan.layers.size()) +
                          " layers, network has " + std::to_string(net.layers.size()));
    auto [c_in0, t_in0] = net.input_shape();
    if (input.channels != c_in0 || input.timesteps != t_in0)
        throw ConfigError("execute_plan: input tensor is " + std::to_string(input.channels) +
                          "x" + std::to_string(input.timesteps) + ", network expects " +
                          std::to_string(c_in0) + "x" + std::to_string(t_in0));

    ExecutionResult res;
    QuantTensorTC cur = input;

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& layer = net.layers[i];
        const LayerPlan& lp = plan.layers[i];
        ExecutionTrace layer_trace;
        DmaCharge charge;

        if (const auto* conv = std::get_if<ConvLayerSpec>(&layer)) {
            QuantTensorTC out(conv->geom.c_out, conv->geom.t_out(), cur.scale);
            execute_conv_layer(*conv, lp, cur, out, hw, n_workers,
                               static_cast<int>(i), layer_trace, res.dma, charge);
            cur = std::move(out);
        } else if (const auto* lin = std::get_if<LinearLayerSpec>(&layer)) {
            if (lp.kernel != "linear")
                throw ConfigError("execute_plan: layer " + std::to_string(i) +
                                  " is linear but the plan says '" + lp.kernel + "'");
            const int tc = lp.tile.tile_c_out;
            if (tc < 1 || tc > lin->out_features)
                throw ConfigError("execute_plan: layer " + std::to_string(i) +
                                  ": linear tile outside [1, out_features]");
            QuantTensorTC out(lin->out_features, 1, cur.scale);
            const int n = lin->in_features;
            for (int c0 = 0; c0 < lin->out_features; c0 += tc) {
                const int tc_act = std::min(tc, lin->out_features - c0);
                LinearLayerSpec slice;
                slice.in_features = n;
                slice.out_features = tc_act;
                slice.weights.assign(
                    lin->weights.begin() + static_cast<std::ptrdiff_t>(c0) * n,
                    lin->weights.begin() + static_cast<std::ptrdiff_t>(c0 + tc_act) * n);
                slice.requant.mult.assign(lin->requant.mult.begin() + c0,
                                          lin->requant.mult.begin() + c0 + tc_act);
                slice.requant.bias.assign(lin->requant.bias.begin() + c0,
                                          lin->requant.bias.begin() + c0 + tc_act);
                slice.requant.shift = lin->requant.shift;
                slice.requant.relu = lin->requant.relu;
                QuantTensorTC y = linear_reference(cur, slice);
                for (int m = 0; m < tc_act; ++m) out.at(0, c0 + m) = y.at(0, m);

                DmaRecord rec;
                rec.layer = static_cast<int>(i);
                rec.c_tile = c0 / tc;
                rec.bytes_in_input = static_cast<std::size_t>(n);
                rec.bytes_in_weights = static_cast<std::size_t>(tc_act) * n;
                rec.bytes_out = static_cast<std::size_t>(tc_act);
                charge.add(hw, rec.bytes_in_input);
                charge.add(hw, rec.bytes_in_weights);
                charge.add(hw, rec.bytes_out);
                res.dma.push_back(rec);
                ConvGeometry g1 = linear_as_conv(slice);
                layer_trace.total_cycles_event +=
                    tile_cycles(KernelVariant::NoIm2col, g1, 1, tc_act, hw).total_cyc;
            }
            cur = std::move(out);
        } else {
            const auto& pool = std::get<AvgPoolLayerSpec>(layer);
            if (lp.kernel != "avgpool")
                throw ConfigError("execute_plan: layer " + std::to_string(i) +
                                  " is avgpool but the plan says '" + lp.kernel + "'");
            const int t_out = pool.t_out(cur.timesteps);
            const int tt = lp.tile.tile_t_out;
            if (tt < 1 || tt > t_out)
                throw ConfigError("execute_plan: layer " + std::to_string(i) +
                                  ": pool tile outside [1, t_out]");
            QuantTensorTC out(cur.channels, t_out, cur.scale);
            for (int o0 = 0; o0 < t_out; o0 += tt) {
                const int tt_act = std::min(tt, t_out - o0);
                const int t_lo = o0 * pool.stride;
                const int t_hi = (o0 + tt_act - 1) * pool.stride + pool.window;
                QuantTensorTC x_tile = slice_time(cur, t_lo, t_hi);
                QuantTensorTC y = avgpool_reference(x_tile, pool);
                for (int j = 0; j < tt_act; ++j)
                    for (int ch = 0; ch < cur.channels; ++ch)
                        out.at(o0 + j, ch) = y.at(j, ch);

                DmaRecord rec;
                rec.layer = static_cast<int>(i);
                rec.t_tile = o0 / tt;
                rec.bytes_in_input = static_cast<std::size_t>(t_hi - t_lo) * cur.channels;
                rec.bytes_out = static_cast<std::size_t>(tt_act) * cur.channels;
                charge.add(hw, rec.bytes_in_input);
                charge.add(hw, rec.bytes_out);
                res.dma.push_back(rec);
                layer_trace.total_cycles_event +=
                    pool_tile_cycles(tt_act, cur.channels, pool.window, hw);
            }
            cur = std::move(out);
        }

        const double layer_event = layer_trace.total_cycles_event + charge.cycles;
        res.layer_traces.push_back(layer_trace);
        res.layer_event_cycles.push_back(layer_event);
        res.total_event_cycles += layer_event;
    }

    res.output = std::move(cur);
    return res;
}

} // namespace tcn
