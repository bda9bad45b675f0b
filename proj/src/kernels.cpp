// Instrumented int8 convolution engine. Three data-access strategies share
// one outer structure: the output time range is dealt to the simulated cores
// in contiguous chunks, each core walks its chunk two output steps at a
// time, stages inputs per its variant, runs 4-row matmul blocks over the
// output channels and requantizes in-register before the store.
//
// Key invariants:
//  - results are bit-exact against the reference path for every variant,
//    window and worker count;
//  - event counters depend only on the shape, hw.n_cores and the variant,
//    never on tensor values or the host thread count;
//  - gather buffers hold taps oldest-first so a stored weight row is dotted
//    as one contiguous scan.

#include "tcn/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <thread>

namespace tcn {

const char* to_string(KernelVariant v) {
    switch (v) {
    case KernelVariant::NoIm2col: return "no-im2col";
    case KernelVariant::Im2col: return "im2col";
    case KernelVariant::Indirect: return "indirect";
    }
    return "?";
}

KernelVariant parse_variant(const std::string& name) {
    if (name == "no-im2col" || name == "noim2col") return KernelVariant::NoIm2col;
    if (name == "im2col") return KernelVariant::Im2col;
    if (name == "indirect") return KernelVariant::Indirect;
    throw std::invalid_argument("unknown kernel variant '" + name +
                                "' (expected no-im2col, im2col or indirect)");
}

ConvWeights zero_interleave_weights(const ConvWeights& w, int d) {
    w.validate();
    if (d <= 0) throw std::invalid_argument("zero_interleave_weights: d must be positive");
    if (d == 1 || w.k == 1) return w;
    const int k_eff = (w.k - 1) * d + 1;
    ConvWeights out(w.c_out, k_eff, w.c_in);
    for (int m = 0; m < w.c_out; ++m)
        for (int j = 0; j < w.k; ++j)
            for (int l = 0; l < w.c_in; ++l)
                out.at(m, j * d, l) = w.at(m, j, l);
    return out;
}

/* GATHER STAGE */

namespace {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Bytes one gather writes for `steps` output steps; also the per-iteration
// event bookkeeping shared by the public ops and the engine.
void account_gather(KernelVariant v, int steps, int k, int c_in, int offset_bytes,
                    ExecutionTrace& trace) {
    switch (v) {
    case KernelVariant::Im2col:
        trace.dma_invocations += static_cast<std::uint64_t>(steps) * k;
        trace.elements_copied += static_cast<std::uint64_t>(steps) * k * c_in;
        break;
    case KernelVariant::Indirect:
        trace.elements_copied += static_cast<std::uint64_t>(steps) * k * offset_bytes;
        break;
    case KernelVariant::NoIm2col:
        break;
    }
}

double gather_event_cycles(KernelVariant v, int steps, int k, int c_in,
                           const HardwareModel& hw) {
    switch (v) {
    case KernelVariant::Im2col:
        return std::max(hw.alpha * steps * k, hw.beta * steps * k * c_in);
    case KernelVariant::Indirect:
        return hw.beta * steps * k; // offset writes modeled as beta-cost stores
    case KernelVariant::NoIm2col:
        return 0.0;
    }
    return 0.0;
}

// Fills one im2col row: k taps of c_in values, oldest tap first, zeros for
// taps left of the sequence start.
void fill_im2col_row(const QuantTensorTC& x, const ConvGeometry& g, int anchor,
                     std::int8_t* dst) {
    for (int j = 0; j < g.k; ++j) {
        const int t = anchor - g.d * (g.k - 1 - j);
        std::int8_t* row = dst + static_cast<std::size_t>(j) * g.c_in;
        if (t < 0) {
            std::fill(row, row + g.c_in, std::int8_t{0});
        } else {
            const std::int8_t* src = x.data.data() + static_cast<std::size_t>(t) * g.c_in;
            std::copy(src, src + g.c_in, row);
        }
    }
}

void fill_offset_row(const ConvGeometry& g, int anchor, std::int32_t* dst) {
    for (int j = 0; j < g.k; ++j) {
        const int t = anchor - g.d * (g.k - 1 - j);
        dst[j] = t < 0 ? kZeroRowOffset : static_cast<std::int32_t>(t) * g.c_in;
    }
}

void check_gather_args(const QuantTensorTC& x, const ConvGeometry& g, int t_first,
                       int steps) {
    g.validate();
    if (x.channels != g.c_in || x.timesteps < g.t_in)
        throw std::invalid_argument("gather: input tensor does not match geometry");
    if (steps != 1 && steps != 2)
        throw std::invalid_argument("gather: steps must be 1 or 2, got " +
                                    std::to_string(steps));
    if (t_first < 0 || t_first + steps > g.t_out())
        throw std::out_of_range("gather: output steps [" + std::to_string(t_first) + ", " +
                                std::to_string(t_first + steps) + ") outside [0, " +
                                std::to_string(g.t_out()) + ")");
}

} // namespace

GatherBuffers gather_im2col(const QuantTensorTC& x, const ConvGeometry& g,
                            int t_first, int steps, ExecutionTrace& trace) {
    check_gather_args(x, g, t_first, steps);
    GatherBuffers buf;
    buf.steps = steps;
    for (int s = 0; s < steps; ++s) {
        buf.bytes[s].resize(static_cast<std::size_t>(g.k) * g.c_in);
        fill_im2col_row(x, g, (t_first + s) * g.stride, buf.bytes[s].data());
    }
    account_gather(KernelVariant::Im2col, steps, g.k, g.c_in, 4, trace);
    return buf;
}

GatherBuffers gather_indirect(const QuantTensorTC& x, const ConvGeometry& g,
                              int t_first, int steps, ExecutionTrace& trace) {
    check_gather_args(x, g, t_first, steps);
    GatherBuffers buf;
    buf.steps = steps;
    for (int s = 0; s < steps; ++s) {
        buf.offsets[s].resize(static_cast<std::size_t>(g.k));
        fill_offset_row(g, (t_first + s) * g.stride, buf.offsets[s].data());
    }
    account_gather(KernelVariant::Indirect, steps, g.k, g.c_in, 4, trace);
    return buf;
}

/* MATMUL ATOMS */

namespace {

inline std::int32_t dot(const std::int8_t* a, const std::int8_t* b, int len) {
    std::int32_t sum = 0;
    for (int i = 0; i < len; ++i)
        sum += static_cast<std::int32_t>(a[i]) * static_cast<std::int32_t>(b[i]);
    return sum;
}

} // namespace

void matmul_block(const std::int8_t* const* rows, int n_rows,
                  const std::int8_t* const* inputs, int n_inputs, int len,
                  std::int32_t* acc, ExecutionTrace& trace) {
    for (int r = 0; r < n_rows; ++r)
        for (int s = 0; s < n_inputs; ++s)
            acc[r * n_inputs + s] = dot(rows[r], inputs[s], len);
    // One MAC group covers 4 multiply-accumulates; the tail is padded.
    trace.macgroup_ops += static_cast<std::uint64_t>(n_rows) * n_inputs * ceil_div(len, 4);
    trace.mm_iterations += 1;
}

void matmul_block_indirect(const std::int8_t* const* rows, int n_rows,
                           const std::int8_t* x_data,
                           const std::int32_t* const* offsets, int n_inputs,
                           int k, int c_in, const std::int8_t* zero_row,
                           std::int32_t* acc, ExecutionTrace& trace) {
    for (int r = 0; r < n_rows; ++r)
        for (int s = 0; s < n_inputs; ++s) {
            std::int32_t sum = 0;
            for (int j = 0; j < k; ++j) {
                const std::int8_t* seg =
                    offsets[s][j] == kZeroRowOffset ? zero_row : x_data + offsets[s][j];
                sum += dot(rows[r] + static_cast<std::size_t>(j) * c_in, seg, c_in);
            }
            acc[r * n_inputs + s] = sum;
        }
    trace.macgroup_ops +=
        static_cast<std::uint64_t>(n_rows) * n_inputs * k * ceil_div(c_in, 4);
    trace.mm_iterations += 1;
}

std::array<std::int32_t, 8> matmul_4x2(const std::int8_t* const rows[4],
                                       const std::int8_t* const inputs[2],
                                       int len, ExecutionTrace& trace) {
    std::array<std::int32_t, 8> acc{};
    matmul_block(rows, 4, inputs, 2, len, acc.data(), trace);
    return acc;
}

/* MEMORY MODEL */

MemoryFootprint memory_footprint(KernelVariant v, const ConvGeometry& g,
                                 const HardwareModel& hw) {
    return memory_footprint_tile(v, g, hw, g.t_out(), g.c_out, true);
}

MemoryFootprint memory_footprint_tile(KernelVariant v, const ConvGeometry& g,
                                      const HardwareModel& hw, int tile_t_out,
                                      int tile_c_out, bool clip_at_start) {
    g.validate();
    hw.validate();
    if (tile_t_out <= 0 || tile_t_out > g.t_out() || tile_c_out <= 0 ||
        tile_c_out > g.c_out)
        throw std::invalid_argument("memory_footprint_tile: tile dims out of range");

    int t_span = (tile_t_out - 1) * g.stride + g.halo() + 1;
    if (clip_at_start)
        t_span = std::min(t_span, (tile_t_out - 1) * g.stride + 1);
    t_span = std::min(t_span, g.t_in);

    const int k_store = (v == KernelVariant::NoIm2col) ? g.k_eff() : g.k;

    MemoryFootprint fp;
    fp.input = static_cast<std::size_t>(t_span) * g.c_in;
    fp.output = static_cast<std::size_t>(tile_t_out) * tile_c_out;
    fp.weights = static_cast<std::size_t>(tile_c_out) * k_store * g.c_in;
    switch (v) {
    case KernelVariant::NoIm2col:
        fp.gather = 0;
        break;
    case KernelVariant::Im2col:
        fp.gather = 2ull * hw.n_cores * g.k * g.c_in;
        break;
    case KernelVariant::Indirect:
        fp.gather = 2ull * hw.n_cores * g.k * hw.offset_bytes;
        break;
    }
    return fp;
}

/* CONV ENGINE */

namespace {

struct CoreTotals {
    double eps = 0.0;
    double gather = 0.0;
    double mm = 0.0;
    double total() const { return eps + gather + mm; }
};

struct EngineCtx {
    KernelVariant variant;
    const QuantTensorTC* x;
    const ConvGeometry* g;     // original layer geometry
    const ConvWeights* w;      // interleaved storage for NoIm2col d > 1
    const RequantParams* rq;
    const HardwareModel* hw;
    int k_run;                 // taps the inner loop actually walks
    int d_run;
    int first_anchor;
    int n_out;
    QuantTensorTC* out;
};

// Direct dot against the raw input, skipping taps left of the sequence
// start. The in-range region is one contiguous span in TC storage.
inline std::int32_t direct_dot(const EngineCtx& cx, const std::int8_t* w_row, int anchor) {
    const int c_in = cx.g->c_in;
    const int oldest = anchor - (cx.k_run - 1) * cx.d_run;
    int skip = 0;
    if (oldest < 0) skip = ceil_div(-oldest, cx.d_run);
    if (skip >= cx.k_run) return 0;
    if (cx.d_run == 1) {
        const int len = (cx.k_run - skip) * c_in;
        return dot(w_row + static_cast<std::size_t>(skip) * c_in,
                   cx.x->data.data() + static_cast<std::size_t>(oldest + skip) * c_in, len);
    }
    std::int32_t sum = 0;
    for (int j = skip; j < cx.k_run; ++j)
        sum += dot(w_row + static_cast<std::size_t>(j) * c_in,
                   cx.x->data.data() +
                       static_cast<std::size_t>(oldest + j * cx.d_run) * c_in,
                   c_in);
    return sum;
}

// One simulated core: outputs [lo, hi), all variants. Returns event totals;
// counters accumulate into `trace`.
CoreTotals run_core(const EngineCtx& cx, int lo, int hi, ExecutionTrace& trace) {
    CoreTotals totals;
    const ConvGeometry& g = *cx.g;
    const HardwareModel& hw = *cx.hw;
    const int c_in = g.c_in;
    const int c_out = g.c_out;
    const int dot_len = cx.k_run * c_in;
    const std::uint64_t groups_direct = ceil_div(dot_len, 4);

    std::array<std::vector<std::int8_t>, 2> gbuf;
    std::array<std::vector<std::int32_t>, 2> obuf;
    std::vector<std::int8_t> zero_row;
    if (cx.variant == KernelVariant::Im2col)
        for (auto& b : gbuf) b.resize(static_cast<std::size_t>(g.k) * c_in);
    if (cx.variant == KernelVariant::Indirect) {
        for (auto& b : obuf) b.resize(static_cast<std::size_t>(g.k));
        zero_row.assign(static_cast<std::size_t>(c_in), 0);
    }

    for (int t0 = lo; t0 < hi; t0 += 2) {
        const int steps = std::min(2, hi - t0);
        trace.conv_iterations += 1;
        totals.eps += hw.epsilon;

        int anchors[2] = {0, 0};
        for (int s = 0; s < steps; ++s)
            anchors[s] = cx.first_anchor + (t0 + s) * g.stride;

        // Stage inputs for this pair of output steps.
        const std::int8_t* in_ptr[2] = {nullptr, nullptr};
        const std::int32_t* off_ptr[2] = {nullptr, nullptr};
        switch (cx.variant) {
        case KernelVariant::Im2col:
            for (int s = 0; s < steps; ++s) {
                fill_im2col_row(*cx.x, g, anchors[s], gbuf[s].data());
                in_ptr[s] = gbuf[s].data();
            }
            break;
        case KernelVariant::Indirect:
            for (int s = 0; s < steps; ++s) {
                fill_offset_row(g, anchors[s], obuf[s].data());
                off_ptr[s] = obuf[s].data();
            }
            break;
        case KernelVariant::NoIm2col:
            break;
        }
        account_gather(cx.variant, steps, g.k, c_in, hw.offset_bytes, trace);
        totals.gather += gather_event_cycles(cx.variant, steps, g.k, c_in, hw);

        // Matmul blocks: full 4-channel blocks, then the trailing c_out % 4
        // channels one at a time.
        std::int32_t acc[8];
        auto emit_block = [&](int m0, int n_rows) {
            const std::int8_t* rows[4];
            for (int r = 0; r < n_rows; ++r)
                rows[r] = cx.w->data.data() +
                          (static_cast<std::size_t>(m0 + r) * cx.k_run) * c_in;
            switch (cx.variant) {
            case KernelVariant::NoIm2col:
                for (int r = 0; r < n_rows; ++r)
                    for (int s = 0; s < steps; ++s)
                        acc[r * steps + s] = direct_dot(cx, rows[r], anchors[s]);
                trace.macgroup_ops +=
                    static_cast<std::uint64_t>(n_rows) * steps * groups_direct;
                trace.mm_iterations += 1;
                totals.mm += hw.gamma + hw.delta * static_cast<double>(groups_direct);
                break;
            case KernelVariant::Im2col:
                matmul_block(rows, n_rows, in_ptr, steps, dot_len, acc, trace);
                totals.mm += hw.gamma + hw.delta * static_cast<double>(groups_direct);
                break;
            case KernelVariant::Indirect:
                matmul_block_indirect(rows, n_rows, cx.x->data.data(), off_ptr, steps,
                                      g.k, c_in, zero_row.data(), acc, trace);
                totals.mm += hw.gamma +
                             g.k * (hw.gamma_prime + hw.delta * ceil_div(c_in, 4));
                break;
            }
            // Requantize in-register, store int8.
            for (int r = 0; r < n_rows; ++r) {
                const int m = m0 + r;
                const std::int32_t mult = (*cx.rq).mult[m];
                const std::int32_t bias = (*cx.rq).bias[m];
                for (int s = 0; s < steps; ++s) {
                    std::int64_t v = static_cast<std::int64_t>(mult) * acc[r * steps + s] + bias;
                    v >>= cx.rq->shift;
                    const std::int64_t lo_clamp = cx.rq->relu ? 0 : -128;
                    v = std::max(lo_clamp, std::min<std::int64_t>(127, v));
                    cx.out->at(t0 + s, m) = static_cast<std::int8_t>(v);
                }
            }
        };

        int m0 = 0;
        for (; m0 + 4 <= c_out; m0 += 4) emit_block(m0, 4);
        for (; m0 < c_out; ++m0) emit_block(m0, 1);
    }
    return totals;
}

} // namespace

std::pair<QuantTensorTC, ExecutionTrace>
run_conv_window(KernelVariant v, const QuantTensorTC& x, const ConvLayerSpec& spec,
                const HardwareModel& hw, int n_workers, const ConvWindow& window) {
    spec.validate();
    hw.validate();
    x.validate();
    const ConvGeometry& g = spec.geom;
    if (x.channels != g.c_in || x.timesteps != g.t_in)
        throw std::invalid_argument("run_conv: input is " + std::to_string(x.channels) + "x" +
                                    std::to_string(x.timesteps) + ", layer wants " +
                                    std::to_string(g.c_in) + "x" + std::to_string(g.t_in));
    if (n_workers < 1 || n_workers > hw.n_cores)
        throw std::invalid_argument("run_conv: n_workers " + std::to_string(n_workers) +
                                    " outside [1, " + std::to_string(hw.n_cores) + "]");
    const int n_out = window.n_out < 0 ? g.t_out() : window.n_out;
    if (n_out <= 0 || window.first_anchor < 0 ||
        window.first_anchor + (n_out - 1) * g.stride >= g.t_in)
        throw std::invalid_argument("run_conv: window does not fit the input slice");

    EngineCtx cx;
    cx.variant = v;
    cx.x = &x;
    cx.g = &g;
    cx.rq = &spec.requant;
    cx.hw = &hw;
    cx.first_anchor = window.first_anchor;
    cx.n_out = n_out;

    // NoIm2col needs consecutive taps; d > 1 runs through interleaving.
    ConvWeights interleaved;
    if (v == KernelVariant::NoIm2col && g.d > 1 && g.k > 1) {
        interleaved = zero_interleave_weights(spec.weights, g.d);
        cx.w = &interleaved;
        cx.k_run = g.k_eff();
        cx.d_run = 1;
    } else {
        cx.w = &spec.weights;
        cx.k_run = g.k;
        cx.d_run = (v == KernelVariant::NoIm2col) ? 1 : g.d;
    }

    QuantTensorTC out(g.c_out, n_out, x.scale);
    cx.out = &out;

    // Simulated-core chunking is fixed by hw.n_cores; host threads only
    // execute the chunks, so traces do not depend on n_workers.
    const int chunk = static_cast<int>(ceil_div(n_out, hw.n_cores));
    struct CoreJob {
        int lo, hi;
        ExecutionTrace trace;
        CoreTotals totals;
    };
    std::vector<CoreJob> jobs;
    for (int c = 0; c < hw.n_cores; ++c) {
        const int lo = c * chunk;
        const int hi = std::min(n_out, lo + chunk);
        if (lo >= hi) break;
        jobs.push_back({lo, hi, {}, {}});
    }

    auto work = [&](int first, int step) {
        for (std::size_t i = first; i < jobs.size(); i += step)
            jobs[i].totals = run_core(cx, jobs[i].lo, jobs[i].hi, jobs[i].trace);
    };
    if (n_workers == 1 || jobs.size() <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        const int nw = std::min<int>(n_workers, static_cast<int>(jobs.size()));
        pool.reserve(nw - 1);
        for (int t = 1; t < nw; ++t) pool.emplace_back(work, t, nw);
        work(0, nw);
        for (auto& th : pool) th.join();
    }

    // Deterministic merge in core order; cycle totals take the most-loaded
    // core (parallel makespan), lowest id on ties.
    ExecutionTrace trace;
    std::size_t busiest = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        trace.dma_invocations += jobs[i].trace.dma_invocations;
        trace.elements_copied += jobs[i].trace.elements_copied;
        trace.mm_iterations += jobs[i].trace.mm_iterations;
        trace.macgroup_ops += jobs[i].trace.macgroup_ops;
        trace.conv_iterations += jobs[i].trace.conv_iterations;
        if (jobs[i].totals.total() > jobs[busiest].totals.total()) busiest = i;
    }
    if (!jobs.empty()) {
        trace.gather_cycles_event = jobs[busiest].totals.gather;
        trace.mm_cycles_event = jobs[busiest].totals.mm;
        trace.total_cycles_event = jobs[busiest].totals.total();
    }
    return {std::move(out), trace};
}

std::pair<QuantTensorTC, ExecutionTrace>
run_conv(KernelVariant v, const QuantTensorTC& x, const ConvLayerSpec& spec,
         const HardwareModel& hw, int n_workers) {
    return run_conv_window(v, x, spec, hw, n_workers, ConvWindow{});
}

} // namespace tcn
