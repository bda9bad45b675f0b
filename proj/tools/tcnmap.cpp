// Command-line front end: plan a network onto a hardware description, run a
// plan on the abstract machine, sweep single-layer shapes, calibrate cost
// constants, and generate seeded networks / input tensors.
//
// Exit codes: 0 ok, 1 usage/parse/plan-mismatch errors, 2 memory-infeasible,
// 3 oracle mismatch, 4 calibration failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <tuple>

#include <CLI11.hpp>

#include "tcn/calibrate.hpp"
#include "tcn/costmodel.hpp"
#include "tcn/io.hpp"
#include "tcn/kernels.hpp"
#include "tcn/mapper.hpp"
#include "tcn/netgen.hpp"
#include "tcn/reference.hpp"
#include "tcn/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitOom = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitCalibration = 4;

struct SweepRange {
    int lo = 0;
    int hi = 0;
    int step = 1;
};

SweepRange parse_range(const std::string& text) {
    SweepRange r;
    char extra;
    const int n = std::sscanf(text.c_str(), "%d:%d:%d%c", &r.lo, &r.hi, &r.step, &extra);
    if (n == 2) {
        r.step = 1;
    } else if (n != 3) {
        throw tcn::ConfigError("sweep: range must be lo:hi[:step], got '" + text + "'");
    }
    if (r.lo < 1 || r.hi < r.lo || r.step < 1)
        throw tcn::ConfigError("sweep: need 1 <= lo <= hi and step >= 1, got '" + text +
                               "'");
    return r;
}

struct PlanArgs {
    std::string net_path, hw_path, out_path;
    std::string objective = "model";
    std::string force;
};

int cmd_plan(const PlanArgs& a) {
    const tcn::NetworkSpec net = tcn::load_network(a.net_path);
    const tcn::HardwareModel hw = tcn::load_hardware(a.hw_path);
    std::optional<tcn::KernelVariant> force;
    if (!a.force.empty()) force = tcn::parse_variant(a.force);

    const tcn::MappingPlan plan =
        tcn::plan_network(net, hw, tcn::parse_objective(a.objective), force);
    if (!a.out_path.empty()) tcn::store_plan(plan, a.out_path);

    std::printf("%5s  %-9s  %6s  %6s  %14s  %9s\n", "layer", "kernel", "tile_t",
                "tile_c", "pred_cycles", "l1_bytes");
    for (const auto& lp : plan.layers)
        std::printf("%5d  %-9s  %6d  %6d  %14.4f  %9zu\n", lp.index, lp.kernel.c_str(),
                    lp.tile.tile_t_out, lp.tile.tile_c_out, lp.tile.predicted_cycles,
                    lp.tile.worst_bytes.total());
    std::printf("total predicted cycles: %.4f\n", plan.total_predicted_cycles);
    return kExitOk;
}

struct RunArgs {
    std::string net_path, hw_path, plan_path, input_path;
    std::string out_path, report_path;
    int workers = 1;
    bool check_oracle = false;
};

int cmd_run(const RunArgs& a) {
    const tcn::NetworkSpec net = tcn::load_network(a.net_path);
    const tcn::HardwareModel hw = tcn::load_hardware(a.hw_path);
    const tcn::MappingPlan plan = tcn::load_plan(a.plan_path);
    const tcn::QuantTensorTC input = tcn::load_tensor(a.input_path);

    const tcn::ExecutionResult result =
        tcn::execute_plan(net, plan, input, hw, a.workers);

    if (!a.out_path.empty()) tcn::store_tensor(result.output, a.out_path);
    const auto rows = tcn::build_report(net, plan, result);
    if (!a.report_path.empty()) tcn::write_report_csv(rows, a.report_path);
    std::fputs(tcn::format_report_table(rows).c_str(), stdout);

    if (a.check_oracle) {
        const tcn::QuantTensorTC ref = tcn::network_reference(input, net);
        if (ref.data != result.output.data) {
            std::size_t first = 0;
            while (first < ref.data.size() && ref.data[first] == result.output.data[first])
                ++first;
            std::fprintf(stderr,
                         "oracle mismatch: first differing byte at flat index %zu "
                         "(got %d, expected %d)\n",
                         first, static_cast<int>(result.output.data[first]),
                         static_cast<int>(ref.data[first]));
            return kExitMismatch;
        }
        std::puts("oracle check: outputs match bit-exactly");
    }
    return kExitOk;
}

struct SweepArgs {
    std::string hw_path, out_path;
    std::string param = "cin";
    std::string range = "4:64:4";
    int cin = 64, cout = 64, t = 64, k = 3, d = 1, stride = 1;
    std::uint64_t seed = 1;
};

int cmd_sweep(const SweepArgs& a) {
    const tcn::HardwareModel hw = tcn::load_hardware(a.hw_path);
    const SweepRange range = parse_range(a.range);

    std::string csv = "param,value,variant,macs,predicted_cycles,event_cycles,"
                      "macs_per_cycle,model_error\n";
    for (int v = range.lo; v <= range.hi; v += range.step) {
        tcn::ConvGeometry g;
        g.c_in = a.param == "cin" ? v : a.cin;
        g.c_out = a.param == "cout" ? v : a.cout;
        g.t_in = a.param == "t" ? v : a.t;
        g.k = a.param == "k" ? v : a.k;
        g.d = a.param == "d" ? v : a.d;
        g.stride = a.param == "stride" ? v : a.stride;
        if (a.param != "cin" && a.param != "cout" && a.param != "t" && a.param != "k" &&
            a.param != "d" && a.param != "stride")
            throw tcn::ConfigError("sweep: unknown parameter '" + a.param +
                                   "' (expected cin, cout, t, k, d or stride)");
        g.validate();

        const tcn::ConvLayerSpec layer =
            tcn::make_conv_layer(g, a.seed + static_cast<std::uint64_t>(v));
        const tcn::QuantTensorTC x = tcn::make_random_input(
            g.c_in, g.t_in, a.seed ^ 0x5eedull ^ static_cast<std::uint64_t>(v));
        const double macs = static_cast<double>(g.t_out()) * g.c_out * g.k * g.c_in;

        for (tcn::KernelVariant kv : {tcn::KernelVariant::NoIm2col,
                                      tcn::KernelVariant::Im2col,
                                      tcn::KernelVariant::Indirect}) {
            const double pred = tcn::layer_cycles(kv, g, hw).total_cyc;
            auto [y, trace] = tcn::run_conv(kv, x, layer, hw, 1);
            (void)y;
            const double event = trace.total_cycles_event;
            char line[256];
            std::snprintf(line, sizeof line, "%s,%d,%s,%.0f,%.4f,%.4f,%.4f,%.4f\n",
                          a.param.c_str(), v, tcn::to_string(kv), macs, pred, event,
                          event > 0.0 ? macs / event : 0.0,
                          event > 0.0 ? (pred - event) / event : 0.0);
            csv += line;
        }
    }

    if (!a.out_path.empty()) {
        std::ofstream out(a.out_path, std::ios::trunc);
        if (!out)
            throw tcn::ParseError("sweep: cannot open '" + a.out_path + "' for writing");
        out << csv;
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return kExitOk;
}

struct CalibrateArgs {
    std::string hw_path, out_path;
    std::string lattice = "standard";
};

int cmd_calibrate(const CalibrateArgs& a) {
    const tcn::HardwareModel base = tcn::load_hardware(a.hw_path);
    tcn::CalibrationLattice lattice;
    if (a.lattice == "standard") {
        lattice = tcn::CalibrationLattice::standard();
    } else if (a.lattice == "degenerate") {
        lattice = tcn::CalibrationLattice::degenerate();
    } else {
        throw tcn::ConfigError("calibrate: unknown lattice '" + a.lattice +
                               "' (expected standard or degenerate)");
    }

    const auto result = tcn::calibrate_constants(base, lattice);
    if (!result) {
        std::fprintf(stderr, "calibration failed: no constant set in the lattice "
                             "reproduces the benchmark selection column\n");
        return kExitCalibration;
    }
    std::printf("calibrated constants: alpha=%g beta=%g gamma=%g delta=%g epsilon=%g "
                "gamma_prime=%g\n",
                result->alpha, result->beta, result->gamma, result->delta,
                result->epsilon, result->gamma_prime);
    if (!a.out_path.empty()) tcn::store_hardware(*result, a.out_path);
    return kExitOk;
}

struct GenNetArgs {
    std::string arch, out_path;
    std::uint64_t seed = 1;
};

int cmd_gen_net(const GenNetArgs& a) {
    const tcn::NetworkSpec net = tcn::make_named_network(a.arch, a.seed);
    tcn::store_network(net, a.out_path);
    auto [c, t] = net.input_shape();
    std::printf("wrote %s: %zu layers, input %dx%d\n", a.out_path.c_str(),
                net.layers.size(), c, t);
    return kExitOk;
}

struct GenInputArgs {
    std::string out_path, net_path;
    int channels = 0, timesteps = 0;
    double scale = 0.0625;
    std::uint64_t seed = 1;
};

int cmd_gen_input(const GenInputArgs& a) {
    int c = a.channels, t = a.timesteps;
    if (!a.net_path.empty()) {
        const tcn::NetworkSpec net = tcn::load_network(a.net_path);
        std::tie(c, t) = net.input_shape();
    }
    if (c < 1 || t < 1)
        throw tcn::ConfigError(
            "gen-input: need --channels/--timesteps >= 1 or --net to infer them");
    tcn::QuantTensorTC x = tcn::make_random_input(c, t, a.seed);
    x.scale = a.scale;
    tcn::store_tensor(x, a.out_path);
    std::printf("wrote %s: %dx%d, scale %g\n", a.out_path.c_str(), c, t, a.scale);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"int8 dilated causal conv kernels: planning, simulation, reporting"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    auto* plan = app.add_subcommand("plan", "Choose kernels and tiles for a network");
    plan->add_option("net", plan_args.net_path, "network JSON")->required();
    plan->add_option("hw", plan_args.hw_path, "hardware JSON")->required();
    plan->add_option("-o,--out", plan_args.out_path, "plan JSON to write");
    plan->add_option("--objective", plan_args.objective,
                     "tile scoring objective: model, heuristic or memory");
    plan->add_option("--force-kernel", plan_args.force,
                     "force one variant on every conv layer");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute a plan on the abstract machine");
    run->add_option("net", run_args.net_path, "network JSON")->required();
    run->add_option("hw", run_args.hw_path, "hardware JSON")->required();
    run->add_option("plan", run_args.plan_path, "plan JSON")->required();
    run->add_option("input", run_args.input_path, "input tensor file")->required();
    run->add_option("-o,--out", run_args.out_path, "output tensor file");
    run->add_option("--report", run_args.report_path, "per-layer CSV report");
    run->add_option("--workers", run_args.workers, "host threads simulating the cores");
    run->add_flag("--check-oracle", run_args.check_oracle,
                  "compare against the scalar reference implementation");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Model vs simulated cycles over a shape sweep");
    sweep->add_option("hw", sweep_args.hw_path, "hardware JSON")->required();
    sweep->add_option("--param", sweep_args.param, "swept dimension: cin, cout, t, k, d, stride");
    sweep->add_option("--range", sweep_args.range, "lo:hi[:step]");
    sweep->add_option("--cin", sweep_args.cin, "base input channels");
    sweep->add_option("--cout", sweep_args.cout, "base output channels");
    sweep->add_option("--t", sweep_args.t, "base time steps");
    sweep->add_option("--k", sweep_args.k, "base kernel size");
    sweep->add_option("--d", sweep_args.d, "base dilation");
    sweep->add_option("--stride", sweep_args.stride, "base stride");
    sweep->add_option("--seed", sweep_args.seed, "generator seed");
    sweep->add_option("-o,--out", sweep_args.out_path, "CSV to write (stdout otherwise)");

    CalibrateArgs cal_args;
    auto* cal = app.add_subcommand("calibrate", "Search cost constants on the benchmark layers");
    cal->add_option("hw", cal_args.hw_path, "hardware JSON")->required();
    cal->add_option("-o,--out", cal_args.out_path, "hardware JSON to write");
    cal->add_option("--lattice", cal_args.lattice, "standard or degenerate");

    GenNetArgs gen_net_args;
    auto* gen_net = app.add_subcommand("gen-net", "Write a seeded benchmark network");
    gen_net->add_option("--arch", gen_net_args.arch,
                        "temponet, restcn-sound, restcn-lang, bench1, bench2, bench3")
        ->required();
    gen_net->add_option("--seed", gen_net_args.seed, "generator seed");
    gen_net->add_option("-o,--out", gen_net_args.out_path, "network JSON to write")
        ->required();

    GenInputArgs gen_input_args;
    auto* gen_input = app.add_subcommand("gen-input", "Write a seeded input tensor");
    gen_input->add_option("--channels", gen_input_args.channels, "channel count");
    gen_input->add_option("--timesteps", gen_input_args.timesteps, "time steps");
    gen_input->add_option("--net", gen_input_args.net_path,
                          "network JSON to take the input shape from");
    gen_input->add_option("--scale", gen_input_args.scale, "quantization scale");
    gen_input->add_option("--seed", gen_input_args.seed, "generator seed");
    gen_input->add_option("-o,--out", gen_input_args.out_path, "tensor file to write")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*plan) return cmd_plan(plan_args);
        if (*run) return cmd_run(run_args);
        if (*sweep) return cmd_sweep(sweep_args);
        if (*cal) return cmd_calibrate(cal_args);
        if (*gen_net) return cmd_gen_net(gen_net_args);
        if (*gen_input) return cmd_gen_input(gen_input_args);
    } catch (const tcn::OomError& e) {
        std::fprintf(stderr, "out of memory: %s\n", e.what());
        if (!e.layers.empty()) {
            std::string ids;
            for (int idx : e.layers) ids += (ids.empty() ? "" : ", ") + std::to_string(idx);
            std::fprintf(stderr, "offending layers: %s\n", ids.c_str());
        }
        return kExitOom;
    } catch (const tcn::InfeasibleError& e) {
        std::fprintf(stderr, "out of memory: %s\n", e.what());
        return kExitOom;
    } catch (const tcn::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const tcn::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
