#include "tcn/report.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

#include "tcn/io.hpp"

namespace tcn {

namespace {

std::uint64_t layer_macs(const LayerSpec& layer) {
    if (const auto* conv = std::get_if<ConvLayerSpec>(&layer)) {
        const ConvGeometry& g = conv->geom;
        return static_cast<std::uint64_t>(g.t_out()) * g.c_out * g.k * g.c_in;
    }
    if (const auto* lin = std::get_if<LinearLayerSpec>(&layer))
        return static_cast<std::uint64_t>(lin->in_features) * lin->out_features;
    return 0;
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

std::vector<ReportRow> build_report(const NetworkSpec& net, const MappingPlan& plan,
                                    const ExecutionResult& result) {
    if (plan.layers.size() != net.layers.size() ||
        result.layer_event_cycles.size() != net.layers.size())
        throw std::invalid_argument("build_report: plan/result layer count mismatch");

    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        ReportRow r;
        r.layer = static_cast<int>(i);
        r.kernel = plan.layers[i].kernel;
        r.tile_t = plan.layers[i].tile.tile_t_out;
        r.tile_cout = plan.layers[i].tile.tile_c_out;
        r.macs = layer_macs(net.layers[i]);
        r.pred_cycles = plan.layers[i].tile.predicted_cycles;
        r.event_cycles = result.layer_event_cycles[i];
        r.macs_per_cycle =
            r.event_cycles > 0.0 ? static_cast<double>(r.macs) / r.event_cycles : 0.0;
        r.l1_bytes = plan.layers[i].tile.worst_bytes.total();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ParseError("write_report_csv: cannot open '" + path.string() +
                         "' for writing");
    out << "layer,kernel,tile_t,tile_cout,macs,pred_cycles,event_cycles,"
           "macs_per_cycle,l1_bytes\n";
    std::uint64_t macs = 0;
    std::size_t worst_l1 = 0;
    double pred = 0.0, event = 0.0;
    for (const auto& r : rows) {
        out << r.layer << ',' << r.kernel << ',' << r.tile_t << ',' << r.tile_cout << ','
            << r.macs << ',' << fixed4(r.pred_cycles) << ',' << fixed4(r.event_cycles)
            << ',' << fixed4(r.macs_per_cycle) << ',' << r.l1_bytes << '\n';
        macs += r.macs;
        pred += r.pred_cycles;
        event += r.event_cycles;
        worst_l1 = std::max(worst_l1, r.l1_bytes);
    }
    out << "total,-,-,-," << macs << ',' << fixed4(pred) << ',' << fixed4(event) << ','
        << fixed4(event > 0.0 ? static_cast<double>(macs) / event : 0.0) << ','
        << worst_l1 << '\n';
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%5s  %-9s  %6s  %6s  %12s  %14s  %14s  %8s  %9s\n",
                  "layer", "kernel", "tile_t", "tile_c", "macs", "pred_cycles",
                  "event_cycles", "mac/cyc", "l1_bytes");
    out += line;

    std::uint64_t macs = 0;
    std::size_t worst_l1 = 0;
    double pred = 0.0, event = 0.0;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line,
                      "%5d  %-9s  %6d  %6d  %12llu  %14.4f  %14.4f  %8.4f  %9zu\n",
                      r.layer, r.kernel.c_str(), r.tile_t, r.tile_cout,
                      static_cast<unsigned long long>(r.macs), r.pred_cycles,
                      r.event_cycles, r.macs_per_cycle, r.l1_bytes);
        out += line;
        macs += r.macs;
        pred += r.pred_cycles;
        event += r.event_cycles;
        worst_l1 = std::max(worst_l1, r.l1_bytes);
    }
    std::snprintf(line, sizeof line,
                  "%5s  %-9s  %6s  %6s  %12llu  %14.4f  %14.4f  %8.4f  %9zu\n", "total",
                  "-", "-", "-", static_cast<unsigned long long>(macs), pred, event,
                  event > 0.0 ? static_cast<double>(macs) / event : 0.0, worst_l1);
    out += line;
    return out;
}

} // namespace tcn
