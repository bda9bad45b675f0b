#ifndef TCN_REPORT_HPP
#define TCN_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "tcn/mapper.hpp"

namespace tcn {

// Per-layer run summary. macs counts the logical multiply-accumulates of the
// layer (t_out*c_out*k*c_in for a conv), independent of the variant executed.
struct ReportRow {
    int layer = 0;
    std::string kernel;
    int tile_t = 0;
    int tile_cout = 0;
    std::uint64_t macs = 0;
    double pred_cycles = 0.0;
    double event_cycles = 0.0;
    double macs_per_cycle = 0.0;
    std::size_t l1_bytes = 0;
};

std::vector<ReportRow> build_report(const NetworkSpec& net,
                                    const MappingPlan& plan,
                                    const ExecutionResult& result);

// CSV with a trailing "total" row; reals fixed to 4 decimals.
void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::filesystem::path& path);
std::string format_report_table(const std::vector<ReportRow>& rows);

} // namespace tcn

#endif
