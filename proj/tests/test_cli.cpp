#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "tcn/io.hpp"

namespace fs = std::filesystem;
using namespace tcn;

namespace {

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "tcn_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), {});
}

CmdResult run_tool(const std::string& args) {
    const fs::path outp = work_dir() / "stdout.txt";
    const fs::path errp = work_dir() / "stderr.txt";
    const std::string cmd = std::string(TCNMAP_BIN) + " " + args + " > " +
                            outp.string() + " 2> " + errp.string();
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(outp);
    r.err = slurp(errp);
    return r;
}

std::string gap8() { return (fs::path(DATA_DIR) / "hw_gap8.json").string(); }
std::string desk() { return (fs::path(DATA_DIR) / "hw_desk.json").string(); }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("shipped hardware descriptions carry the expected budgets") {
    const HardwareModel g = load_hardware(gap8());
    CHECK(g.n_cores == 8);
    CHECK(g.l1_bytes == 65536);
    CHECK(g.l2_bytes == 4 * 1024 * 1024);
    CHECK(g.alpha == 10.0);
    CHECK(g.beta == 0.25);
    CHECK(g.gamma == 8.0);
    CHECK(g.delta == 1.0);
    CHECK(g.epsilon == 20.0);
    CHECK(g.gamma_prime == 12.0);
    CHECK(g.offset_bytes == 4);

    const HardwareModel d = load_hardware(desk());
    CHECK(d.n_cores == 8);
    CHECK(d.l1_bytes == 73728);
    CHECK(d.l2_bytes == 8 * 1024 * 1024);
}

TEST_CASE("help and usage errors") {
    CHECK(run_tool("--help").code == 0);
    CHECK(run_tool("").code == 1);             // a subcommand is required
    CHECK(run_tool("plan").code == 1);         // missing positionals
    CHECK(run_tool("frobnicate").code == 1);   // unknown subcommand
}

TEST_CASE("full pipeline: generate, plan, execute, verify") {
    const fs::path d = work_dir();
    const std::string net = (d / "temponet.json").string();
    const std::string input = (d / "input.bin").string();
    const std::string plan = (d / "plan.json").string();
    const std::string output = (d / "output.bin").string();
    const std::string report = (d / "report.csv").string();

    CmdResult r = run_tool("gen-net --arch temponet --seed 7 -o " + net);
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "11 layers"));
    CHECK(contains(r.out, "4x256"));

    r = run_tool("gen-input --net " + net + " --seed 8 -o " + input);
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "4x256"));

    r = run_tool("plan " + net + " " + gap8() + " -o " + plan);
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "total predicted cycles:"));
    CHECK(contains(r.out, "avgpool"));
    CHECK(contains(r.out, "linear"));

    r = run_tool("run " + net + " " + gap8() + " " + plan + " " + input + " -o " +
                 output + " --report " + report + " --check-oracle");
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "outputs match bit-exactly"));

    const QuantTensorTC y = load_tensor(output);
    CHECK(y.channels == 8);
    CHECK(y.timesteps == 1);

    const std::string csv = slurp(report);
    CHECK(contains(csv, "layer,kernel,"));
    CHECK(contains(csv, "\ntotal,"));
}

TEST_CASE("outputs are byte-deterministic across repeats and worker counts") {
    const fs::path d = work_dir();
    // Same file name in two directories: the network JSON references its
    // weight sidecars by name, so the name must match for a byte comparison.
    fs::create_directories(d / "det_a");
    fs::create_directories(d / "det_b");
    const std::string net = (d / "det_a" / "net.json").string();
    const std::string net2 = (d / "det_b" / "net.json").string();
    const std::string input = (d / "det_input.bin").string();
    const std::string plan1 = (d / "det_plan1.json").string();
    const std::string plan2 = (d / "det_plan2.json").string();

    REQUIRE(run_tool("gen-net --arch restcn-sound --seed 5 -o " + net).code == 0);
    REQUIRE(run_tool("gen-net --arch restcn-sound --seed 5 -o " + net2).code == 0);
    CHECK(slurp(net) == slurp(net2));
    CHECK(slurp(d / "det_a" / "net_w0.tensor") == slurp(d / "det_b" / "net_w0.tensor"));

    REQUIRE(run_tool("gen-input --net " + net + " --seed 6 -o " + input).code == 0);
    REQUIRE(run_tool("plan " + net + " " + desk() + " -o " + plan1).code == 0);
    REQUIRE(run_tool("plan " + net + " " + desk() + " -o " + plan2).code == 0);
    CHECK(slurp(plan1) == slurp(plan2));

    std::string out1, out2, rep1, rep2;
    for (int workers : {1, 8}) {
        const std::string o = (d / ("det_out" + std::to_string(workers))).string();
        const std::string rep = (d / ("det_rep" + std::to_string(workers))).string();
        REQUIRE(run_tool("run " + net + " " + desk() + " " + plan1 + " " + input +
                         " -o " + o + " --report " + rep + " --workers " +
                         std::to_string(workers))
                    .code == 0);
        (workers == 1 ? out1 : out2) = slurp(o);
        (workers == 1 ? rep1 : rep2) = slurp(rep);
    }
    CHECK(out1 == out2);
    CHECK(rep1 == rep2);
}

TEST_CASE("parse and configuration failures exit 1") {
    const fs::path d = work_dir();
    const std::string broken = (d / "broken.json").string();
    std::ofstream(broken) << "this is not json";

    CmdResult r = run_tool("plan " + broken + " " + gap8());
    CHECK(r.code == 1);
    CHECK(contains(r.err, "error:"));

    CHECK(run_tool("plan " + (d / "missing.json").string() + " " + gap8()).code == 1);

    const std::string net = (d / "obj_net.json").string();
    REQUIRE(run_tool("gen-net --arch bench1 --seed 1 -o " + net).code == 0);
    r = run_tool("plan " + net + " " + gap8() + " --objective fastest");
    CHECK(r.code == 1);

    r = run_tool("gen-net --arch nosuch --seed 1 -o " + (d / "x.json").string());
    CHECK(r.code == 1);

    r = run_tool("sweep " + gap8() + " --param cin --range 9:3");
    CHECK(r.code == 1);
    CHECK(contains(r.err, "lo <= hi"));

    r = run_tool("sweep " + gap8() + " --param cin --range abc");
    CHECK(r.code == 1);
    CHECK(contains(r.err, "lo:hi"));

    r = run_tool("sweep " + gap8() + " --param depth --range 1:2");
    CHECK(r.code == 1);
    CHECK(contains(r.err, "unknown parameter"));
}

TEST_CASE("a plan for one network is rejected against another") {
    const fs::path d = work_dir();
    const std::string bench = (d / "mix_bench.json").string();
    const std::string temponet = (d / "mix_tempo.json").string();
    const std::string plan = (d / "mix_plan.json").string();
    const std::string input = (d / "mix_input.bin").string();
    REQUIRE(run_tool("gen-net --arch bench1 --seed 2 -o " + bench).code == 0);
    REQUIRE(run_tool("gen-net --arch temponet --seed 2 -o " + temponet).code == 0);
    REQUIRE(run_tool("plan " + bench + " " + gap8() + " -o " + plan).code == 0);
    REQUIRE(run_tool("gen-input --net " + temponet + " --seed 3 -o " + input).code == 0);

    const CmdResult r =
        run_tool("run " + temponet + " " + gap8() + " " + plan + " " + input);
    CHECK(r.code == 1);
    CHECK(contains(r.err, "error:"));
}

TEST_CASE("memory-infeasible plans exit 2 and name the offending layers") {
    const fs::path d = work_dir();
    const std::string net = (d / "lang.json").string();
    REQUIRE(run_tool("gen-net --arch restcn-lang --seed 9 -o " + net).code == 0);

    CmdResult r = run_tool("plan " + net + " " + gap8() + " --force-kernel im2col");
    CHECK(r.code == 2);
    CHECK(contains(r.err, "out of memory"));
    CHECK(contains(r.err, "offending layers: 8, 9"));

    r = run_tool("plan " + net + " " + gap8() + " --force-kernel indirect");
    CHECK(r.code == 0);
}

TEST_CASE("sweep writes one row per variant per point") {
    const fs::path d = work_dir();
    const std::string csv_path = (d / "sweep.csv").string();
    const CmdResult r = run_tool("sweep " + gap8() +
                                 " --param cin --range 4:12:4 --cout 8 --t 16 -o " +
                                 csv_path);
    REQUIRE(r.code == 0);
    const std::string csv = slurp(csv_path);
    CHECK(contains(
        csv, "param,value,variant,macs,predicted_cycles,event_cycles,"
             "macs_per_cycle,model_error"));
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 1 + 3 * 3); // header + 3 sweep points x 3 variants
    // c_out = 8 sits in the exact-model regime: no divergence anywhere.
    CHECK(contains(csv, ",0.0000\n"));
    CHECK(!contains(csv, "nan"));
}

TEST_CASE("calibration reproduces the shipped constants and rejects bad lattices") {
    const fs::path d = work_dir();
    const std::string out = (d / "calibrated.json").string();
    CmdResult r = run_tool("calibrate " + gap8() + " -o " + out);
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "alpha=10"));
    CHECK(contains(r.out, "gamma_prime=12"));
    const HardwareModel cal = load_hardware(out);
    CHECK(cal.alpha == 10.0);
    CHECK(cal.beta == 0.25);
    CHECK(cal.gamma == 8.0);
    CHECK(cal.delta == 1.0);
    CHECK(cal.epsilon == 20.0);
    CHECK(cal.gamma_prime == 12.0);
    CHECK(cal.l1_bytes == 65536); // memory budgets come from the base file

    r = run_tool("calibrate " + gap8() + " --lattice degenerate");
    CHECK(r.code == 4);
    CHECK(contains(r.err, "calibration failed"));

    r = run_tool("calibrate " + gap8() + " --lattice fancy");
    CHECK(r.code == 1);
}
