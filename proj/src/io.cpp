#include "tcn/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tcn {

using json = nlohmann::ordered_json;

namespace {

json parse_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(std::string(what) + ": cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": malformed JSON in '" + path.string() +
                         "': " + e.what());
    }
    return j;
}

template <typename T>
T get_field(const json& j, const char* field, const char* ctx) {
    if (!j.contains(field))
        throw ParseError(std::string(ctx) + ": missing field '" + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string(ctx) + ": field '" + field + "' has the wrong type");
    }
}

template <typename T>
T get_field_or(const json& j, const char* field, const char* ctx, T fallback) {
    if (!j.contains(field)) return fallback;
    return get_field<T>(j, field, ctx);
}

RequantParams parse_requant(const json& j, const char* ctx) {
    RequantParams rq;
    rq.mult = get_field<std::vector<std::int32_t>>(j, "mult", ctx);
    rq.bias = get_field<std::vector<std::int32_t>>(j, "bias", ctx);
    rq.shift = get_field<int>(j, "shift", ctx);
    rq.relu = get_field<bool>(j, "relu", ctx);
    return rq;
}

// Weight payloads ride in tensor files: t = rows, c = row length.
std::vector<std::int8_t> load_weight_rows(const std::filesystem::path& dir,
                                          const std::string& rel, int rows, int row_len,
                                          const char* ctx) {
    QuantTensorTC t = load_tensor(dir / rel);
    if (t.timesteps != rows || t.channels != row_len)
        throw ParseError(std::string(ctx) + ": field 'weights': file '" + rel + "' holds " +
                         std::to_string(t.timesteps) + "x" + std::to_string(t.channels) +
                         " but the layer needs " + std::to_string(rows) + "x" +
                         std::to_string(row_len));
    return std::move(t.data);
}

} // namespace

QuantTensorTC load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("load_tensor: cannot open '" + path.string() + "'");

    char prefix[17] = {};
    in.read(prefix, 16);
    if (in.gcount() != 16)
        throw ParseError("load_tensor: '" + path.string() +
                         "': truncated length prefix (expected 16 bytes)");
    std::size_t header_len = 0;
    try {
        header_len = std::stoul(std::string(prefix));
    } catch (const std::exception&) {
        throw ParseError("load_tensor: '" + path.string() + "': length prefix '" +
                         std::string(prefix) + "' is not a decimal number");
    }

    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (static_cast<std::size_t>(in.gcount()) != header_len)
        throw ParseError("load_tensor: '" + path.string() + "': truncated JSON header");

    json j;
    try {
        j = json::parse(header);
    } catch (const json::parse_error& e) {
        throw ParseError("load_tensor: '" + path.string() + "': malformed header: " +
                         e.what());
    }
    const int c = get_field<int>(j, "c", "load_tensor header");
    const int t = get_field<int>(j, "t", "load_tensor header");
    const double scale = get_field<double>(j, "scale", "load_tensor header");
    if (c <= 0 || t <= 0)
        throw ParseError("load_tensor: '" + path.string() +
                         "': header fields 'c'/'t' must be positive, got c=" +
                         std::to_string(c) + " t=" + std::to_string(t));

    QuantTensorTC tensor(c, t, scale);
    in.read(reinterpret_cast<char*>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.data.size()));
    if (static_cast<std::size_t>(in.gcount()) != tensor.data.size())
        throw ParseError("load_tensor: '" + path.string() + "': truncated payload, header "
                         "promises " + std::to_string(tensor.data.size()) + " bytes, got " +
                         std::to_string(in.gcount()));
    char extra;
    if (in.read(&extra, 1))
        throw ParseError("load_tensor: '" + path.string() + "': trailing bytes after the "
                         "payload");
    return tensor;
}

void store_tensor(const QuantTensorTC& tensor, const std::filesystem::path& path) {
    tensor.validate();
    json j;
    j["c"] = tensor.channels;
    j["t"] = tensor.timesteps;
    j["scale"] = tensor.scale;
    const std::string header = j.dump();

    std::ostringstream prefix;
    prefix << header.size();
    std::string p = prefix.str();
    if (p.size() > 16)
        throw ParseError("store_tensor: header length does not fit the 16-byte prefix");
    p.resize(16, ' ');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ParseError("store_tensor: cannot open '" + path.string() + "' for writing");
    out.write(p.data(), 16);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(tensor.data.data()),
              static_cast<std::streamsize>(tensor.data.size()));
    if (!out)
        throw ParseError("store_tensor: write to '" + path.string() + "' failed");
}

NetworkSpec load_network(const std::filesystem::path& path) {
    const json j = parse_json_file(path, "load_network");
    const auto dir = path.has_parent_path() ? path.parent_path()
                                            : std::filesystem::path(".");
    if (!j.contains("layers") || !j.at("layers").is_array())
        throw ParseError("load_network: missing or non-array field 'layers'");

    NetworkSpec net;
    int idx = 0;
    for (const auto& lj : j.at("layers")) {
        const std::string ctx = "load_network layer " + std::to_string(idx);
        const std::string type = get_field<std::string>(lj, "type", ctx.c_str());
        if (type == "conv1d") {
            ConvLayerSpec conv;
            conv.geom.c_in = get_field<int>(lj, "c_in", ctx.c_str());
            conv.geom.c_out = get_field<int>(lj, "c_out", ctx.c_str());
            conv.geom.t_in = get_field<int>(lj, "t_in", ctx.c_str());
            conv.geom.k = get_field<int>(lj, "k", ctx.c_str());
            conv.geom.d = get_field<int>(lj, "d", ctx.c_str());
            conv.geom.stride = get_field_or<int>(lj, "stride", ctx.c_str(), 1);
            conv.geom.validate();
            conv.weights = ConvWeights(conv.geom.c_out, conv.geom.k, conv.geom.c_in);
            conv.weights.data = load_weight_rows(
                dir, get_field<std::string>(lj, "weights", ctx.c_str()), conv.geom.c_out,
                conv.geom.k * conv.geom.c_in, ctx.c_str());
            conv.requant = parse_requant(lj, ctx.c_str());
            conv.validate();
            net.layers.emplace_back(std::move(conv));
        } else if (type == "linear") {
            LinearLayerSpec lin;
            lin.in_features = get_field<int>(lj, "in_features", ctx.c_str());
            lin.out_features = get_field<int>(lj, "out_features", ctx.c_str());
            lin.weights = load_weight_rows(
                dir, get_field<std::string>(lj, "weights", ctx.c_str()), lin.out_features,
                lin.in_features, ctx.c_str());
            lin.requant = parse_requant(lj, ctx.c_str());
            lin.validate();
            net.layers.emplace_back(std::move(lin));
        } else if (type == "avgpool1d") {
            AvgPoolLayerSpec pool;
            pool.window = get_field<int>(lj, "window", ctx.c_str());
            pool.stride = get_field<int>(lj, "stride", ctx.c_str());
            pool.validate();
            net.layers.emplace_back(pool);
        } else {
            throw ParseError(ctx + ": unknown field 'type' value '" + type + "'");
        }
        ++idx;
    }
    net.validate_shapes();
    return net;
}

void store_network(const NetworkSpec& net, const std::filesystem::path& path) {
    net.validate_shapes();
    const auto dir = path.has_parent_path() ? path.parent_path()
                                            : std::filesystem::path(".");
    const std::string stem = path.stem().string();

    json j;
    j["layers"] = json::array();
    int idx = 0;
    for (const auto& layer : net.layers) {
        json lj;
        const std::string wname = stem + "_w" + std::to_string(idx) + ".tensor";
        if (const auto* conv = std::get_if<ConvLayerSpec>(&layer)) {
            lj["type"] = "conv1d";
            lj["c_in"] = conv->geom.c_in;
            lj["c_out"] = conv->geom.c_out;
            lj["t_in"] = conv->geom.t_in;
            lj["k"] = conv->geom.k;
            lj["d"] = conv->geom.d;
            lj["stride"] = conv->geom.stride;
            lj["weights"] = wname;
            lj["mult"] = conv->requant.mult;
            lj["bias"] = conv->requant.bias;
            lj["shift"] = conv->requant.shift;
            lj["relu"] = conv->requant.relu;
            QuantTensorTC w(conv->geom.k * conv->geom.c_in, conv->geom.c_out, 1.0);
            w.data = conv->weights.data;
            store_tensor(w, dir / wname);
        } else if (const auto* lin = std::get_if<LinearLayerSpec>(&layer)) {
            lj["type"] = "linear";
            lj["in_features"] = lin->in_features;
            lj["out_features"] = lin->out_features;
            lj["weights"] = wname;
            lj["mult"] = lin->requant.mult;
            lj["bias"] = lin->requant.bias;
            lj["shift"] = lin->requant.shift;
            lj["relu"] = lin->requant.relu;
            QuantTensorTC w(lin->in_features, lin->out_features, 1.0);
            w.data = lin->weights;
            store_tensor(w, dir / wname);
        } else {
            const auto& pool = std::get<AvgPoolLayerSpec>(layer);
            lj["type"] = "avgpool1d";
            lj["window"] = pool.window;
            lj["stride"] = pool.stride;
        }
        j["layers"].push_back(std::move(lj));
        ++idx;
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ParseError("store_network: cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
}

HardwareModel load_hardware(const std::filesystem::path& path) {
    const json j = parse_json_file(path, "load_hardware");
    HardwareModel hw;
    hw.n_cores = get_field<int>(j, "n_cores", "load_hardware");
    hw.l1_bytes = get_field<std::size_t>(j, "l1_bytes", "load_hardware");
    hw.l2_bytes = get_field<std::size_t>(j, "l2_bytes", "load_hardware");
    hw.alpha = get_field<double>(j, "alpha", "load_hardware");
    hw.beta = get_field<double>(j, "beta", "load_hardware");
    hw.gamma = get_field<double>(j, "gamma", "load_hardware");
    hw.delta = get_field<double>(j, "delta", "load_hardware");
    hw.epsilon = get_field<double>(j, "epsilon", "load_hardware");
    hw.gamma_prime = get_field_or<double>(j, "gamma_prime", "load_hardware", hw.gamma / 2.0);
    hw.offset_bytes = get_field_or<int>(j, "offset_bytes", "load_hardware", 4);
    try {
        hw.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError("load_hardware: '" + path.string() + "': " + e.what());
    }
    return hw;
}

void store_hardware(const HardwareModel& hw, const std::filesystem::path& path) {
    hw.validate();
    json j;
    j["n_cores"] = hw.n_cores;
    j["l1_bytes"] = hw.l1_bytes;
    j["l2_bytes"] = hw.l2_bytes;
    j["alpha"] = hw.alpha;
    j["beta"] = hw.beta;
    j["gamma"] = hw.gamma;
    j["delta"] = hw.delta;
    j["epsilon"] = hw.epsilon;
    j["gamma_prime"] = hw.gamma_prime;
    j["offset_bytes"] = hw.offset_bytes;
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ParseError("store_hardware: cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
}

} // namespace tcn
