#include "ovle/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ovle {

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

}  // namespace

void save_embedding(const std::string& path, const EmbeddingDump& dump) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write("OVLE", 4);
    write_u32(out, static_cast<std::uint32_t>(dump.n));
    write_u32(out, static_cast<std::uint32_t>(dump.d));
    write_u32(out, static_cast<std::uint32_t>(dump.signature_text.size()));
    out.write(dump.signature_text.data(),
              static_cast<std::streamsize>(dump.signature_text.size()));
    out.write(reinterpret_cast<const char*>(dump.params.data()),
              static_cast<std::streamsize>(dump.params.size() * sizeof(double)));
    if (!out) throw DataError("write failed: " + path);
}

EmbeddingDump load_embedding(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "OVLE", 4) != 0)
        throw DataError("bad embedding file header: " + path);
    EmbeddingDump dump;
    dump.n = static_cast<int>(read_u32(in));
    dump.d = static_cast<int>(read_u32(in));
    const std::uint32_t siglen = read_u32(in);
    dump.signature_text.resize(siglen);
    in.read(dump.signature_text.data(), siglen);
    const Signature sig = parse_signature(dump.signature_text, dump.d);
    dump.params.resize(static_cast<std::size_t>(dump.n) * dump.d + sig.scalar_count());
    in.read(reinterpret_cast<char*>(dump.params.data()),
            static_cast<std::streamsize>(dump.params.size() * sizeof(double)));
    if (!in) throw DataError("truncated embedding file: " + path);
    return dump;
}

void save_loss_trace(const std::string& path, const std::vector<TraceEntry>& trace,
                     double final_metric) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "iteration,loss,metric\n";
    out.precision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << trace[i].iteration << ',' << trace[i].loss << ',';
        if (i + 1 == trace.size()) out << final_metric;
        out << '\n';
    }
}

std::string report_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["signature"] = r.signature;
    j["loss"] = r.loss;
    j["conversion"] = r.conversion;
    j["lr"] = r.lr;
    j["seed"] = r.seed;
    j["iterations"] = r.iterations;
    j["threads"] = r.threads;
    j["distortion"] = r.distortion;
    j["map"] = r.map;
    j["seconds"] = r.seconds;
    return j.dump(2);
}

std::string report_csv_header() {
    return "dataset,signature,loss,lr,seed,distortion,map,seconds";
}

std::string report_csv_row(const MetricsReport& r) {
    std::ostringstream ss;
    ss.precision(17);
    ss << r.dataset << ',' << r.signature << ','
       << (r.conversion.empty() ? r.loss : r.loss + "-" + r.conversion) << ',' << r.lr
       << ',' << r.seed << ',' << r.distortion << ',' << r.map << ',' << r.seconds;
    return ss.str();
}

std::map<std::string, std::string> load_config_file(
    const std::string& path, const std::vector<std::string>& known_keys) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected \"key = value\"");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unknown key \"" + key + "\"");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset manifest: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string name, p;
        if (!(ss >> name) || name[0] == '#') continue;
        if (!(ss >> p)) throw DataError("manifest entry without a path: " + name);
        out[name] = p;
    }
    return out;
}

}  // namespace ovle
