#pragma once

#include <map>
#include <string>
#include <vector>

#include "ovle/common.hpp"
#include "ovle/metrics.hpp"
#include "ovle/optimizer.hpp"
#include "ovle/signature.hpp"

namespace ovle {

// Embedding dump: header (magic "OVLE", u32 n, u32 d, u32 signature length,
// signature bytes), then the n*d embedding row-major as little-endian f64,
// then the scalar parameter block.
struct EmbeddingDump {
    int n = 0;
    int d = 0;
    std::string signature_text;
    std::vector<double> params;  // [n*d | scalars]
};

void save_embedding(const std::string& path, const EmbeddingDump& dump);
EmbeddingDump load_embedding(const std::string& path);

// CSV "iteration,loss,metric"; the metric column is filled on the last row.
void save_loss_trace(const std::string& path, const std::vector<TraceEntry>& trace,
                     double final_metric);

std::string report_json(const MetricsReport& r);      // canonical key order
std::string report_csv_header();
std::string report_csv_row(const MetricsReport& r);   // dataset,signature,...

// Flat "key = value" config file; '#' comments.  Unknown keys are an error.
std::map<std::string, std::string> load_config_file(const std::string& path,
                                                    const std::vector<std::string>& known_keys);

// Dataset manifest: "name path" per line, '#' comments.
std::map<std::string, std::string> load_manifest(const std::string& path);

}  // namespace ovle
