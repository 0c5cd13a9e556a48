// Command-line front end: train and evaluate graph embeddings in Euclidean,
// spherical, hyperbolic, product, overlaying and dot-similarity spaces.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ovle/graph.hpp"
#include "ovle/io.hpp"
#include "ovle/losses.hpp"
#include "ovle/metrics.hpp"
#include "ovle/model.hpp"
#include "ovle/optimizer.hpp"
#include "ovle/signature.hpp"

namespace fs = std::filesystem;
using namespace ovle;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct RunConfig {
    std::string dataset;
    std::string manifest = "datasets.manifest";
    bool weighted = false;
    bool raw_weights = false;  // weighted complete graphs: use edge weights directly
    std::string signature = "E10";
    int dim = 10;
    std::string loss = "distortion";
    std::string conversion = "t1";
    double lr = 0.1;
    std::vector<double> lr_sweep;
    int iterations = 2000;
    std::uint64_t seed = 1;
    int threads = 1;
    int restarts = 1;
    double d0 = 1e-2;
    bool literal_min = false;
    bool exclude_self = false;
    double init_scale = 0.1;
    std::string output = "out";
    std::string dist_cache;
    std::string config_path;
};

struct Dataset {
    std::string name;
    Graph graph;
    std::optional<DistanceMatrix> dists;
};

const std::map<std::string, bool> kBuiltinWeighted = {
    {"usca312", true}, {"csphd", false}, {"power", false},
    {"facebook", false}, {"wla6", false}};

std::string resolve_dataset_path(const RunConfig& cfg, bool& weighted) {
    weighted = cfg.weighted;
    if (fs::exists(cfg.dataset)) return cfg.dataset;
    const auto builtin = kBuiltinWeighted.find(cfg.dataset);
    if (builtin == kBuiltinWeighted.end())
        throw DataError("dataset not found: " + cfg.dataset);
    weighted = builtin->second || cfg.weighted;
    const auto manifest = load_manifest(cfg.manifest);
    const auto it = manifest.find(cfg.dataset);
    if (it == manifest.end())
        throw DataError("dataset \"" + cfg.dataset + "\" missing from manifest " +
                        cfg.manifest);
    if (!fs::exists(it->second))
        throw DataError("manifest path does not exist: " + it->second);
    return it->second;
}

Dataset load_dataset(const RunConfig& cfg, bool need_dists) {
    bool weighted = false;
    const std::string path = resolve_dataset_path(cfg, weighted);
    Dataset ds;
    ds.name = cfg.dataset;
    ds.graph = load_edge_list(path, weighted);
    if (need_dists || weighted) {
        if (!cfg.dist_cache.empty() && fs::exists(cfg.dist_cache)) {
            ds.dists = load_distance_cache(cfg.dist_cache);
            if (ds.dists->n != ds.graph.node_count)
                throw DataError("distance cache size mismatch: " + cfg.dist_cache);
        } else {
            ds.dists = (weighted && cfg.raw_weights) ? raw_weight_distances(ds.graph)
                                                     : shortest_paths(ds.graph, cfg.threads);
            if (!cfg.dist_cache.empty()) save_distance_cache(cfg.dist_cache, *ds.dists);
        }
    }
    return ds;
}

LossSpec make_loss_spec(const RunConfig& cfg) {
    LossSpec spec;
    if (cfg.loss == "distortion")
        spec.kind = LossKind::Distortion;
    else if (cfg.loss == "proxy")
        spec.kind = LossKind::Proxy;
    else
        throw ConfigError("unknown loss: " + cfg.loss);
    if (cfg.conversion == "t1")
        spec.conversion = Conversion::T1;
    else if (cfg.conversion == "t2")
        spec.conversion = Conversion::T2;
    else if (cfg.conversion == "t3")
        spec.conversion = Conversion::T3;
    else
        throw ConfigError("unknown conversion: " + cfg.conversion);
    spec.d0 = cfg.d0;
    spec.literal_min = cfg.literal_min;
    spec.exclude_self = cfg.exclude_self;
    return spec;
}

TrainConfig make_train_config(const RunConfig& cfg, std::uint64_t seed) {
    TrainConfig tc;
    tc.iterations = cfg.iterations;
    tc.learning_rate = cfg.lr;
    tc.lr_sweep = cfg.lr_sweep;
    tc.seed = seed;
    tc.init_scale = cfg.init_scale;
    tc.threads = cfg.threads;
    return tc;
}

struct RunOutput {
    TrainResult result;
    MetricsReport report;
};

RunOutput run_training(const Dataset& ds, const RunConfig& cfg, const Signature& sig,
                       std::uint64_t seed) {
    const LossSpec spec = make_loss_spec(cfg);
    const TrainConfig tc = make_train_config(cfg, seed);
    const DistanceMatrix* dists = ds.dists ? &*ds.dists : nullptr;

    const auto t0 = std::chrono::steady_clock::now();
    TrainResult res = train(ds.graph, dists, sig, spec, tc);
    const auto t1 = std::chrono::steady_clock::now();
    if (res.diverged) throw NumericError("training diverged for every learning rate");

    const DistanceModel model(sig);
    const int n = ds.graph.node_count;
    const ModelParams mp = model.decode(ConstSpan(res.params).subspan(
        static_cast<std::size_t>(n) * model.dim(), model.scalar_count()));
    ConstSpan emb(res.params.data(), static_cast<std::size_t>(n) * model.dim());

    MetricsReport rep;
    rep.dataset = ds.name;
    rep.signature = sig.text;
    rep.loss = cfg.loss;
    rep.conversion = spec.kind == LossKind::Proxy ? cfg.conversion : "";
    rep.lr = res.learning_rate;
    rep.seed = seed;
    rep.iterations = cfg.iterations;
    rep.threads = cfg.threads;
    rep.distortion = dists ? distortion_metric(model, mp, emb, *dists, cfg.threads)
                           : std::nan("");
    rep.map = map_metric(model, mp, emb, ds.graph, dists, cfg.threads);
    rep.seconds = std::chrono::duration<double>(t1 - t0).count();
    return {std::move(res), std::move(rep)};
}

int cmd_embed(const RunConfig& cfg) {
    const Signature sig = parse_signature(cfg.signature, cfg.dim);
    const LossSpec spec = make_loss_spec(cfg);
    const bool need_dists = spec.kind == LossKind::Distortion;
    const Dataset ds = load_dataset(cfg, need_dists);

    fs::create_directories(cfg.output);
    std::ofstream csv(fs::path(cfg.output) / "report.csv");
    csv << report_csv_header() << "\n";

    double sum_d = 0.0, sum_m = 0.0, min_m = 1e300, max_m = -1e300;
    double min_d = 1e300, max_d = -1e300;
    for (int r = 0; r < cfg.restarts; ++r) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
        RunOutput out = run_training(ds, cfg, sig, seed);

        const std::string tag = cfg.restarts > 1 ? "." + std::to_string(r) : "";
        EmbeddingDump dump{ds.graph.node_count, sig.ambient_dim, sig.text,
                           out.result.params};
        save_embedding((fs::path(cfg.output) / ("embedding" + tag + ".ovle")).string(),
                       dump);
        save_loss_trace((fs::path(cfg.output) / ("trace" + tag + ".csv")).string(),
                        out.result.trace, out.report.distortion);
        std::ofstream json(fs::path(cfg.output) / ("report" + tag + ".json"));
        json << report_json(out.report) << "\n";
        csv << report_csv_row(out.report) << "\n";
        std::cout << report_json(out.report) << "\n";

        if (need_dists) {
            sum_d += out.report.distortion;
            min_d = std::min(min_d, out.report.distortion);
            max_d = std::max(max_d, out.report.distortion);
        }
        sum_m += out.report.map;
        min_m = std::min(min_m, out.report.map);
        max_m = std::max(max_m, out.report.map);
    }
    if (cfg.restarts > 1) {
        std::cout << "restarts=" << cfg.restarts;
        if (need_dists)
            std::cout << " distortion mean " << sum_d / cfg.restarts << " spread ["
                      << min_d << ", " << max_d << "]";
        std::cout << "  map mean " << sum_m / cfg.restarts << " spread [" << min_m
                  << ", " << max_m << "]\n";
    }
    return 0;
}

int cmd_sweep(RunConfig cfg, const std::vector<std::string>& signatures) {
    if (signatures.empty()) throw ConfigError("sweep: at least one signature required");
    const LossSpec spec = make_loss_spec(cfg);
    const Dataset ds = load_dataset(cfg, spec.kind == LossKind::Distortion);
    const std::vector<double> rates =
        cfg.lr_sweep.empty() ? std::vector<double>{cfg.lr} : cfg.lr_sweep;

    fs::create_directories(cfg.output);
    std::ofstream csv(fs::path(cfg.output) / "sweep.csv");
    csv << report_csv_header() << ",best\n";
    std::ofstream md(fs::path(cfg.output) / "sweep.md");
    md << "| signature | lr | distortion | mAP | seconds |\n";
    md << "|---|---|---|---|---|\n";

    RunConfig one = cfg;
    one.lr_sweep.clear();
    for (const std::string& sig_text : signatures) {
        const Signature sig = parse_signature(sig_text, cfg.dim);
        std::vector<MetricsReport> rows;
        int best_idx = -1;
        for (double lr : rates) {
            one.lr = lr;
            try {
                RunOutput out = run_training(ds, one, sig, cfg.seed);
                rows.push_back(out.report);
            } catch (const NumericError& e) {
                std::cerr << "warning: " << sig.text << " lr " << lr
                          << " failed: " << e.what() << "\n";
                MetricsReport failed;
                failed.dataset = ds.name;
                failed.signature = sig.text;
                failed.loss = cfg.loss;
                failed.lr = lr;
                failed.seed = cfg.seed;
                failed.distortion = std::nan("");
                failed.map = std::nan("");
                rows.push_back(failed);
                continue;
            }
            const bool minimize = spec.kind == LossKind::Distortion;
            const double score = minimize ? rows.back().distortion : -rows.back().map;
            if (best_idx < 0 ||
                score < (minimize ? rows[best_idx].distortion : -rows[best_idx].map))
                best_idx = static_cast<int>(rows.size()) - 1;
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            csv << report_csv_row(rows[i]) << ','
                << (static_cast<int>(i) == best_idx ? "1" : "0") << "\n";
            md << "| " << (static_cast<int>(i) == best_idx ? "**" : "") << rows[i].signature
               << (static_cast<int>(i) == best_idx ? "**" : "") << " | " << rows[i].lr
               << " | " << rows[i].distortion << " | " << rows[i].map << " | "
               << rows[i].seconds << " |\n";
        }
    }
    std::cout << "sweep written to " << cfg.output << "\n";
    return 0;
}

int cmd_bipartite(RunConfig cfg, const std::vector<std::string>& signatures, int n_small,
                  int n_large, double p, int seeds, int iters_proxy) {
    std::vector<std::string> sigs = signatures;
    if (sigs.empty())
        sigs = {"E10", "H10", "S9", "H5xS4", "OL1:t=0", "OL1:t=1", "OL2:t=1", "DOT"};
    const std::vector<double> rates =
        cfg.lr_sweep.empty() ? std::vector<double>{0.1, 0.05, 0.01, 0.001} : cfg.lr_sweep;

    fs::create_directories(cfg.output);
    std::ofstream csv(fs::path(cfg.output) / "bipartite.csv");
    csv << "signature,metric,value,seeds\n";

    struct Cell {
        double distortion_sum = 0.0;
        double map_sum = 0.0;
    };
    std::map<std::string, Cell> cells;

    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
        Dataset ds;
        ds.name = "bipartite";
        ds.graph = generate_bipartite(n_small, n_large, p, seed);
        ds.dists = shortest_paths(ds.graph, cfg.threads);

        for (const std::string& sig_text : sigs) {
            const Signature sig = parse_signature(sig_text, cfg.dim);
            double best_distortion = 1e300, best_map = -1.0;
            for (double lr : rates) {
                RunConfig one = cfg;
                one.lr = lr;
                one.lr_sweep.clear();
                one.seed = seed;
                try {
                    one.loss = "distortion";
                    one.iterations = cfg.iterations;
                    RunOutput dout = run_training(ds, one, sig, seed);
                    best_distortion = std::min(best_distortion, dout.report.distortion);
                } catch (const NumericError&) {
                }
                if (sig.is_metric() || cfg.conversion == "t1") {
                    try {
                        one.loss = "proxy";
                        one.iterations = iters_proxy;
                        RunOutput pout = run_training(ds, one, sig, seed);
                        best_map = std::max(best_map, pout.report.map);
                    } catch (const NumericError&) {
                    }
                }
            }
            cells[sig.text].distortion_sum += best_distortion;
            cells[sig.text].map_sum += best_map;
        }
    }

    double best_metric_map = -1.0, best_metric_distortion = 1e300;
    std::string best_map_sig, best_dist_sig;
    for (const std::string& sig_text : sigs) {
        const Signature sig = parse_signature(sig_text, cfg.dim);
        const Cell& c = cells[sig.text];
        const double md = c.distortion_sum / seeds, mm = c.map_sum / seeds;
        csv << sig.text << ",distortion," << md << ',' << seeds << "\n";
        csv << sig.text << ",map," << mm << ',' << seeds << "\n";
        std::cout << sig.text << "  distortion " << md << "  mAP " << mm << "\n";
        if (sig.is_metric()) {
            if (mm > best_metric_map) {
                best_metric_map = mm;
                best_map_sig = sig.text;
            }
            if (md < best_metric_distortion) {
                best_metric_distortion = md;
                best_dist_sig = sig.text;
            }
        }
    }
    if (cells.count("DOT")) {
        const Cell& c = cells["DOT"];
        std::cout << "best metric space mAP " << best_metric_map << " (" << best_map_sig
                  << ") vs DOT " << c.map_sum / seeds << "\n";
        std::cout << "best metric space distortion " << best_metric_distortion << " ("
                  << best_dist_sig << ") vs DOT " << c.distortion_sum / seeds << "\n";
    }
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& embedding_path) {
    const EmbeddingDump dump = load_embedding(embedding_path);
    const Signature sig = parse_signature(dump.signature_text, dump.d);
    const DistanceModel model(sig);
    RunConfig c = cfg;
    c.dim = dump.d;
    const Dataset ds = load_dataset(c, true);
    if (ds.graph.node_count != dump.n)
        throw DataError("embedding/dataset node count mismatch");

    const ModelParams mp = model.decode(ConstSpan(dump.params).subspan(
        static_cast<std::size_t>(dump.n) * dump.d, sig.scalar_count()));
    ConstSpan emb(dump.params.data(), static_cast<std::size_t>(dump.n) * dump.d);

    MetricsReport rep;
    rep.dataset = ds.name;
    rep.signature = sig.text;
    rep.loss = "eval";
    rep.distortion = distortion_metric(model, mp, emb, *ds.dists, cfg.threads);
    rep.map = map_metric(model, mp, emb, ds.graph, &*ds.dists, cfg.threads);
    std::cout << report_json(rep) << "\n";
    return 0;
}

int cmd_gen_bipartite(int n_small, int n_large, double p, std::uint64_t seed,
                      const std::string& out_path) {
    const Graph g = generate_bipartite(n_small, n_large, p, seed);
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot open for writing: " + out_path);
    out << "# bipartite " << n_small << " " << n_large << " p=" << p << " seed=" << seed
        << "\n";
    for (const Graph::Edge& e : g.edges) out << e.u << ' ' << e.v << "\n";
    std::cout << "nodes " << g.node_count << " edges " << g.edges.size() << " -> "
              << out_path << "\n";
    return 0;
}

void add_run_options(CLI::App* app, RunConfig& cfg) {
    app->add_option("--dataset", cfg.dataset, "Edge-list path or builtin name");
    app->add_option("--manifest", cfg.manifest, "Dataset manifest file");
    app->add_flag("--weighted", cfg.weighted, "Treat the edge list as weighted");
    app->add_flag("--raw-weights", cfg.raw_weights,
                  "Use edge weights directly as target distances (complete graphs)");
    app->add_option("--sig", cfg.signature, "Space signature, e.g. E10, H5xS4, OL1:t=1");
    app->add_option("--dim", cfg.dim, "Ambient dimension");
    app->add_option("--loss", cfg.loss, "distortion|proxy");
    app->add_option("--conv", cfg.conversion, "Proxy conversion t1|t2|t3");
    app->add_option("--lr", cfg.lr, "Learning rate");
    app->add_option("--lr-sweep", cfg.lr_sweep, "Learning-rate sweep")->delimiter(',');
    app->add_option("--iters", cfg.iterations, "Training iterations");
    app->add_option("--seed", cfg.seed, "RNG seed");
    app->add_option("--threads", cfg.threads, "Evaluation threads");
    app->add_option("--restarts", cfg.restarts, "Independent restarts");
    app->add_option("--d0", cfg.d0, "Distance floor for t2/t3");
    app->add_flag("--literal-min", cfg.literal_min, "Literal min() reading of t2/t3");
    app->add_flag("--exclude-self", cfg.exclude_self,
                  "Drop the self term from proxy denominators");
    app->add_option("--init-scale", cfg.init_scale, "Embedding init scale");
    app->add_option("--out", cfg.output, "Output directory");
    app->add_option("--dist-cache", cfg.dist_cache, "Distance matrix cache file");
    app->add_option("--config", cfg.config_path, "key = value file with these options");
}

// Flat "key = value" file mirroring the run flags; values from the file fill
// in whatever was not given on the command line (flags win).
void apply_config_file(const CLI::App* app, RunConfig& cfg) {
    static const std::vector<std::string> keys = {
        "dataset", "manifest", "weighted",  "raw-weights",  "sig",        "dim",
        "loss",    "conv",     "lr",        "lr-sweep",     "iters",      "seed",
        "threads", "restarts", "d0",        "literal-min",  "exclude-self",
        "init-scale", "out",   "dist-cache"};
    const auto values = load_config_file(cfg.config_path, keys);

    auto want = [&](const std::string& key) -> const std::string* {
        const auto it = values.find(key);
        if (it == values.end()) return nullptr;
        return app->count("--" + key) > 0 ? nullptr : &it->second;  // flags win
    };
    auto parse_double = [](const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("config key \"" + key + "\": bad number \"" + v + "\"");
        }
    };
    auto parse_int = [&](const std::string& key, const std::string& v) {
        const double d = parse_double(key, v);
        if (d != std::floor(d)) throw ConfigError("config key \"" + key + "\": expected integer");
        return static_cast<long long>(d);
    };
    auto parse_bool = [](const std::string& key, const std::string& v) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError("config key \"" + key + "\": expected true/false");
    };

    if (const auto* v = want("dataset")) cfg.dataset = *v;
    if (const auto* v = want("manifest")) cfg.manifest = *v;
    if (const auto* v = want("weighted")) cfg.weighted = parse_bool("weighted", *v);
    if (const auto* v = want("raw-weights")) cfg.raw_weights = parse_bool("raw-weights", *v);
    if (const auto* v = want("sig")) cfg.signature = *v;
    if (const auto* v = want("dim")) cfg.dim = static_cast<int>(parse_int("dim", *v));
    if (const auto* v = want("loss")) cfg.loss = *v;
    if (const auto* v = want("conv")) cfg.conversion = *v;
    if (const auto* v = want("lr")) cfg.lr = parse_double("lr", *v);
    if (const auto* v = want("lr-sweep")) {
        cfg.lr_sweep.clear();
        std::istringstream ss(*v);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) cfg.lr_sweep.push_back(parse_double("lr-sweep", tok));
    }
    if (const auto* v = want("iters")) cfg.iterations = static_cast<int>(parse_int("iters", *v));
    if (const auto* v = want("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int("seed", *v));
    if (const auto* v = want("threads")) cfg.threads = static_cast<int>(parse_int("threads", *v));
    if (const auto* v = want("restarts")) cfg.restarts = static_cast<int>(parse_int("restarts", *v));
    if (const auto* v = want("d0")) cfg.d0 = parse_double("d0", *v);
    if (const auto* v = want("literal-min")) cfg.literal_min = parse_bool("literal-min", *v);
    if (const auto* v = want("exclude-self")) cfg.exclude_self = parse_bool("exclude-self", *v);
    if (const auto* v = want("init-scale")) cfg.init_scale = parse_double("init-scale", *v);
    if (const auto* v = want("out")) cfg.output = *v;
    if (const auto* v = want("dist-cache")) cfg.dist_cache = *v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph embeddings in mixed and overlaying geometries"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> signatures;
    std::string embedding_path;
    int n_small = 20, n_large = 700, seeds = 3, iters_proxy = 1000;
    double p = 0.05;
    std::string gen_out = "bipartite.edges";

    CLI::App* embed = app.add_subcommand("embed", "Train one embedding");
    add_run_options(embed, cfg);

    CLI::App* sweep = app.add_subcommand("sweep", "Train a list of signatures");
    add_run_options(sweep, cfg);
    sweep->add_option("--sigs", signatures, "Signatures")->delimiter(',')->required();

    CLI::App* bip = app.add_subcommand("bipartite", "Synthetic bipartite benchmark");
    add_run_options(bip, cfg);
    bip->add_option("--sigs", signatures, "Signatures")->delimiter(',');
    bip->add_option("--n-small", n_small, "Small part size");
    bip->add_option("--n-large", n_large, "Large part size");
    bip->add_option("--p", p, "Edge probability");
    bip->add_option("--seeds", seeds, "Number of graph seeds");
    bip->add_option("--iters-proxy", iters_proxy, "Proxy-loss iterations");

    CLI::App* eval = app.add_subcommand("eval", "Metrics for a saved embedding");
    add_run_options(eval, cfg);
    eval->add_option("--embedding", embedding_path, "Embedding dump")->required();

    CLI::App* gen = app.add_subcommand("gen-bipartite", "Generate the bipartite graph");
    gen->add_option("--n-small", n_small, "Small part size");
    gen->add_option("--n-large", n_large, "Large part size");
    gen->add_option("--p", p, "Edge probability");
    gen->add_option("--seed", cfg.seed, "RNG seed");
    gen->add_option("--out", gen_out, "Output edge list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (!cfg.config_path.empty()) {
            for (const CLI::App* sub : {embed, sweep, bip, eval})
                if (sub->parsed()) apply_config_file(sub, cfg);
        }
        if (embed->parsed()) return cmd_embed(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg, signatures);
        if (bip->parsed())
            return cmd_bipartite(cfg, signatures, n_small, n_large, p, seeds, iters_proxy);
        if (eval->parsed()) return cmd_eval(cfg, embedding_path);
        if (gen->parsed()) return cmd_gen_bipartite(n_small, n_large, p, cfg.seed, gen_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
