// simulate: build semantic maps, run object-search experiments, render maps.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "confmap/harness.hpp"
#include "confmap/map_io.hpp"

namespace fs = std::filesystem;
using namespace confmap;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    bool paper = false;
    std::optional<std::string> strategies;
    std::optional<double> alpha;
    std::optional<double> threshold;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--reps", o.reps, "Repetitions per (object, rank)");
    cmd->add_flag("--paper", o.paper, "Use 3 repetitions per condition");
    cmd->add_option("--strategies", o.strategies, "Comma-separated subset of baseline,appearance,object,merged");
    cmd->add_option("--alpha", o.alpha, "Appearance weight for map merging, in [0,1]");
    cmd->add_option("--threshold", o.threshold, "Per-region coverage threshold, in (0,1]");
}

void apply(const Overrides& o, ExperimentConfig& cfg) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.paper) cfg.repetitions = 3;
    if (o.reps) cfg.repetitions = *o.reps;
    if (o.strategies) {
        cfg.strategies.clear();
        for (const auto& s : split(*o.strategies, ',')) cfg.strategies.push_back(parse_map_kind(s));
    }
    if (o.alpha) cfg.map.alpha = *o.alpha;
    if (o.threshold) cfg.search.coverage_threshold = *o.threshold;
    cfg.validate();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confusion-preserving semantic mapping and object-search simulator"};
    app.require_subcommand(1);

    Overrides overrides;
    std::string world_path, config_path, out_dir, map_path, svg_path;
    bool write_logs = false;

    auto* map_cmd = app.add_subcommand("map", "Build appearance, object, merged and baseline maps");
    map_cmd->add_option("--world", world_path, "World file (overrides the config's world)");
    map_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    map_cmd->add_option("--out", out_dir, "Output directory")->required();
    add_override_flags(map_cmd, overrides);

    auto* search_cmd = app.add_subcommand("search", "Run the object-search experiment");
    search_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    search_cmd->add_option("--out", out_dir, "Output directory")->required();
    search_cmd->add_flag("--logs", write_logs, "Write per-run viewpoint logs");
    add_override_flags(search_cmd, overrides);

    auto* render_cmd = app.add_subcommand("render", "Render an exported map to SVG");
    render_cmd->add_option("--map", map_path, "Map file written by 'map'")->required();
    render_cmd->add_option("--out", svg_path, "Output SVG file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*map_cmd) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            if (!world_path.empty()) cfg.world = world_path;
            apply(overrides, cfg);
            const ExperimentSetup setup = load_setup(cfg);
            const MapSet maps = build_map_set(cfg, setup);
            fs::create_directories(out_dir);
            for (MapKind k : kAllMapKinds) {
                const SemanticMap& m = maps.get(k);
                write_file(fs::path(out_dir) / (to_string(k) + ".map"), format_map_text(m));
                write_file(fs::path(out_dir) / (to_string(k) + ".svg"),
                           render_svg(m.labels(), m.categories, to_string(k) + " map"));
                std::cout << to_string(k) << ": " << m.regions.size() << " regions\n";
            }
        } else if (*search_cmd) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            apply(overrides, cfg);
            const ExperimentSetup setup = load_setup(cfg);
            std::vector<RunLog> logs;
            const auto records = run_experiment(cfg, setup, write_logs ? &logs : nullptr);
            fs::create_directories(out_dir);
            write_file(fs::path(out_dir) / "runs.csv", format_runs_csv(records));
            const auto summary = summarize(records);
            write_file(fs::path(out_dir) / "summary.csv", format_summary_csv(summary));
            if (write_logs) {
                fs::create_directories(fs::path(out_dir) / "logs");
                for (const auto& l : logs) write_file(fs::path(out_dir) / "logs" / (l.name + ".log"), l.text);
            }
            for (const auto& row : summary)
                std::cout << to_string(row.strategy) << " " << row.object << " rank " << row.rank
                          << ": viewpoints " << row.viewpoints.mean << " covered " << row.covered_area_m2.mean
                          << " m2\n";
        } else if (*render_cmd) {
            const MapDocument doc = load_map_text(map_path);
            write_file(svg_path, render_svg(doc.labels, doc.categories, doc.kind + " map"));
        }
    } catch (const std::exception& e) {
        std::cerr << "simulate: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
