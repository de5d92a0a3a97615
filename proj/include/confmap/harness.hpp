#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "confmap/search.hpp"
#include "confmap/semantic_map.hpp"

namespace confmap {

struct MappingSchedule {
    double spacing = 1.0;
    double fov = kTwoPi;
    double range = 3.0;
};

struct ExperimentConfig {
    std::filesystem::path world;
    std::filesystem::path cooccurrence;
    std::filesystem::path priors;
    std::filesystem::path appearance;
    std::vector<MapKind> strategies{MapKind::baseline, MapKind::merged};
    std::vector<std::string> objects;
    std::vector<int> ranks{1, 2, 3};
    int repetitions = 10;
    std::uint64_t seed = 1;
    SearchParams search;
    bool has_start_pose = false;
    MappingSchedule mapping;
    MapParams map;
    ObjectDetectorModel detector;

    void validate() const;
};

/// Reads a JSON experiment description; relative paths resolve against the
/// config file's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir);

/// Everything an experiment reads from disk.
struct ExperimentSetup {
    GridWorld world;
    PerceptionModels models;
    ObjectLocationPrior priors;
};

ExperimentSetup load_setup(const ExperimentConfig& config);

/// Start pose from the config, or the first free cell center.
Viewpoint start_pose_for(const ExperimentConfig& config, const GridWorld& world);

/// Maps for every kind, built from one pass over the mapping schedule.
struct MapSet {
    BeliefGrids grids;
    std::vector<SemanticMap> maps;  // indexed like kAllMapKinds
    const SemanticMap& get(MapKind kind) const { return maps[static_cast<std::size_t>(kind)]; }
};

MapSet build_map_set(const ExperimentConfig& config, const ExperimentSetup& setup);

std::uint64_t mapping_seed(std::uint64_t master_seed);
std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& object, int rank, int repetition);

/// Copy of `world` with one `object` hidden in a random cell of a random
/// zone whose category is the rank-th most probable place for it.
GridWorld place_object_by_rank(const GridWorld& world, const std::string& object, const ObjectLocationPrior& priors,
                               int rank, Rng& rng);

struct RunRecord {
    MapKind strategy = MapKind::merged;
    std::string object;
    int rank = 1;
    int rep = 0;
    std::uint64_t seed = 0;
    bool found = false;
    int viewpoints = 0;
    double covered_area_m2 = 0.0;
    double path_length_m = 0.0;
    std::vector<int> regions_visited;
    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct RunLog {
    std::string name;  // <strategy>_<object>_r<rank>_rep<rep>
    std::string text;
};

/// Records ordered by strategy (config order), object, rank, repetition.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);
std::vector<RunRecord> run_experiment(const ExperimentConfig& config, const ExperimentSetup& setup,
                                      std::vector<RunLog>* logs = nullptr);

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

struct SummaryRow {
    MapKind strategy = MapKind::merged;
    std::string object;
    int rank = 1;
    int n = 0;
    MetricStats viewpoints;
    MetricStats covered_area_m2;
    MetricStats path_length_m;
};

MetricStats mean_and_stddev(const std::vector<double>& values);

/// Groups ordered by strategy and object in first-appearance order, then
/// ascending rank.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

std::string format_runs_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_runs_csv(const std::string& text);
std::string format_summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace confmap
