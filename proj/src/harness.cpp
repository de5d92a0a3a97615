#include "confmap/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace confmap {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ArgumentError("repetitions must be at least 1");
    if (ranks.empty()) throw ArgumentError("at least one placement rank is required");
    for (int r : ranks)
        if (r < 1) throw ArgumentError("placement ranks start at 1");
    if (strategies.empty()) throw ArgumentError("at least one strategy is required");
    if (objects.empty()) throw ArgumentError("at least one target object is required");
    if (!(mapping.spacing > 0.0) || !(mapping.range > 0.0) || !(mapping.fov > 0.0 && mapping.fov <= kTwoPi + 1e-12))
        throw ArgumentError("invalid mapping schedule");
    if (!(map.alpha >= 0.0 && map.alpha <= 1.0)) throw ArgumentError("alpha must lie in [0,1]");
    if (map.min_region_cells < 1) throw ArgumentError("min_region_cells must be positive");
    search.validate();
    detector.validate();
}

namespace {

double angle_value(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "full") return kTwoPi;
        throw ArgumentError("angle must be a number of radians or \"full\"");
    }
    return j.get<double>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    try {
        cfg.world = resolve(base_dir, j.at("world").get<std::string>());
        cfg.cooccurrence = resolve(base_dir, j.at("cooccurrence").get<std::string>());
        cfg.priors = resolve(base_dir, j.at("priors").get<std::string>());
        cfg.appearance = resolve(base_dir, j.at("appearance").get<std::string>());
        if (j.contains("strategies")) {
            cfg.strategies.clear();
            for (const auto& s : j["strategies"]) cfg.strategies.push_back(parse_map_kind(s.get<std::string>()));
        }
        cfg.objects = j.at("objects").get<std::vector<std::string>>();
        if (j.contains("ranks")) cfg.ranks = j["ranks"].get<std::vector<int>>();
        cfg.repetitions = j.value("repetitions", cfg.repetitions);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.map.alpha = j.value("alpha", cfg.map.alpha);
        cfg.map.min_region_cells = j.value("min_region_cells", cfg.map.min_region_cells);
        cfg.map.per_room = j.value("per_room_regions", cfg.map.per_room);
        if (j.contains("mapping")) {
            const auto& m = j["mapping"];
            cfg.mapping.spacing = m.value("spacing", cfg.mapping.spacing);
            cfg.mapping.range = m.value("range", cfg.mapping.range);
            if (m.contains("fov")) cfg.mapping.fov = angle_value(m["fov"]);
        }
        if (j.contains("search")) {
            const auto& s = j["search"];
            cfg.search.viewpoint_spacing = s.value("viewpoint_spacing", cfg.search.viewpoint_spacing);
            cfg.search.coverage_threshold = s.value("coverage_threshold", cfg.search.coverage_threshold);
            cfg.search.range = s.value("range", cfg.search.range);
            if (s.contains("fov")) cfg.search.fov = angle_value(s["fov"]);
            if (s.contains("start")) {
                const auto& st = s["start"];
                cfg.search.start_pose.x = st.at("x").get<double>();
                cfg.search.start_pose.y = st.at("y").get<double>();
                cfg.search.start_pose.heading = st.value("heading", 0.0);
                cfg.has_start_pose = true;
            }
        }
        if (j.contains("detector")) {
            const auto& d = j["detector"];
            cfg.detector.default_p = d.value("default", cfg.detector.default_p);
            if (d.contains("p_detect"))
                for (const auto& [k, v] : d["p_detect"].items()) cfg.detector.p_detect[k] = v.get<double>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    cfg.search.start_pose.fov = cfg.search.fov;
    cfg.search.start_pose.range = cfg.search.range;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str(), path.parent_path());
}

ExperimentSetup load_setup(const ExperimentConfig& config) {
    ExperimentSetup s;
    s.world = load_world(config.world);
    s.models.appearance = load_appearance_model(config.appearance, s.world.categories);
    s.models.cooccurrence = load_cooccurrence(config.cooccurrence, s.world.categories);
    s.models.detector = config.detector;
    s.priors = load_location_prior(config.priors, s.world.categories);
    return s;
}

Viewpoint start_pose_for(const ExperimentConfig& config, const GridWorld& world) {
    if (config.has_start_pose) {
        Viewpoint vp = config.search.start_pose;
        if (!world.valid_viewpoint(vp)) throw ArgumentError("start pose is not inside a free cell");
        return vp;
    }
    const auto free = world.free_cells();
    if (free.empty()) throw ArgumentError("world has no free cells");
    return world.viewpoint_at(free.front(), 0.0, config.search.fov, config.search.range);
}

std::uint64_t mapping_seed(std::uint64_t master_seed) {
    return splitmix64(fnv1a("mapping", splitmix64(master_seed)));
}

std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& object, int rank, int repetition) {
    std::uint64_t h = splitmix64(master_seed);
    h = fnv1a(object, h);
    h = splitmix64(h ^ static_cast<std::uint64_t>(rank));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(repetition) << 32));
    return h;
}

MapSet build_map_set(const ExperimentConfig& config, const ExperimentSetup& setup) {
    const auto schedule = lattice_schedule(setup.world, config.mapping.spacing, config.mapping.fov, config.mapping.range);
    Rng rng(mapping_seed(config.seed));
    MapSet set;
    set.grids = build_belief_grids(setup.world, setup.models, schedule, rng);
    for (MapKind k : kAllMapKinds) set.maps.push_back(map_from_grids(setup.world, set.grids, k, config.map));
    return set;
}

GridWorld place_object_by_rank(const GridWorld& world, const std::string& object, const ObjectLocationPrior& priors,
                               int rank, Rng& rng) {
    const auto places = priors.ranked_places(object);
    if (rank < 1 || rank > static_cast<int>(places.size()))
        throw ArgumentError("placement rank " + std::to_string(rank) + " outside 1.." + std::to_string(places.size()));
    const Label category = places[static_cast<std::size_t>(rank - 1)];
    std::vector<const Zone*> zones;
    for (const auto& z : world.zones)
        if (z.true_category == category) zones.push_back(&z);
    if (zones.empty())
        throw ArgumentError("no zone of category '" + world.categories.name(category) + "' for rank " +
                            std::to_string(rank) + " of '" + object + "'");
    const Zone& zone = *zones[std::uniform_int_distribution<std::size_t>(0, zones.size() - 1)(rng)];
    const CellIndex cell = zone.cells[std::uniform_int_distribution<std::size_t>(0, zone.cells.size() - 1)(rng)];
    GridWorld placed = world;
    placed.objects.push_back({static_cast<int>(placed.objects.size()), object, world.coord(cell)});
    return placed;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, const ExperimentSetup& setup,
                                      std::vector<RunLog>* logs) {
    config.validate();
    const MapSet maps = build_map_set(config, setup);
    SearchParams params = config.search;
    params.start_pose = start_pose_for(config, setup.world);

    std::vector<SearchPlan> plans;
    for (MapKind k : config.strategies) plans.push_back(plan_search(setup.world, maps.get(k), params));

    struct Condition {
        std::size_t object;
        int rank;
        int rep;
    };
    std::vector<Condition> conditions;
    for (std::size_t o = 0; o < config.objects.size(); ++o)
        for (int r : config.ranks)
            for (int rep = 0; rep < config.repetitions; ++rep) conditions.push_back({o, r, rep});

    const std::size_t n_strat = config.strategies.size();
    std::vector<RunRecord> slots(conditions.size() * n_strat);
    std::vector<std::string> log_text(logs ? slots.size() : 0);
    std::vector<std::exception_ptr> errors(conditions.size());

    const auto n_cond = static_cast<std::ptrdiff_t>(conditions.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t ci = 0; ci < n_cond; ++ci) {
        const Condition& cond = conditions[static_cast<std::size_t>(ci)];
        const std::string& object = config.objects[cond.object];
        try {
            const std::uint64_t seed = derive_seed(config.seed, object, cond.rank, cond.rep);
            Rng rng(seed);
            const GridWorld placed = place_object_by_rank(setup.world, object, setup.priors, cond.rank, rng);
            for (std::size_t s = 0; s < n_strat; ++s) {
                Rng search_rng(splitmix64(seed));
                const SearchResult res = execute_search(placed, maps.get(config.strategies[s]), plans[s], object,
                                                        setup.priors, params, setup.models.detector, search_rng);
                RunRecord& rec = slots[s * conditions.size() + static_cast<std::size_t>(ci)];
                rec = {config.strategies[s], object,
                       cond.rank,           cond.rep,
                       seed,                res.found,
                       res.viewpoints_visited, res.covered_area_m2,
                       res.path_length_m,   res.region_sequence};
                if (logs) log_text[s * conditions.size() + static_cast<std::size_t>(ci)] = format_viewpoint_log(res);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(ci)] = std::current_exception();
        }
    }
    for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
        if (!errors[ci]) continue;
        const Condition& cond = conditions[ci];
        try {
            std::rethrow_exception(errors[ci]);
        } catch (const std::exception& e) {
            throw std::runtime_error("object '" + config.objects[cond.object] + "' rank " + std::to_string(cond.rank) +
                                     " rep " + std::to_string(cond.rep) + ": " + e.what());
        }
    }
    if (logs) {
        logs->clear();
        for (std::size_t i = 0; i < slots.size(); ++i)
            logs->push_back({to_string(slots[i].strategy) + "_" + slots[i].object + "_r" + std::to_string(slots[i].rank) +
                                 "_rep" + std::to_string(slots[i].rep),
                             std::move(log_text[i])});
    }
    return slots;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, load_setup(config));
}

MetricStats mean_and_stddev(const std::vector<double>& values) {
    MetricStats s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    std::vector<MapKind> strategies;
    std::vector<std::string> objects;
    for (const auto& r : records) {
        if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end()) strategies.push_back(r.strategy);
        if (std::find(objects.begin(), objects.end(), r.object) == objects.end()) objects.push_back(r.object);
    }
    using Key = std::tuple<std::size_t, std::size_t, int>;
    std::map<Key, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) {
        const auto si = static_cast<std::size_t>(std::find(strategies.begin(), strategies.end(), r.strategy) - strategies.begin());
        const auto oi = static_cast<std::size_t>(std::find(objects.begin(), objects.end(), r.object) - objects.begin());
        groups[{si, oi, r.rank}].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, recs] : groups) {
        std::vector<double> vp, area, path;
        for (const auto* r : recs) {
            vp.push_back(r->viewpoints);
            area.push_back(r->covered_area_m2);
            path.push_back(r->path_length_m);
        }
        out.push_back({strategies[std::get<0>(key)], objects[std::get<1>(key)], std::get<2>(key),
                       static_cast<int>(recs.size()), mean_and_stddev(vp), mean_and_stddev(area),
                       mean_and_stddev(path)});
    }
    return out;
}

namespace {

constexpr const char* kRunsHeader =
    "strategy,object,rank,rep,seed,found,viewpoints,covered_area_m2,path_length_m,regions_visited";

}  // namespace

std::string format_runs_csv(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << kRunsHeader << "\n";
    for (const auto& r : records) {
        out << to_string(r.strategy) << "," << r.object << "," << r.rank << "," << r.rep << "," << r.seed << ","
            << (r.found ? 1 : 0) << "," << r.viewpoints << "," << format_double(r.covered_area_m2) << ","
            << format_double(r.path_length_m) << ",";
        for (std::size_t i = 0; i < r.regions_visited.size(); ++i) out << (i ? ";" : "") << r.regions_visited[i];
        out << "\n";
    }
    return out.str();
}

std::vector<RunRecord> parse_runs_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int no = 0;
    std::vector<RunRecord> out;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (no == 1) {
            if (line != kRunsHeader) throw ParseError("unexpected runs.csv header", no);
            continue;
        }
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 10) throw ParseError("expected 10 fields", no);
        try {
            RunRecord r;
            r.strategy = parse_map_kind(f[0]);
            r.object = f[1];
            r.rank = std::stoi(f[2]);
            r.rep = std::stoi(f[3]);
            r.seed = std::stoull(f[4]);
            r.found = f[5] == "1";
            r.viewpoints = std::stoi(f[6]);
            r.covered_area_m2 = std::stod(f[7]);
            r.path_length_m = std::stod(f[8]);
            if (!f[9].empty())
                for (const auto& id : split(f[9], ';')) r.regions_visited.push_back(std::stoi(id));
            out.push_back(std::move(r));
        } catch (const std::logic_error& e) {
            throw ParseError(std::string("bad field: ") + e.what(), no);
        }
    }
    return out;
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "strategy,object,rank,n,viewpoints_mean,viewpoints_std,covered_area_m2_mean,covered_area_m2_std,"
           "path_length_m_mean,path_length_m_std\n";
    for (const auto& r : rows)
        out << to_string(r.strategy) << "," << r.object << "," << r.rank << "," << r.n << ","
            << format_double(r.viewpoints.mean) << "," << format_double(r.viewpoints.stddev) << ","
            << format_double(r.covered_area_m2.mean) << "," << format_double(r.covered_area_m2.stddev) << ","
            << format_double(r.path_length_m.mean) << "," << format_double(r.path_length_m.stddev) << "\n";
    return out.str();
}

}  // namespace confmap
