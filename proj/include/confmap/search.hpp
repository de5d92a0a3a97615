#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "confmap/perception.hpp"
#include "confmap/semantic_map.hpp"

namespace confmap {

/// For each object category, where it tends to be found.
class ObjectLocationPrior {
public:
    ObjectLocationPrior() = default;
    explicit ObjectLocationPrior(CategorySet categories) : categories_(std::move(categories)) {}

    void set(const std::string& object, CategoryDistribution row);
    bool contains(const std::string& object) const { return rows_.count(object) != 0; }
    /// Throws ArgumentError naming an unknown object.
    const CategoryDistribution& at(const std::string& object) const;
    const CategorySet& categories() const { return categories_; }
    std::vector<std::string> objects() const;

    /// Place categories ordered by decreasing prior for `object`; ties by
    /// category index.
    std::vector<Label> ranked_places(const std::string& object) const;

private:
    CategorySet categories_;
    std::map<std::string, CategoryDistribution> rows_;
};

/// `prior <object> <category> <p>` lines; unlisted pairs are 0.
ObjectLocationPrior parse_location_prior(const std::string& text, const CategorySet& categories);
ObjectLocationPrior load_location_prior(const std::filesystem::path& path, const CategorySet& categories);

struct SearchParams {
    double viewpoint_spacing = 0.5;
    double coverage_threshold = 0.95;
    double fov = kTwoPi;
    double range = 3.0;
    Viewpoint start_pose;

    void validate() const;
};

/// Region ids ordered by prior of the region label for `target`
/// (descending), then distance from `start` to the region centroid, then
/// id. Unknown regions come last.
std::vector<int> rank_regions(const SemanticMap& map, const std::string& target, const ObjectLocationPrior& priors,
                              const Viewpoint& start);

/// Centroid of a region's cell centers in meters.
std::pair<double, double> region_centroid(const SemanticRegion& region, int width, double resolution);

struct CoveragePlan {
    std::vector<Viewpoint> viewpoints;          // selection order
    std::vector<std::vector<CellIndex>> seen;   // visible free cells per viewpoint
    double coverage_fraction = 0.0;             // region cells covered
};

enum class Exec { serial, parallel };

/// Greedy viewpoint selection over a lattice of candidate poses inside the
/// region (8 headings each unless fov is a full circle).
CoveragePlan coverage_viewpoints(const SemanticRegion& region, const GridWorld& world, const SearchParams& params,
                                 Exec exec = Exec::parallel);

/// Candidate poses considered by coverage_viewpoints, in tie-break order.
std::vector<Viewpoint> coverage_candidates(const SemanticRegion& region, const GridWorld& world,
                                           const SearchParams& params);

/// Placement-independent part of a search: per-region coverage plans for
/// a map over a fixed geometry.
struct SearchPlan {
    std::vector<CoveragePlan> regions;  // indexed by region id
};

SearchPlan plan_search(const GridWorld& world, const SemanticMap& map, const SearchParams& params,
                       Exec exec = Exec::parallel);

struct SearchStep {
    int region = -1;
    Viewpoint pose;
    int seen_cells = 0;
    std::vector<std::string> detected;
};

struct SearchResult {
    bool found = false;
    int viewpoints_visited = 0;
    double covered_area_m2 = 0.0;
    double path_length_m = 0.0;
    std::vector<int> region_sequence;
    std::vector<SearchStep> steps;
};

/// Visits regions in rank order and each region's coverage viewpoints in
/// selection order until the target is detected.
SearchResult execute_search(const GridWorld& world, const SemanticMap& map, const SearchPlan& plan,
                            const std::string& target, const ObjectLocationPrior& priors, const SearchParams& params,
                            const ObjectDetectorModel& detector, Rng& rng);

SearchResult execute_search(const GridWorld& world, const SemanticMap& map, const std::string& target,
                            const ObjectLocationPrior& priors, const SearchParams& params,
                            const ObjectDetectorModel& detector, Rng& rng);

/// One `step <n> region <id> x <m> y <m> heading <rad> seen_cells <k>
/// detected <obj,...>` line per step; an empty detection list is written
/// as `-`.
std::string format_viewpoint_log(const SearchResult& result);
std::vector<SearchStep> parse_viewpoint_log(const std::string& text);

}  // namespace confmap
