#include "confmap/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "confmap/kernels.hpp"

namespace confmap {

void ObjectLocationPrior::set(const std::string& object, CategoryDistribution row) {
    if (row.size() != categories_.size() || !row.valid())
        throw InvariantError("location prior for '" + object + "' is not a distribution");
    rows_[object] = std::move(row);
}

const CategoryDistribution& ObjectLocationPrior::at(const std::string& object) const {
    const auto it = rows_.find(object);
    if (it == rows_.end()) throw ArgumentError("no location prior for object '" + object + "'");
    return it->second;
}

std::vector<std::string> ObjectLocationPrior::objects() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : rows_) out.push_back(k);
    return out;
}

std::vector<Label> ObjectLocationPrior::ranked_places(const std::string& object) const {
    const auto& row = at(object);
    std::vector<Label> order(row.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Label>(i);
    std::stable_sort(order.begin(), order.end(), [&](Label a, Label b) {
        return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
    });
    return order;
}

ObjectLocationPrior parse_location_prior(const std::string& text, const CategorySet& categories) {
    std::map<std::string, std::vector<double>> rows;
    std::vector<std::string> order;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto t = trim(line);
        if (t.empty() || t.starts_with("//")) continue;
        std::istringstream ls{std::string(t)};
        std::string kw, object, cat, value;
        std::string extra;
        if (!(ls >> kw >> object >> cat >> value) || (ls >> extra) || kw != "prior")
            throw ParseError("expected 'prior <object> <category> <p>'", no);
        const Label l = categories.find(cat);
        if (l == kUnknownLabel) throw ParseError("unknown place category '" + cat + "'", no);
        double p{};
        try {
            std::size_t used = 0;
            p = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("invalid number '" + value + "'", no);
        }
        if (!(p >= 0.0 && p <= 1.0)) throw ParseError("probability outside [0,1]", no);
        auto [it, fresh] = rows.try_emplace(object, std::vector<double>(categories.size(), 0.0));
        it->second[static_cast<std::size_t>(l)] = p;
    }
    ObjectLocationPrior prior(categories);
    for (auto& [object, row] : rows) {
        double sum = 0.0;
        for (double v : row) sum += v;
        if (std::abs(sum - 1.0) > 1e-6)
            throw InvariantError("location prior for '" + object + "' sums to " + format_double(sum));
        prior.set(object, CategoryDistribution::normalized(row));
    }
    return prior;
}

ObjectLocationPrior load_location_prior(const std::filesystem::path& path, const CategorySet& categories) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open prior file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_location_prior(ss.str(), categories);
}

void SearchParams::validate() const {
    if (!(viewpoint_spacing > 0.0)) throw ArgumentError("viewpoint spacing must be positive");
    if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0)) throw ArgumentError("coverage threshold must lie in (0,1]");
    if (!(fov > 0.0 && fov <= kTwoPi + 1e-12)) throw ArgumentError("fov must lie in (0, 2pi]");
    if (!(range > 0.0)) throw ArgumentError("range must be positive");
}

std::pair<double, double> region_centroid(const SemanticRegion& region, int width, double resolution) {
    double sx = 0.0, sy = 0.0;
    for (CellIndex c : region.cells) {
        sx += (c % width + 0.5) * resolution;
        sy += (c / width + 0.5) * resolution;
    }
    const auto n = static_cast<double>(region.cells.size());
    return {sx / n, sy / n};
}

std::vector<int> rank_regions(const SemanticMap& map, const std::string& target, const ObjectLocationPrior& priors,
                              const Viewpoint& start) {
    const CategoryDistribution& row = priors.at(target);
    if (map.regions.empty()) throw ArgumentError("cannot rank an empty map");
    struct Key {
        bool unknown;
        double prior;
        double distance;
        int id;
    };
    std::vector<Key> keys;
    for (const auto& r : map.regions) {
        const auto [cx, cy] = region_centroid(r, map.width, map.resolution);
        const bool unknown = r.label < 0;
        keys.push_back({unknown, unknown ? 0.0 : row[static_cast<std::size_t>(r.label)],
                        std::hypot(cx - start.x, cy - start.y), r.id});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.unknown != b.unknown) return !a.unknown;
        if (a.prior != b.prior) return a.prior > b.prior;
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.id < b.id;
    });
    std::vector<int> out;
    for (const auto& k : keys) out.push_back(k.id);
    return out;
}

std::vector<Viewpoint> coverage_candidates(const SemanticRegion& region, const GridWorld& world,
                                           const SearchParams& params) {
    if (region.cells.empty()) throw ArgumentError("cannot plan coverage for an empty region");
    const int step = std::max(1, static_cast<int>(std::lround(params.viewpoint_spacing / world.resolution)));
    const int offset = step / 2;
    std::vector<CellIndex> lattice;
    for (CellIndex c : region.cells) {
        const GridCoord g = world.coord(c);
        if (g.col % step == offset && g.row % step == offset) lattice.push_back(c);
    }
    if (lattice.empty()) {
        // Region narrower than the lattice: fall back to the region cell
        // nearest its centroid.
        const auto [cx, cy] = region_centroid(region, world.width, world.resolution);
        CellIndex best = region.cells.front();
        double best_d = INFINITY;
        for (CellIndex c : region.cells) {
            const double d = std::hypot(world.center_x(c) - cx, world.center_y(c) - cy);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        lattice.push_back(best);
    }
    const bool full_circle = params.fov >= kTwoPi - 1e-12;
    const int headings = full_circle ? 1 : 8;
    std::vector<Viewpoint> out;
    out.reserve(lattice.size() * static_cast<std::size_t>(headings));
    for (CellIndex c : lattice)
        for (int h = 0; h < headings; ++h)
            out.push_back(world.viewpoint_at(c, h * kTwoPi / 8.0, params.fov, params.range));
    return out;
}

CoveragePlan coverage_viewpoints(const SemanticRegion& region, const GridWorld& world, const SearchParams& params,
                                 Exec exec) {
    params.validate();
    const auto candidates = coverage_candidates(region, world, params);
    const auto visible = exec == Exec::parallel ? parallel::visible_sets(world, candidates)
                                                : serial::visible_sets(world, candidates);

    // Project each candidate's view onto local region indices.
    std::vector<int> local(world.cell_count(), -1);
    for (std::size_t i = 0; i < region.cells.size(); ++i) local[static_cast<std::size_t>(region.cells[i])] = static_cast<int>(i);
    std::vector<std::vector<int>> sets(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k)
        for (CellIndex c : visible[k])
            if (const int l = local[static_cast<std::size_t>(c)]; l >= 0) sets[k].push_back(l);

    const std::size_t total = region.cells.size();
    const auto target = static_cast<std::size_t>(std::ceil(params.coverage_threshold * static_cast<double>(total) - 1e-9));
    const GreedySelection sel = exec == Exec::parallel ? parallel::greedy_cover(sets, total, target)
                                                       : serial::greedy_cover(sets, total, target);
    CoveragePlan plan;
    for (std::size_t k : sel.order) {
        plan.viewpoints.push_back(candidates[k]);
        plan.seen.push_back(visible[k]);
    }
    plan.coverage_fraction = static_cast<double>(sel.covered) / static_cast<double>(total);
    return plan;
}

SearchPlan plan_search(const GridWorld& world, const SemanticMap& map, const SearchParams& params, Exec exec) {
    SearchPlan plan;
    plan.regions.reserve(map.regions.size());
    for (const auto& r : map.regions) plan.regions.push_back(coverage_viewpoints(r, world, params, exec));
    return plan;
}

SearchResult execute_search(const GridWorld& world, const SemanticMap& map, const SearchPlan& plan,
                            const std::string& target, const ObjectLocationPrior& priors, const SearchParams& params,
                            const ObjectDetectorModel& detector, Rng& rng) {
    if (plan.regions.size() != map.regions.size()) throw ArgumentError("search plan does not match the map");
    if (map.width != world.width || map.height != world.height) throw ArgumentError("map does not match the world");
    SearchResult res;
    std::vector<std::uint8_t> covered(world.cell_count(), 0);
    std::size_t covered_cells = 0;
    double px = params.start_pose.x, py = params.start_pose.y;
    for (int region : rank_regions(map, target, priors, params.start_pose)) {
        const CoveragePlan& cp = plan.regions[static_cast<std::size_t>(region)];
        if (cp.viewpoints.empty()) continue;
        res.region_sequence.push_back(region);
        for (std::size_t k = 0; k < cp.viewpoints.size(); ++k) {
            const Viewpoint& vp = cp.viewpoints[k];
            res.path_length_m += std::hypot(vp.x - px, vp.y - py);
            px = vp.x;
            py = vp.y;
            ++res.viewpoints_visited;
            for (CellIndex c : cp.seen[k]) {
                auto& flag = covered[static_cast<std::size_t>(c)];
                if (!flag) {
                    flag = 1;
                    ++covered_cells;
                }
            }
            SearchStep step{region, vp, static_cast<int>(cp.seen[k].size()), detect_objects(world, cp.seen[k], detector, rng)};
            const bool hit = std::find(step.detected.begin(), step.detected.end(), target) != step.detected.end();
            res.steps.push_back(std::move(step));
            if (hit) {
                res.found = true;
                res.covered_area_m2 = static_cast<double>(covered_cells) * world.cell_area();
                return res;
            }
        }
    }
    res.covered_area_m2 = static_cast<double>(covered_cells) * world.cell_area();
    return res;
}

SearchResult execute_search(const GridWorld& world, const SemanticMap& map, const std::string& target,
                            const ObjectLocationPrior& priors, const SearchParams& params,
                            const ObjectDetectorModel& detector, Rng& rng) {
    return execute_search(world, map, plan_search(world, map, params), target, priors, params, detector, rng);
}

std::string format_viewpoint_log(const SearchResult& result) {
    std::ostringstream out;
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        const auto& s = result.steps[i];
        out << "step " << i + 1 << " region " << s.region << " x " << format_double(s.pose.x) << " y "
            << format_double(s.pose.y) << " heading " << format_double(s.pose.heading) << " seen_cells "
            << s.seen_cells << " detected ";
        if (s.detected.empty()) out << "-";
        for (std::size_t k = 0; k < s.detected.size(); ++k) out << (k ? "," : "") << s.detected[k];
        out << "\n";
    }
    return out.str();
}

std::vector<SearchStep> parse_viewpoint_log(const std::string& text) {
    std::vector<SearchStep> out;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string k_step, k_region, k_x, k_y, k_heading, k_seen, k_det, det;
        int n = 0;
        SearchStep s;
        if (!(ls >> k_step >> n >> k_region >> s.region >> k_x >> s.pose.x >> k_y >> s.pose.y >> k_heading >>
              s.pose.heading >> k_seen >> s.seen_cells >> k_det >> det) ||
            k_step != "step" || k_region != "region" || k_x != "x" || k_y != "y" || k_heading != "heading" ||
            k_seen != "seen_cells" || k_det != "detected")
            throw ParseError("malformed viewpoint log line", no);
        if (det != "-") s.detected = split(det, ',');
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace confmap
