#include "confmap/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confmap/kernels.hpp"

namespace confmap {

BeliefGrid::BeliefGrid(const GridWorld& world)
    : width_(world.width),
      height_(world.height),
      resolution_(world.resolution),
      n_categories_(world.categories.size()),
      free_(world.cell_count()),
      counts_(world.cell_count(), 0),
      logp_(world.cell_count() * world.categories.size(), -std::log(static_cast<double>(world.categories.size()))) {
    for (std::size_t i = 0; i < free_.size(); ++i) free_[i] = world.occupied[i] == 0;
}

void BeliefGrid::fuse(std::span<const CellIndex> cells, const CategoryDistribution& dist) {
    if (dist.size() != n_categories_) throw ArgumentError("observation has the wrong number of categories");
    for (CellIndex c : cells)
        if (!is_free(c)) throw ArgumentError("cannot fuse into cell " + std::to_string(c) + ": outside grid or occupied");
    std::vector<double> log_obs(n_categories_);
    for (std::size_t k = 0; k < n_categories_; ++k) log_obs[k] = std::log(std::max(dist[k], kFusionFloor));
    for (CellIndex c : cells) {
        double* lp = logp_.data() + static_cast<std::size_t>(c) * n_categories_;
        double mx = -INFINITY;
        for (std::size_t k = 0; k < n_categories_; ++k) mx = std::max(mx, lp[k] += log_obs[k]);
        double sum = 0.0;
        for (std::size_t k = 0; k < n_categories_; ++k) sum += std::exp(lp[k] - mx);
        const double lse = mx + std::log(sum);
        for (std::size_t k = 0; k < n_categories_; ++k) lp[k] -= lse;
        ++counts_[static_cast<std::size_t>(c)];
    }
}

void BeliefGrid::set_cell(CellIndex c, std::span<const double> log_posterior, int count) {
    if (!is_free(c)) throw ArgumentError("cannot set cell " + std::to_string(c) + ": outside grid or occupied");
    if (log_posterior.size() != n_categories_) throw ArgumentError("posterior has the wrong number of categories");
    std::copy(log_posterior.begin(), log_posterior.end(), logp_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(c) * n_categories_));
    counts_[static_cast<std::size_t>(c)] = count;
}

bool BeliefGrid::same_layout(const BeliefGrid& other) const {
    return width_ == other.width_ && height_ == other.height_ && n_categories_ == other.n_categories_ &&
           free_ == other.free_;
}

BeliefGrid fuse_observation(BeliefGrid grid, std::span<const CellIndex> cells, const CategoryDistribution& dist) {
    grid.fuse(cells, dist);
    return grid;
}

LabelGrid label_cells(const BeliefGrid& grid) {
    LabelGrid out{grid.width(), grid.height(), grid.resolution(), std::vector<Label>(grid.cell_count(), kOccupiedLabel)};
    for (CellIndex c = 0; c < static_cast<CellIndex>(grid.cell_count()); ++c) {
        if (!grid.is_free(c)) continue;
        if (grid.observation_count(c) == 0) {
            out.labels[static_cast<std::size_t>(c)] = kUnknownLabel;
            continue;
        }
        const auto lp = grid.log_posterior(c);
        out.labels[static_cast<std::size_t>(c)] = static_cast<Label>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    }
    return out;
}

std::string to_string(MapKind kind) {
    switch (kind) {
        case MapKind::appearance: return "appearance";
        case MapKind::object: return "object";
        case MapKind::merged: return "merged";
        case MapKind::baseline: return "baseline";
    }
    return "?";
}

MapKind parse_map_kind(const std::string& s) {
    for (MapKind k : kAllMapKinds)
        if (to_string(k) == s) return k;
    throw ArgumentError("unknown map kind '" + s + "'");
}

LabelGrid SemanticMap::labels() const {
    LabelGrid out{width, height, resolution, std::vector<Label>(region_of.size(), kOccupiedLabel)};
    for (const auto& r : regions)
        for (CellIndex c : r.cells) out.labels[static_cast<std::size_t>(c)] = r.label;
    return out;
}

SemanticMap make_semantic_map(MapKind kind, const CategorySet& categories, const LabelGrid& layout,
                              std::vector<SemanticRegion> regions) {
    SemanticMap m;
    m.kind = kind;
    m.width = layout.width;
    m.height = layout.height;
    m.resolution = layout.resolution;
    m.categories = categories;
    m.region_of.assign(layout.labels.size(), -1);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        regions[i].id = static_cast<int>(i);
        regions[i].area_m2 = static_cast<double>(regions[i].cells.size()) * layout.resolution * layout.resolution;
        for (CellIndex c : regions[i].cells) m.region_of[static_cast<std::size_t>(c)] = static_cast<int>(i);
    }
    m.regions = std::move(regions);
    return m;
}

namespace {

struct Components {
    std::vector<int> comp_of;  // -1 on occupied cells
    std::vector<Label> label;
    std::vector<int> size;
};

bool linked(const std::vector<int>* room_of, std::size_t a, std::size_t b) {
    return room_of == nullptr || (*room_of)[a] == (*room_of)[b];
}

Components label_components(const std::vector<Label>& labels, int width, int height, const std::vector<int>* room_of) {
    Components cc;
    cc.comp_of.assign(labels.size(), -1);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < labels.size(); ++start) {
        if (labels[start] == kOccupiedLabel || cc.comp_of[start] >= 0) continue;
        const int id = static_cast<int>(cc.label.size());
        cc.label.push_back(labels[start]);
        cc.size.push_back(0);
        cc.comp_of[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            ++cc.size.back();
            const int col = static_cast<int>(c % static_cast<std::size_t>(width));
            const int row = static_cast<int>(c / static_cast<std::size_t>(width));
            const int nc[4] = {col - 1, col + 1, col, col};
            const int nr[4] = {row, row, row - 1, row + 1};
            for (int k = 0; k < 4; ++k) {
                if (nc[k] < 0 || nr[k] < 0 || nc[k] >= width || nr[k] >= height) continue;
                const auto n = static_cast<std::size_t>(nr[k] * width + nc[k]);
                if (cc.comp_of[n] >= 0 || labels[n] != labels[start] || !linked(room_of, c, n)) continue;
                cc.comp_of[n] = id;
                stack.push_back(n);
            }
        }
    }
    return cc;
}

// Calls f(a, b) once for every 4-adjacent pair of linked free cells.
template <typename F>
void for_each_adjacent_pair(const std::vector<Label>& labels, int width, int height, const std::vector<int>* room_of,
                            F&& f) {
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const auto a = static_cast<std::size_t>(row * width + col);
            if (labels[a] == kOccupiedLabel) continue;
            if (col + 1 < width) {
                const std::size_t b = a + 1;
                if (labels[b] != kOccupiedLabel && linked(room_of, a, b)) f(a, b);
            }
            if (row + 1 < height) {
                const std::size_t b = a + static_cast<std::size_t>(width);
                if (labels[b] != kOccupiedLabel && linked(room_of, a, b)) f(a, b);
            }
        }
    }
}

}  // namespace

std::vector<SemanticRegion> extract_regions(const LabelGrid& grid, int min_region_cells, const std::vector<int>* room_of) {
    if (min_region_cells < 1) throw ArgumentError("min_region_cells must be positive");
    if (room_of != nullptr && room_of->size() != grid.labels.size()) throw ArgumentError("room map size mismatch");
    std::vector<Label> labels = grid.labels;
    const int w = grid.width, h = grid.height;

    while (true) {
        const Components cc = label_components(labels, w, h, room_of);
        const std::size_t n = cc.label.size();
        std::vector<std::uint8_t> has_labeled_neighbor(n, 0);
        for_each_adjacent_pair(labels, w, h, room_of, [&](std::size_t a, std::size_t b) {
            const int ca = cc.comp_of[a], cb = cc.comp_of[b];
            if (ca == cb) return;
            if (cc.label[static_cast<std::size_t>(cb)] != kUnknownLabel) has_labeled_neighbor[static_cast<std::size_t>(ca)] = 1;
            if (cc.label[static_cast<std::size_t>(ca)] != kUnknownLabel) has_labeled_neighbor[static_cast<std::size_t>(cb)] = 1;
        });

        // Unknown components go first so a labeled component never has an
        // unknown neighbor by the time it is considered for absorption.
        int victim = -1;
        for (std::size_t i = 0; i < n && victim < 0; ++i)
            if (cc.label[i] == kUnknownLabel && has_labeled_neighbor[i]) victim = static_cast<int>(i);
        if (victim < 0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (cc.label[i] == kUnknownLabel || cc.size[i] >= min_region_cells || !has_labeled_neighbor[i]) continue;
                if (victim < 0 || cc.size[i] < cc.size[static_cast<std::size_t>(victim)]) victim = static_cast<int>(i);
            }
        }
        if (victim < 0) break;

        std::vector<int> boundary(n, 0);
        for_each_adjacent_pair(labels, w, h, room_of, [&](std::size_t a, std::size_t b) {
            const int ca = cc.comp_of[a], cb = cc.comp_of[b];
            if (ca == victim && cb != victim) ++boundary[static_cast<std::size_t>(cb)];
            if (cb == victim && ca != victim) ++boundary[static_cast<std::size_t>(ca)];
        });
        int target = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (cc.label[i] == kUnknownLabel || boundary[i] == 0) continue;
            if (target < 0 || boundary[i] > boundary[static_cast<std::size_t>(target)]) target = static_cast<int>(i);
        }
        const Label new_label = cc.label[static_cast<std::size_t>(target)];
        for (std::size_t c = 0; c < labels.size(); ++c)
            if (cc.comp_of[c] == victim) labels[c] = new_label;
    }

    const Components cc = label_components(labels, w, h, room_of);
    std::vector<SemanticRegion> regions(cc.label.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        regions[i].id = static_cast<int>(i);
        regions[i].label = cc.label[i];
        regions[i].cells.reserve(static_cast<std::size_t>(cc.size[i]));
        regions[i].area_m2 = cc.size[i] * grid.resolution * grid.resolution;
    }
    for (std::size_t c = 0; c < labels.size(); ++c)
        if (cc.comp_of[c] >= 0) regions[static_cast<std::size_t>(cc.comp_of[c])].cells.push_back(static_cast<CellIndex>(c));
    return regions;
}

BeliefGrid merge_maps(const BeliefGrid& app, const BeliefGrid& obj, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0,1]");
    if (!app.same_layout(obj)) throw ArgumentError("belief grids differ in dimensions or categories");
    BeliefGrid out = app;
    std::vector<double> pooled(app.category_count());
    for (CellIndex c = 0; c < static_cast<CellIndex>(app.cell_count()); ++c) {
        if (!app.is_free(c)) continue;
        const int na = app.observation_count(c), no = obj.observation_count(c);
        if (no == 0) continue;
        if (na == 0) {
            out.set_cell(c, obj.log_posterior(c), no);
            continue;
        }
        const auto la = app.log_posterior(c), lo = obj.log_posterior(c);
        double mx = -INFINITY;
        for (std::size_t k = 0; k < pooled.size(); ++k) mx = std::max(mx, pooled[k] = alpha * la[k] + (1.0 - alpha) * lo[k]);
        double sum = 0.0;
        for (double v : pooled) sum += std::exp(v - mx);
        const double lse = mx + std::log(sum);
        for (double& v : pooled) v -= lse;
        out.set_cell(c, pooled, na + no);
    }
    return out;
}

SemanticMap baseline_room_map(const GridWorld& world, const BeliefGrid& grid) {
    const LabelGrid cell_labels = label_cells(grid);
    const std::size_t n_rooms = world.room_count();
    std::vector<std::vector<int>> votes(n_rooms, std::vector<int>(world.categories.size(), 0));
    std::vector<SemanticRegion> regions(n_rooms);
    for (CellIndex c = 0; c < static_cast<CellIndex>(world.cell_count()); ++c) {
        if (!world.is_free(c)) continue;
        const auto room = static_cast<std::size_t>(world.room_of[static_cast<std::size_t>(c)]);
        regions[room].cells.push_back(c);
        const Label l = cell_labels.at(c);
        if (l >= 0) ++votes[room][static_cast<std::size_t>(l)];
    }
    for (std::size_t r = 0; r < n_rooms; ++r) {
        const auto& v = votes[r];
        const auto best = std::max_element(v.begin(), v.end());
        regions[r].label = *best > 0 ? static_cast<Label>(best - v.begin()) : kUnknownLabel;
    }
    std::erase_if(regions, [](const SemanticRegion& r) { return r.cells.empty(); });
    return make_semantic_map(MapKind::baseline, world.categories, cell_labels, std::move(regions));
}

std::vector<Viewpoint> lattice_schedule(const GridWorld& world, double spacing, double fov, double range) {
    if (!(spacing > 0.0)) throw ArgumentError("lattice spacing must be positive");
    const int step = std::max(1, static_cast<int>(std::lround(spacing / world.resolution)));
    const int offset = step / 2;
    std::vector<Viewpoint> out;
    for (int row = offset; row < world.height; row += step)
        for (int col = offset; col < world.width; col += step)
            if (world.is_free(col, row)) out.push_back(world.viewpoint_at(world.index(col, row), 0.0, fov, range));
    return out;
}

BeliefGrids build_belief_grids(const GridWorld& world, const PerceptionModels& models,
                               std::span<const Viewpoint> schedule, Rng& rng) {
    if (schedule.empty()) throw ArgumentError("mapping schedule is empty");
    for (const auto& vp : schedule)
        if (!world.valid_viewpoint(vp)) throw ArgumentError("mapping schedule contains an invalid viewpoint");
    models.appearance.validate(world.categories.size());
    models.detector.validate();
    if (!(models.cooccurrence.categories() == world.categories))
        throw ArgumentError("co-occurrence table categories differ from the world's");

    // Visibility is independent per viewpoint; fusion below is sequential
    // so the random stream is consumed in schedule order.
    const auto visible = parallel::visible_sets(world, schedule);
    BeliefGrids grids{BeliefGrid(world), BeliefGrid(world)};
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        grids.appearance.fuse(visible[i], classify_appearance(world, visible[i], models.appearance, rng));
        const auto detections = detect_objects(world, visible[i], models.detector, rng);
        if (!detections.empty()) grids.object.fuse(visible[i], classify_objects(detections, models.cooccurrence));
    }
    return grids;
}

SemanticMap map_from_grids(const GridWorld& world, const BeliefGrids& grids, MapKind kind, const MapParams& params) {
    const std::vector<int>* rooms = params.per_room ? &world.room_of : nullptr;
    auto regions_for = [&](const BeliefGrid& g) {
        const LabelGrid labels = label_cells(g);
        return make_semantic_map(kind, world.categories, labels, extract_regions(labels, params.min_region_cells, rooms));
    };
    switch (kind) {
        case MapKind::appearance: return regions_for(grids.appearance);
        case MapKind::object: return regions_for(grids.object);
        case MapKind::merged: return regions_for(merge_maps(grids.appearance, grids.object, params.alpha));
        case MapKind::baseline: return baseline_room_map(world, merge_maps(grids.appearance, grids.object, params.alpha));
    }
    throw ArgumentError("unknown map kind");
}

SemanticMap build_confusion_map(const GridWorld& world, const PerceptionModels& models,
                                std::span<const Viewpoint> schedule, const MapParams& params, MapKind kind, Rng& rng) {
    return map_from_grids(world, build_belief_grids(world, models, schedule, rng), kind, params);
}

bool partitions_free_cells(const SemanticMap& map, const LabelGrid& layout) {
    std::vector<int> hits(layout.labels.size(), 0);
    for (const auto& r : map.regions)
        for (CellIndex c : r.cells) {
            if (c < 0 || static_cast<std::size_t>(c) >= hits.size()) return false;
            ++hits[static_cast<std::size_t>(c)];
        }
    for (std::size_t c = 0; c < hits.size(); ++c)
        if (hits[c] != (layout.labels[c] != kOccupiedLabel ? 1 : 0)) return false;
    return true;
}

}  // namespace confmap
