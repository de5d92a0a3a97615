#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "confmap/perception.hpp"
#include "confmap/world.hpp"

namespace confmap {

inline constexpr double kFusionFloor = 1e-6;

/// Per-free-cell posterior over place categories. Posteriors are stored as
/// normalized log-probabilities so long runs of confident evidence never
/// underflow to zero.
class BeliefGrid {
public:
    BeliefGrid() = default;
    explicit BeliefGrid(const GridWorld& world);

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    std::size_t category_count() const { return n_categories_; }
    std::size_t cell_count() const { return free_.size(); }
    bool is_free(CellIndex c) const { return c >= 0 && static_cast<std::size_t>(c) < free_.size() && free_[static_cast<std::size_t>(c)]; }

    int observation_count(CellIndex c) const { return counts_[static_cast<std::size_t>(c)]; }
    std::span<const double> log_posterior(CellIndex c) const {
        return {logp_.data() + static_cast<std::size_t>(c) * n_categories_, n_categories_};
    }
    CategoryDistribution distribution(CellIndex c) const { return CategoryDistribution::from_log(log_posterior(c)); }

    /// Multiplies `dist` (floored at kFusionFloor) into every listed cell.
    /// Throws ArgumentError for a cell outside the grid or not free.
    void fuse(std::span<const CellIndex> cells, const CategoryDistribution& dist);

    /// Overwrites one cell; used by merging.
    void set_cell(CellIndex c, std::span<const double> log_posterior, int count);

    bool same_layout(const BeliefGrid& other) const;

private:
    int width_ = 0;
    int height_ = 0;
    double resolution_ = kDefaultResolution;
    std::size_t n_categories_ = 0;
    std::vector<std::uint8_t> free_;
    std::vector<int> counts_;
    std::vector<double> logp_;
};

/// Returns a copy of `grid` with the observation fused in.
BeliefGrid fuse_observation(BeliefGrid grid, std::span<const CellIndex> cells, const CategoryDistribution& dist);

/// One label per cell: a category index, kUnknownLabel or kOccupiedLabel.
struct LabelGrid {
    int width = 0;
    int height = 0;
    double resolution = kDefaultResolution;
    std::vector<Label> labels;

    Label at(CellIndex c) const { return labels[static_cast<std::size_t>(c)]; }
    bool is_free(CellIndex c) const { return labels[static_cast<std::size_t>(c)] != kOccupiedLabel; }
};

/// Argmax per observed cell (ties to the lowest index), kUnknownLabel on
/// unobserved cells.
LabelGrid label_cells(const BeliefGrid& grid);

struct SemanticRegion {
    int id = 0;
    Label label = kUnknownLabel;
    std::vector<CellIndex> cells;  // ascending
    double area_m2 = 0.0;
};

enum class MapKind { appearance, object, merged, baseline };
std::string to_string(MapKind kind);
MapKind parse_map_kind(const std::string& s);
inline constexpr std::array<MapKind, 4> kAllMapKinds{MapKind::appearance, MapKind::object, MapKind::merged,
                                                     MapKind::baseline};

/// Regions partitioning the free cells of a world.
struct SemanticMap {
    MapKind kind = MapKind::merged;
    int width = 0;
    int height = 0;
    double resolution = kDefaultResolution;
    CategorySet categories;
    std::vector<SemanticRegion> regions;  // regions[i].id == i
    std::vector<int> region_of;           // -1 on occupied cells

    LabelGrid labels() const;
};

/// Builds the map wrapper for a region list and recomputes region_of.
SemanticMap make_semantic_map(MapKind kind, const CategorySet& categories, const LabelGrid& layout,
                              std::vector<SemanticRegion> regions);

/// Connected components of equal labels with small-component absorption.
/// When `room_of` is given, connectivity and absorption stay inside rooms.
std::vector<SemanticRegion> extract_regions(const LabelGrid& labels, int min_region_cells,
                                            const std::vector<int>* room_of = nullptr);

/// Log-linear pooling app^alpha * obj^(1-alpha), falling back to whichever
/// side observed a cell when the other did not.
BeliefGrid merge_maps(const BeliefGrid& app, const BeliefGrid& obj, double alpha);

/// One region per room labeled by majority of per-cell argmax.
SemanticMap baseline_room_map(const GridWorld& world, const BeliefGrid& grid);

struct PerceptionModels {
    AppearanceModel appearance;
    ObjectDetectorModel detector;
    CooccurrenceTable cooccurrence;
};

struct MapParams {
    double alpha = 0.5;
    int min_region_cells = 8;
    bool per_room = false;
};

/// Mapping viewpoints on a lattice of free cells spaced `spacing` meters
/// apart, aligned to the grid origin.
std::vector<Viewpoint> lattice_schedule(const GridWorld& world, double spacing, double fov, double range);

struct BeliefGrids {
    BeliefGrid appearance;
    BeliefGrid object;
};

/// Runs both classifiers at each scheduled viewpoint and fuses their
/// outputs over the visible cells. Object evidence is fused only for
/// viewpoints with at least one detection.
BeliefGrids build_belief_grids(const GridWorld& world, const PerceptionModels& models,
                               std::span<const Viewpoint> schedule, Rng& rng);

/// Region extraction for one kind from already fused grids.
SemanticMap map_from_grids(const GridWorld& world, const BeliefGrids& grids, MapKind kind, const MapParams& params);

SemanticMap build_confusion_map(const GridWorld& world, const PerceptionModels& models,
                                std::span<const Viewpoint> schedule, const MapParams& params, MapKind kind, Rng& rng);

/// Every free cell in exactly one region.
bool partitions_free_cells(const SemanticMap& map, const LabelGrid& layout);

}  // namespace confmap
