#pragma once

#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "confmap/common.hpp"

namespace confmap {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultResolution = 0.1;

/// Ground-truth functional subarea of a room.
struct Zone {
    int id = 0;
    std::string name;
    int room_id = 0;
    Label true_category = 0;
    std::vector<CellIndex> cells;  // ascending
    friend bool operator==(const Zone&, const Zone&) = default;
};

struct PlacedObject {
    int id = 0;
    std::string category;
    GridCoord cell;
    friend bool operator==(const PlacedObject&, const PlacedObject&) = default;
};

/// Sensing pose. Positions are meters in the world frame: x grows with the
/// column, y grows with the row (row 0 is the top line of the world file).
/// Headings are measured from +x towards +y.
struct Viewpoint {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double fov = kTwoPi;
    double range = 3.0;
    friend bool operator==(const Viewpoint&, const Viewpoint&) = default;
};

/// Occupancy grid with rooms, zones and placed objects. Immutable once
/// validated; copy to modify (e.g. to place an object).
class GridWorld {
public:
    int width = 0;
    int height = 0;
    double resolution = kDefaultResolution;
    CategorySet categories;
    std::vector<std::uint8_t> occupied;  // 1 = occupied
    std::vector<int> room_of;            // -1 on occupied cells
    std::vector<int> zone_of;            // -1 on occupied cells
    std::vector<std::string> room_names;
    std::vector<Zone> zones;
    std::vector<PlacedObject> objects;

    std::size_t cell_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    bool in_bounds(int col, int row) const { return col >= 0 && row >= 0 && col < width && row < height; }
    CellIndex index(int col, int row) const { return row * width + col; }
    CellIndex index(GridCoord c) const { return index(c.col, c.row); }
    GridCoord coord(CellIndex idx) const { return {idx % width, idx / width}; }
    bool is_free(CellIndex idx) const { return occupied[static_cast<std::size_t>(idx)] == 0; }
    bool is_free(int col, int row) const { return in_bounds(col, row) && is_free(index(col, row)); }

    double center_x(CellIndex idx) const { return (idx % width + 0.5) * resolution; }
    double center_y(CellIndex idx) const { return (idx / width + 0.5) * resolution; }

    /// Cell containing the metric point, or -1 outside the grid.
    CellIndex cell_at(double x, double y) const;

    std::size_t room_count() const { return room_names.size(); }
    std::size_t free_cell_count() const;
    double cell_area() const { return resolution * resolution; }

    /// Free cells in ascending order.
    std::vector<CellIndex> free_cells() const;

    /// Pose at the center of `idx` with the given sensor parameters.
    Viewpoint viewpoint_at(CellIndex idx, double heading, double fov, double range) const;

    /// True when the pose satisfies the Viewpoint invariants for this world.
    bool valid_viewpoint(const Viewpoint& vp) const;

    /// Checks every GridWorld invariant; throws InvariantError naming the
    /// offending entity.
    void validate() const;

    friend bool operator==(const GridWorld&, const GridWorld&) = default;
};

/// Parses the text world format. Throws ParseError (with line) or
/// InvariantError.
GridWorld parse_world(const std::string& text);
GridWorld load_world(const std::filesystem::path& path);

/// Inverse of parse_world: parse_world(format_world(w)) == w.
std::string format_world(const GridWorld& world);
void save_world(const GridWorld& world, const std::filesystem::path& path);

/// Supercover line of sight between two cell centers. Blocked when the
/// segment enters an occupied cell; a segment through a grid vertex is
/// blocked if either side cell at that vertex is occupied.
bool line_of_sight(const GridWorld& world, GridCoord from, GridCoord to);

/// Free cells seen from `vp`, ascending. Range and sector use the metric
/// pose; occlusion uses the pose cell center. The pose cell is always in.
std::vector<CellIndex> visible_cells(const GridWorld& world, const Viewpoint& vp);

/// Objects whose cell is visible from `vp`, ascending id.
std::vector<PlacedObject> visible_objects(const GridWorld& world, const Viewpoint& vp);

}  // namespace confmap
