#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "confmap/semantic_map.hpp"

namespace confmap {

/// Region table row of an exported map.
struct RegionRow {
    int id = 0;
    std::string label;
    int n_cells = 0;
    double area_m2 = 0.0;
};

/// Parsed map export: enough to render without the source world.
struct MapDocument {
    std::string kind;
    CategorySet categories;
    LabelGrid labels;
    std::vector<RegionRow> regions;
};

/// Header lines, an ASCII label grid ('#' occupied, 'a'+k for category k,
/// '?' unknown) and one `region <id> <label> <n_cells> <area_m2>` line per
/// region.
std::string format_map_text(const SemanticMap& map);
MapDocument parse_map_text(const std::string& text);
MapDocument load_map_text(const std::filesystem::path& path);

/// Colored cell rendering with a category legend.
std::string render_svg(const LabelGrid& labels, const CategorySet& categories, const std::string& title);

}  // namespace confmap
