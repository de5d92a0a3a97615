#pragma once

// Builders and independent oracles shared by the unit and acceptance tests.
// Oracles here deliberately avoid the library's own traversal and sorting
// code so that agreement means something.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "confmap/perception.hpp"
#include "confmap/world.hpp"

namespace testsupport {

using namespace confmap;

inline std::string fixture(const std::string& name) { return std::string(CONFMAP_FIXTURES) + "/" + name; }

inline std::string world_text(const std::vector<std::string>& rows, const std::string& legend,
                              const std::string& objects = "",
                              const std::string& categories = "kitchen,office,corridor") {
    std::string t = "resolution=0.1\ncategories=" + categories + "\ngrid\n";
    for (const auto& r : rows) t += r + "\n";
    t += "end\nlegend\n" + legend + "end\n";
    if (!objects.empty()) t += "objects\n" + objects + "end\n";
    return t;
}

inline GridWorld make_world(const std::vector<std::string>& rows, const std::string& legend = "a room=r zone=z category=kitchen\n",
                            const std::string& objects = "", const std::string& categories = "kitchen,office,corridor") {
    return parse_world(world_text(rows, legend, objects, categories));
}

/// Rectangle of free 'a' cells with a one cell wall border.
inline std::vector<std::string> box_rows(int inner_w, int inner_h) {
    std::vector<std::string> rows;
    rows.push_back(std::string(static_cast<std::size_t>(inner_w + 2), '#'));
    for (int r = 0; r < inner_h; ++r) rows.push_back("#" + std::string(static_cast<std::size_t>(inner_w), 'a') + "#");
    rows.push_back(rows.front());
    return rows;
}

/// Random single-zone world: border walls plus pillars on even cells, which
/// keeps the free space 4-connected.
inline GridWorld random_world(std::mt19937_64& rng, int w, int h, double obstacle_p) {
    std::bernoulli_distribution occ(obstacle_p);
    std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '#'));
    for (int r = 1; r + 1 < h; ++r)
        for (int c = 1; c + 1 < w; ++c)
            if (c % 2 || r % 2 || !occ(rng)) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = 'a';
    rows[1][1] = 'a';
    return make_world(rows);
}

inline Viewpoint center_pose(const GridWorld& w, int col, int row, double heading, double fov, double range) {
    return {(col + 0.5) * w.resolution, (row + 0.5) * w.resolution, heading, fov, range};
}

/// Line of sight by sampling 32 evenly spaced points on the segment between
/// cell centers; any sample falling in an occupied cell blocks.
inline bool sampled_los(const GridWorld& w, GridCoord a, GridCoord b) {
    const double ax = a.col + 0.5, ay = a.row + 0.5, bx = b.col + 0.5, by = b.row + 0.5;
    for (int i = 0; i < 32; ++i) {
        const double t = i / 31.0;
        const int c = static_cast<int>(std::floor(ax + t * (bx - ax)));
        const int r = static_cast<int>(std::floor(ay + t * (by - ay)));
        if (!w.is_free(c, r)) return false;
    }
    return true;
}

/// True when the segment between cell centers passes exactly through a grid
/// vertex that touches an occupied cell. Point sampling almost never lands
/// on such a vertex, so the sampled oracle checks these separately.
inline bool grazes_occupied_vertex(const GridWorld& w, GridCoord a, GridCoord b) {
    const std::int64_t ax = 2 * a.col + 1, ay = 2 * a.row + 1, bx = 2 * b.col + 1, by = 2 * b.row + 1;
    for (int y = std::min(a.row, b.row) + 1; y <= std::max(a.row, b.row); ++y) {
        for (int x = std::min(a.col, b.col) + 1; x <= std::max(a.col, b.col); ++x) {
            if ((2 * x - ax) * (by - ay) != (2 * y - ay) * (bx - ax)) continue;
            if (!w.is_free(x - 1, y - 1) || !w.is_free(x, y - 1) || !w.is_free(x - 1, y) || !w.is_free(x, y)) return true;
        }
    }
    return false;
}

/// Sampled oracle plus the conservative vertex rule.
inline bool sampled_los_vertex(const GridWorld& w, GridCoord a, GridCoord b) {
    return sampled_los(w, a, b) && !grazes_occupied_vertex(w, a, b);
}

/// Exact line of sight: the segment is blocked when it meets the closed
/// square of any occupied cell. Integer arithmetic in doubled coordinates.
inline bool exact_los(const GridWorld& w, GridCoord a, GridCoord b) {
    const std::int64_t ax = 2 * a.col + 1, ay = 2 * a.row + 1, bx = 2 * b.col + 1, by = 2 * b.row + 1;
    const int c0 = std::min(a.col, b.col), c1 = std::max(a.col, b.col);
    const int r0 = std::min(a.row, b.row), r1 = std::max(a.row, b.row);
    for (int r = r0 - 1; r <= r1 + 1; ++r) {
        for (int c = c0 - 1; c <= c1 + 1; ++c) {
            if (!w.in_bounds(c, r) || w.is_free(c, r)) continue;
            const std::int64_t x0 = 2 * c, x1 = 2 * c + 2, y0 = 2 * r, y1 = 2 * r + 2;
            if (std::max(ax, bx) < x0 || std::min(ax, bx) > x1 || std::max(ay, by) < y0 || std::min(ay, by) > y1)
                continue;
            int pos = 0, neg = 0;
            for (auto [px, py] : {std::pair{x0, y0}, std::pair{x1, y0}, std::pair{x0, y1}, std::pair{x1, y1}}) {
                const std::int64_t s = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
                if (s > 0) ++pos;
                if (s < 0) ++neg;
            }
            if (pos == 4 || neg == 4) continue;
            return false;
        }
    }
    return true;
}

/// Visible set by brute force over every cell with a pluggable LOS test.
template <class Los>
std::vector<CellIndex> visible_oracle(const GridWorld& w, const Viewpoint& vp, Los los) {
    const int pc = static_cast<int>(std::floor(vp.x / w.resolution));
    const int pr = static_cast<int>(std::floor(vp.y / w.resolution));
    std::vector<CellIndex> out;
    for (int r = 0; r < w.height; ++r) {
        for (int c = 0; c < w.width; ++c) {
            if (!w.is_free(c, r)) continue;
            if (c == pc && r == pr) {
                out.push_back(w.index(c, r));
                continue;
            }
            const double dx = (c + 0.5) * w.resolution - vp.x;
            const double dy = (r + 0.5) * w.resolution - vp.y;
            if (std::sqrt(dx * dx + dy * dy) > vp.range + 1e-9) continue;
            if (vp.fov < 2.0 * std::numbers::pi - 1e-12) {
                double d = std::atan2(dy, dx) - vp.heading;
                while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
                while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
                if (std::abs(d) > vp.fov / 2.0 + 1e-12) continue;
            }
            if (!los(w, GridCoord{pc, pr}, GridCoord{c, r})) continue;
            out.push_back(w.index(c, r));
        }
    }
    return out;
}

/// Naive Bayes in linear space straight from the definition.
inline std::vector<double> bayes_oracle(const std::vector<double>& prior,
                                        const std::vector<std::vector<double>>& likelihood_rows) {
    std::vector<double> p = prior;
    for (const auto& row : likelihood_rows)
        for (std::size_t c = 0; c < p.size(); ++c)
            p[c] *= std::clamp(row[c], kLikelihoodFloor, kLikelihoodCap);
    double s = 0.0;
    for (double v : p) s += v;
    for (double& v : p) v /= s;
    return p;
}

}  // namespace testsupport
