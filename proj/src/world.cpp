#include "confmap/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace confmap {

CellIndex GridWorld::cell_at(double x, double y) const {
    const double fc = std::floor(x / resolution);
    const double fr = std::floor(y / resolution);
    if (!(fc >= 0 && fr >= 0 && fc < width && fr < height)) return -1;
    return index(static_cast<int>(fc), static_cast<int>(fr));
}

std::size_t GridWorld::free_cell_count() const {
    return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), std::uint8_t{0}));
}

std::vector<CellIndex> GridWorld::free_cells() const {
    std::vector<CellIndex> out;
    out.reserve(free_cell_count());
    for (CellIndex i = 0; i < static_cast<CellIndex>(cell_count()); ++i)
        if (is_free(i)) out.push_back(i);
    return out;
}

Viewpoint GridWorld::viewpoint_at(CellIndex idx, double heading, double fov, double range) const {
    return {center_x(idx), center_y(idx), heading, fov, range};
}

bool GridWorld::valid_viewpoint(const Viewpoint& vp) const {
    if (!(vp.fov > 0.0 && vp.fov <= kTwoPi + 1e-12)) return false;
    if (!(vp.range > 0.0)) return false;
    if (!(vp.heading >= 0.0 && vp.heading < kTwoPi)) return false;
    const CellIndex c = cell_at(vp.x, vp.y);
    return c >= 0 && is_free(c);
}

namespace {

bool four_connected(const GridWorld& w, const std::vector<CellIndex>& cells) {
    if (cells.empty()) return false;
    std::vector<std::uint8_t> member(w.cell_count(), 0), seen(w.cell_count(), 0);
    for (auto c : cells) member[static_cast<std::size_t>(c)] = 1;
    std::vector<CellIndex> stack{cells.front()};
    seen[static_cast<std::size_t>(cells.front())] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        ++reached;
        const GridCoord g = w.coord(c);
        const GridCoord nb[4] = {{g.col - 1, g.row}, {g.col + 1, g.row}, {g.col, g.row - 1}, {g.col, g.row + 1}};
        for (const auto& n : nb) {
            if (!w.in_bounds(n.col, n.row)) continue;
            const auto ni = static_cast<std::size_t>(w.index(n));
            if (member[ni] && !seen[ni]) {
                seen[ni] = 1;
                stack.push_back(static_cast<CellIndex>(ni));
            }
        }
    }
    return reached == cells.size();
}

}  // namespace

void GridWorld::validate() const {
    if (width <= 0 || height <= 0) throw InvariantError("world has no cells");
    if (!(resolution > 0.0)) throw InvariantError("resolution must be positive");
    const std::size_t n = cell_count();
    if (occupied.size() != n || room_of.size() != n || zone_of.size() != n)
        throw InvariantError("per-cell arrays do not match world dimensions");
    for (std::size_t z = 0; z < zones.size(); ++z) {
        const Zone& zone = zones[z];
        if (zone.id != static_cast<int>(z)) throw InvariantError("zone ids must be dense and ordered");
        if (zone.room_id < 0 || zone.room_id >= static_cast<int>(room_names.size()))
            throw InvariantError("zone '" + zone.name + "' references an unknown room");
        if (zone.true_category < 0 || zone.true_category >= static_cast<Label>(categories.size()))
            throw InvariantError("zone '" + zone.name + "' has an unknown category");
        if (zone.cells.empty()) throw InvariantError("zone '" + zone.name + "' has no cells");
        for (auto c : zone.cells) {
            if (c < 0 || static_cast<std::size_t>(c) >= n || !is_free(c))
                throw InvariantError("zone '" + zone.name + "' contains a non-free cell");
            if (zone_of[static_cast<std::size_t>(c)] != zone.id)
                throw InvariantError("zone '" + zone.name + "' cell list disagrees with the zone map");
            if (room_of[static_cast<std::size_t>(c)] != zone.room_id)
                throw InvariantError("zone '" + zone.name + "' spans more than one room");
        }
        if (!four_connected(*this, zone.cells)) throw InvariantError("zone '" + zone.name + "' is not 4-connected");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (occupied[i]) continue;
        if (zone_of[i] < 0 || zone_of[i] >= static_cast<int>(zones.size()) || room_of[i] < 0)
            throw InvariantError("free cell " + std::to_string(i) + " has no room or zone");
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto& o = objects[i];
        if (o.id != static_cast<int>(i)) throw InvariantError("object ids must be dense and ordered");
        if (!is_free(o.cell.col, o.cell.row))
            throw InvariantError("object " + std::to_string(o.id) + " (" + o.category + ") at (" +
                                 std::to_string(o.cell.col) + "," + std::to_string(o.cell.row) +
                                 ") is not on a free cell");
    }
}

namespace {

struct Line {
    int number;
    std::string text;
};

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

template <typename T>
T parse_number(const std::string& s, int line, const char* what) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(std::string("invalid ") + what + " '" + s + "'", line);
    return v;
}

}  // namespace

GridWorld parse_world(const std::string& text) {
    std::vector<Line> lines;
    {
        std::istringstream in(text);
        std::string l;
        int no = 0;
        while (std::getline(in, l)) {
            ++no;
            if (!l.empty() && l.back() == '\r') l.pop_back();
            lines.push_back({no, l});
        }
    }

    GridWorld w;
    w.categories = CategorySet::defaults();
    std::size_t i = 0;
    auto skippable = [](const std::string& s) {
        const auto t = trim(s);
        return t.empty() || t.starts_with("//");
    };

    // Header.
    bool saw_grid = false;
    for (; i < lines.size(); ++i) {
        if (skippable(lines[i].text)) continue;
        const std::string t(trim(lines[i].text));
        if (t == "grid") {
            saw_grid = true;
            ++i;
            break;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value header line", lines[i].number);
        const std::string key(trim(std::string_view(t).substr(0, eq)));
        const std::string value(trim(std::string_view(t).substr(eq + 1)));
        if (key == "resolution") {
            w.resolution = parse_number<double>(value, lines[i].number, "resolution");
            if (!(w.resolution > 0.0)) throw ParseError("resolution must be positive", lines[i].number);
        } else if (key == "categories") {
            try {
                w.categories = CategorySet(split(value, ','));
            } catch (const InvariantError& e) {
                throw ParseError(e.what(), lines[i].number);
            }
        } else {
            throw ParseError("unknown header key '" + key + "'", lines[i].number);
        }
    }
    if (!saw_grid) throw ParseError("missing grid block");

    // Grid rows until "end".
    std::vector<Line> rows;
    bool grid_closed = false;
    for (; i < lines.size(); ++i) {
        if (trim(lines[i].text) == "end") {
            grid_closed = true;
            ++i;
            break;
        }
        rows.push_back(lines[i]);
    }
    if (!grid_closed) throw ParseError("grid block not terminated by 'end'");
    if (rows.empty()) throw ParseError("empty grid");
    w.width = static_cast<int>(rows.front().text.size());
    w.height = static_cast<int>(rows.size());
    for (const auto& r : rows)
        if (static_cast<int>(r.text.size()) != w.width)
            throw ParseError("grid row width " + std::to_string(r.text.size()) + " differs from " +
                                 std::to_string(w.width),
                             r.number);
    if (w.width == 0) throw ParseError("empty grid", rows.front().number);

    // Legend and objects.
    struct LegendEntry {
        int zone;
        int room;
    };
    std::map<char, LegendEntry> legend;
    std::map<std::string, int> room_ids, zone_ids;
    std::vector<std::pair<GridCoord, int>> raw_objects;  // (cell, line)
    std::vector<std::string> object_categories;
    bool saw_legend = false;

    for (; i < lines.size(); ++i) {
        if (skippable(lines[i].text)) continue;
        const std::string block(trim(lines[i].text));
        if (block != "legend" && block != "objects")
            throw ParseError("expected 'legend' or 'objects' block, got '" + block + "'", lines[i].number);
        if (block == "legend") saw_legend = true;
        ++i;
        bool closed = false;
        for (; i < lines.size(); ++i) {
            if (skippable(lines[i].text)) continue;
            const auto tk = tokens(lines[i].text);
            const int ln = lines[i].number;
            if (tk.size() == 1 && tk[0] == "end") {
                closed = true;
                break;
            }
            if (block == "legend") {
                if (tk.size() != 4 || tk[0].size() != 1 || tk[0][0] < 'a' || tk[0][0] > 'z')
                    throw ParseError("legend line must be '<letter> room=<name> zone=<name> category=<name>'", ln);
                std::map<std::string, std::string> kv;
                for (std::size_t k = 1; k < 4; ++k) {
                    const auto eq = tk[k].find('=');
                    if (eq == std::string::npos || eq == 0 || eq + 1 == tk[k].size())
                        throw ParseError("malformed legend field '" + tk[k] + "'", ln);
                    kv[tk[k].substr(0, eq)] = tk[k].substr(eq + 1);
                }
                if (!kv.count("room") || !kv.count("zone") || !kv.count("category"))
                    throw ParseError("legend line needs room=, zone= and category=", ln);
                const char letter = tk[0][0];
                if (legend.count(letter)) throw ParseError(std::string("duplicate legend letter '") + letter + "'", ln);
                const Label cat = w.categories.find(kv["category"]);
                if (cat == kUnknownLabel) throw ParseError("unknown category '" + kv["category"] + "'", ln);
                auto [rit, rnew] = room_ids.try_emplace(kv["room"], static_cast<int>(w.room_names.size()));
                if (rnew) w.room_names.push_back(kv["room"]);
                auto [zit, znew] = zone_ids.try_emplace(kv["zone"], static_cast<int>(w.zones.size()));
                if (znew) {
                    Zone z;
                    z.id = zit->second;
                    z.name = kv["zone"];
                    z.room_id = rit->second;
                    z.true_category = cat;
                    w.zones.push_back(std::move(z));
                } else {
                    const Zone& z = w.zones[static_cast<std::size_t>(zit->second)];
                    if (z.room_id != rit->second)
                        throw InvariantError("zone '" + z.name + "' spans rooms '" + w.room_names[static_cast<std::size_t>(z.room_id)] +
                                             "' and '" + kv["room"] + "' (line " + std::to_string(ln) + ")");
                    if (z.true_category != cat)
                        throw InvariantError("zone '" + z.name + "' has conflicting categories (line " +
                                             std::to_string(ln) + ")");
                }
                legend[letter] = {zit->second, rit->second};
            } else {
                if (tk.size() != 4 || tk[0] != "object")
                    throw ParseError("object line must be 'object <category> <col> <row>'", ln);
                const GridCoord c{parse_number<int>(tk[2], ln, "column"), parse_number<int>(tk[3], ln, "row")};
                raw_objects.push_back({c, ln});
                object_categories.push_back(tk[1]);
            }
        }
        if (!closed) throw ParseError("'" + block + "' block not terminated by 'end'");
    }
    if (!saw_legend) throw ParseError("missing legend block");

    const std::size_t n = w.cell_count();
    w.occupied.assign(n, 1);
    w.room_of.assign(n, -1);
    w.zone_of.assign(n, -1);
    for (int r = 0; r < w.height; ++r) {
        const Line& row = rows[static_cast<std::size_t>(r)];
        for (int c = 0; c < w.width; ++c) {
            const char ch = row.text[static_cast<std::size_t>(c)];
            if (ch == '#') continue;
            const auto it = legend.find(ch);
            if (it == legend.end())
                throw ParseError(std::string("grid character '") + ch + "' at column " + std::to_string(c) +
                                     " is not in the legend",
                                 row.number);
            const auto idx = static_cast<std::size_t>(w.index(c, r));
            w.occupied[idx] = 0;
            w.room_of[idx] = it->second.room;
            w.zone_of[idx] = it->second.zone;
            w.zones[static_cast<std::size_t>(it->second.zone)].cells.push_back(static_cast<CellIndex>(idx));
        }
    }

    for (std::size_t k = 0; k < raw_objects.size(); ++k) {
        const auto [cell, ln] = raw_objects[k];
        if (!w.in_bounds(cell.col, cell.row) || !w.is_free(w.index(cell)))
            throw InvariantError("object " + std::to_string(k) + " (" + object_categories[k] + ") at (" +
                                 std::to_string(cell.col) + "," + std::to_string(cell.row) +
                                 ") is not on a free cell (line " + std::to_string(ln) + ")");
        w.objects.push_back({static_cast<int>(k), object_categories[k], cell});
    }

    w.validate();
    return w;
}

GridWorld load_world(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open world file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_world(ss.str());
}

std::string format_world(const GridWorld& world) {
    if (world.zones.size() > 26) throw ArgumentError("world format supports at most 26 zones");
    std::ostringstream out;
    out << "resolution=" << format_double(world.resolution) << "\n";
    out << "categories=";
    for (std::size_t i = 0; i < world.categories.size(); ++i)
        out << (i ? "," : "") << world.categories.name(static_cast<Label>(i));
    out << "\ngrid\n";
    for (int r = 0; r < world.height; ++r) {
        std::string row(static_cast<std::size_t>(world.width), '#');
        for (int c = 0; c < world.width; ++c) {
            const auto idx = static_cast<std::size_t>(world.index(c, r));
            if (!world.occupied[idx]) row[static_cast<std::size_t>(c)] = static_cast<char>('a' + world.zone_of[idx]);
        }
        out << row << "\n";
    }
    out << "end\nlegend\n";
    for (const auto& z : world.zones)
        out << static_cast<char>('a' + z.id) << " room=" << world.room_names[static_cast<std::size_t>(z.room_id)]
            << " zone=" << z.name << " category=" << world.categories.name(z.true_category) << "\n";
    out << "end\n";
    if (!world.objects.empty()) {
        out << "objects\n";
        for (const auto& o : world.objects) out << "object " << o.category << " " << o.cell.col << " " << o.cell.row << "\n";
        out << "end\n";
    }
    return out.str();
}

void save_world(const GridWorld& world, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write world file '" + path.string() + "'");
    out << format_world(world);
}

bool line_of_sight(const GridWorld& world, GridCoord from, GridCoord to) {
    const int dx = std::abs(to.col - from.col);
    const int dy = std::abs(to.row - from.row);
    const int sx = to.col > from.col ? 1 : -1;
    const int sy = to.row > from.row ? 1 : -1;
    int col = from.col, row = from.row;
    int ix = 0, iy = 0;
    // Exact integer comparison of the parametric crossing times
    // (ix + 1/2) / dx and (iy + 1/2) / dy.
    while (ix < dx || iy < dy) {
        const long lhs = static_cast<long>(1 + 2 * ix) * dy;
        const long rhs = static_cast<long>(1 + 2 * iy) * dx;
        if (lhs == rhs) {
            if (!world.is_free(col + sx, row) || !world.is_free(col, row + sy)) return false;
            col += sx;
            row += sy;
            ++ix;
            ++iy;
        } else if (lhs < rhs) {
            col += sx;
            ++ix;
        } else {
            row += sy;
            ++iy;
        }
        if (!world.is_free(col, row)) return false;
    }
    return true;
}

namespace {

double angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d > std::numbers::pi) d -= kTwoPi;
    if (d < -std::numbers::pi) d += kTwoPi;
    return d;
}

}  // namespace

std::vector<CellIndex> visible_cells(const GridWorld& world, const Viewpoint& vp) {
    std::vector<CellIndex> out;
    const CellIndex own = world.cell_at(vp.x, vp.y);
    if (own < 0 || !world.is_free(own)) return out;
    const GridCoord origin = world.coord(own);
    const double res = world.resolution;
    const bool full_circle = vp.fov >= kTwoPi - 1e-12;
    const double half_fov = vp.fov / 2.0;
    const double r2 = vp.range * vp.range + 1e-9;

    const int c0 = std::max(0, static_cast<int>(std::floor((vp.x - vp.range) / res)));
    const int c1 = std::min(world.width - 1, static_cast<int>(std::floor((vp.x + vp.range) / res)));
    const int r0 = std::max(0, static_cast<int>(std::floor((vp.y - vp.range) / res)));
    const int r1 = std::min(world.height - 1, static_cast<int>(std::floor((vp.y + vp.range) / res)));

    for (int row = r0; row <= r1; ++row) {
        for (int col = c0; col <= c1; ++col) {
            const CellIndex idx = world.index(col, row);
            if (!world.is_free(idx)) continue;
            if (idx == own) {
                out.push_back(idx);
                continue;
            }
            const double dx = (col + 0.5) * res - vp.x;
            const double dy = (row + 0.5) * res - vp.y;
            if (dx * dx + dy * dy > r2) continue;
            if (!full_circle && std::abs(angle_diff(std::atan2(dy, dx), vp.heading)) > half_fov + 1e-12) continue;
            if (!line_of_sight(world, origin, {col, row})) continue;
            out.push_back(idx);
        }
    }
    return out;
}

std::vector<PlacedObject> visible_objects(const GridWorld& world, const Viewpoint& vp) {
    std::vector<PlacedObject> out;
    if (world.objects.empty()) return out;
    const auto cells = visible_cells(world, vp);
    for (const auto& o : world.objects)
        if (std::binary_search(cells.begin(), cells.end(), world.index(o.cell))) out.push_back(o);
    return out;
}

}  // namespace confmap
