#include "confmap/map_io.hpp"

#include <fstream>
#include <sstream>

namespace confmap {

namespace {

char label_char(Label l) {
    if (l == kOccupiedLabel) return '#';
    if (l == kUnknownLabel) return '?';
    return static_cast<char>('a' + l);
}

constexpr const char* kPalette[] = {"#e6194b", "#4363d8", "#ffe119", "#3cb44b", "#42d4f4", "#f58231",
                                    "#f032e6", "#911eb4", "#bfef45", "#469990", "#9a6324", "#800000"};

}  // namespace

std::string format_map_text(const SemanticMap& map) {
    if (map.categories.size() > 26) throw ArgumentError("map export supports at most 26 categories");
    std::ostringstream out;
    out << "kind=" << to_string(map.kind) << "\n";
    out << "resolution=" << format_double(map.resolution) << "\n";
    out << "categories=";
    for (std::size_t i = 0; i < map.categories.size(); ++i) out << (i ? "," : "") << map.categories.name(static_cast<Label>(i));
    out << "\ngrid\n";
    const LabelGrid labels = map.labels();
    for (int r = 0; r < map.height; ++r) {
        for (int c = 0; c < map.width; ++c) out << label_char(labels.at(r * map.width + c));
        out << "\n";
    }
    out << "end\n";
    for (const auto& reg : map.regions)
        out << "region " << reg.id << " " << map.categories.label_name(reg.label) << " " << reg.cells.size() << " "
            << format_double(reg.area_m2) << "\n";
    return out.str();
}

MapDocument parse_map_text(const std::string& text) {
    MapDocument doc;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    bool in_grid = false, saw_grid = false;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (in_grid) {
            if (line == "end") {
                in_grid = false;
                continue;
            }
            rows.push_back(line);
            continue;
        }
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t == "grid") {
            in_grid = saw_grid = true;
            continue;
        }
        if (t.starts_with("region ")) {
            std::istringstream ls{std::string(t)};
            std::string kw;
            RegionRow row;
            if (!(ls >> kw >> row.id >> row.label >> row.n_cells >> row.area_m2)) throw ParseError("malformed region line", no);
            doc.regions.push_back(row);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value", no);
        const std::string key(t.substr(0, eq)), value(t.substr(eq + 1));
        if (key == "kind") doc.kind = value;
        else if (key == "resolution") doc.labels.resolution = std::stod(value);
        else if (key == "categories") doc.categories = CategorySet(split(value, ','));
        else throw ParseError("unknown key '" + key + "'", no);
    }
    if (!saw_grid || in_grid || rows.empty()) throw ParseError("missing or unterminated grid");
    doc.labels.width = static_cast<int>(rows.front().size());
    doc.labels.height = static_cast<int>(rows.size());
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != doc.labels.width) throw ParseError("ragged map grid");
        for (char ch : r) {
            if (ch == '#') doc.labels.labels.push_back(kOccupiedLabel);
            else if (ch == '?') doc.labels.labels.push_back(kUnknownLabel);
            else if (ch >= 'a' && ch < 'a' + static_cast<int>(doc.categories.size())) doc.labels.labels.push_back(ch - 'a');
            else throw ParseError(std::string("invalid map character '") + ch + "'");
        }
    }
    return doc;
}

MapDocument load_map_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open map '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_map_text(ss.str());
}

std::string render_svg(const LabelGrid& labels, const CategorySet& categories, const std::string& title) {
    constexpr int px = 6;
    constexpr int legend_row = 18;
    const int map_w = labels.width * px, map_h = labels.height * px;
    const int legend_h = static_cast<int>(categories.size() + 1) * legend_row + 30;
    auto fill = [&](Label l) -> std::string {
        if (l == kOccupiedLabel) return "#333333";
        if (l == kUnknownLabel) return "#d9d9d9";
        return kPalette[static_cast<std::size_t>(l) % std::size(kPalette)];
    };
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << std::max(map_w, 220) << "\" height=\""
        << map_h + legend_h << "\" shape-rendering=\"crispEdges\">\n";
    out << "<title>" << title << "</title>\n";
    for (int r = 0; r < labels.height; ++r) {
        int c = 0;
        while (c < labels.width) {
            const Label l = labels.at(r * labels.width + c);
            int end = c + 1;
            while (end < labels.width && labels.at(r * labels.width + end) == l) ++end;
            out << "<rect x=\"" << c * px << "\" y=\"" << r * px << "\" width=\"" << (end - c) * px << "\" height=\"" << px
                << "\" fill=\"" << fill(l) << "\"/>\n";
            c = end;
        }
    }
    int y = map_h + 20;
    out << "<text x=\"4\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    for (std::size_t k = 0; k <= categories.size(); ++k) {
        y += legend_row;
        const bool unknown = k == categories.size();
        const Label l = unknown ? kUnknownLabel : static_cast<Label>(k);
        out << "<rect x=\"4\" y=\"" << y - 12 << "\" width=\"12\" height=\"12\" fill=\"" << fill(l) << "\"/>"
            << "<text x=\"22\" y=\"" << y - 2 << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << categories.label_name(l) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace confmap
