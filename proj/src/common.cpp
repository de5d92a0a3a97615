#include "confmap/common.hpp"

#include <charconv>
#include <set>

namespace confmap {

CategorySet::CategorySet(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw InvariantError("category names must be non-empty");
        if (n == "unknown") throw InvariantError("category name 'unknown' is reserved");
        if (!seen.insert(n).second) throw InvariantError("duplicate category name '" + n + "'");
    }
}

CategorySet CategorySet::defaults() {
    return CategorySet({"kitchen", "office", "living_room", "bedroom", "bathroom", "corridor", "storage"});
}

Label CategorySet::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<Label>(i);
    return kUnknownLabel;
}

Label CategorySet::index(std::string_view name) const {
    const Label idx = find(name);
    if (idx == kUnknownLabel) throw ArgumentError("unknown place category '" + std::string(name) + "'");
    return idx;
}

std::string CategorySet::label_name(Label idx) const {
    if (idx == kUnknownLabel) return "unknown";
    return name(idx);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace confmap
