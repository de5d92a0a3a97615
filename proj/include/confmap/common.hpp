#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confmap {

/// Row-major index of a grid cell (row * width + col).
using CellIndex = std::int32_t;

/// Category index into a CategorySet. Negative values are reserved.
using Label = std::int32_t;
inline constexpr Label kUnknownLabel = -1;
inline constexpr Label kOccupiedLabel = -2;

/// The only random stream type used by the library. Every stochastic
/// operation draws from a caller-owned instance; nothing is global.
using Rng = std::mt19937_64;

struct GridCoord {
    int col = 0;
    int row = 0;
    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

/// Malformed input text. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Well-formed input that violates a domain invariant.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation called with arguments outside its contract.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Ordered list of place-category names; order is fixed for the lifetime of
/// every object built against it.
class CategorySet {
public:
    CategorySet() = default;
    explicit CategorySet(std::vector<std::string> names);

    static CategorySet defaults();

    std::size_t size() const { return names_.size(); }
    const std::string& name(Label idx) const { return names_.at(static_cast<std::size_t>(idx)); }
    const std::vector<std::string>& names() const { return names_; }

    /// Index of `name`, or kUnknownLabel when absent.
    Label find(std::string_view name) const;
    /// Index of `name`; throws ArgumentError when absent.
    Label index(std::string_view name) const;

    /// Name for a label including the reserved "unknown".
    std::string label_name(Label idx) const;

    friend bool operator==(const CategorySet&, const CategorySet&) = default;

private:
    std::vector<std::string> names_;
};

/// Stable 64-bit mixing used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over the bytes of `s`, continuing from `h`.
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace confmap
