#pragma once

// Data-parallel kernels. Each kernel has a serial reference in
// confmap::serial and an OpenMP version in confmap::parallel that must
// produce identical results; the library calls the parallel ones.

#include <span>
#include <vector>

#include "confmap/world.hpp"

namespace confmap {

/// Result of greedy max-coverage selection over candidate sets.
struct GreedySelection {
    std::vector<std::size_t> order;  // candidate indices in selection order
    std::size_t covered = 0;         // universe elements covered at the end
};

namespace serial {

std::vector<std::vector<CellIndex>> visible_sets(const GridWorld& world, std::span<const Viewpoint> viewpoints);

/// Repeatedly picks the candidate adding the most uncovered elements (ties:
/// lowest candidate index) until `target` elements are covered or no
/// candidate adds anything. Sets hold element ids in [0, universe).
GreedySelection greedy_cover(std::span<const std::vector<int>> sets, std::size_t universe, std::size_t target);

}  // namespace serial

namespace parallel {

std::vector<std::vector<CellIndex>> visible_sets(const GridWorld& world, std::span<const Viewpoint> viewpoints);
GreedySelection greedy_cover(std::span<const std::vector<int>> sets, std::size_t universe, std::size_t target);

}  // namespace parallel

/// Worker threads available to the parallel kernels (1 without OpenMP).
int kernel_threads();

}  // namespace confmap
