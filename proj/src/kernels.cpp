#include "confmap/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace confmap {

int kernel_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

std::size_t gain_of(const std::vector<int>& set, const std::vector<std::uint8_t>& covered) {
    std::size_t g = 0;
    for (int e : set) g += covered[static_cast<std::size_t>(e)] == 0;
    return g;
}

void apply(const std::vector<int>& set, std::vector<std::uint8_t>& covered, std::size_t& count) {
    for (int e : set) {
        auto& c = covered[static_cast<std::size_t>(e)];
        if (!c) {
            c = 1;
            ++count;
        }
    }
}

}  // namespace

namespace serial {

std::vector<std::vector<CellIndex>> visible_sets(const GridWorld& world, std::span<const Viewpoint> viewpoints) {
    std::vector<std::vector<CellIndex>> out;
    out.reserve(viewpoints.size());
    for (const auto& vp : viewpoints) out.push_back(visible_cells(world, vp));
    return out;
}

GreedySelection greedy_cover(std::span<const std::vector<int>> sets, std::size_t universe, std::size_t target) {
    GreedySelection sel;
    std::vector<std::uint8_t> covered(universe, 0);
    while (sel.covered < target) {
        std::size_t best = 0, best_gain = 0;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const std::size_t g = gain_of(sets[i], covered);
            if (g > best_gain) {
                best_gain = g;
                best = i;
            }
        }
        if (best_gain == 0) break;
        sel.order.push_back(best);
        apply(sets[best], covered, sel.covered);
    }
    return sel;
}

}  // namespace serial

namespace parallel {

std::vector<std::vector<CellIndex>> visible_sets(const GridWorld& world, std::span<const Viewpoint> viewpoints) {
    std::vector<std::vector<CellIndex>> out(viewpoints.size());
    const auto n = static_cast<std::ptrdiff_t>(viewpoints.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = visible_cells(world, viewpoints[static_cast<std::size_t>(i)]);
    return out;
}

GreedySelection greedy_cover(std::span<const std::vector<int>> sets, std::size_t universe, std::size_t target) {
    GreedySelection sel;
    std::vector<std::uint8_t> covered(universe, 0);
    std::vector<std::size_t> gains(sets.size());
    const auto n = static_cast<std::ptrdiff_t>(sets.size());
    while (sel.covered < target) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            gains[static_cast<std::size_t>(i)] = gain_of(sets[static_cast<std::size_t>(i)], covered);
        // Serial argmax keeps the lowest-index tie-break independent of the
        // thread schedule.
        std::size_t best = 0, best_gain = 0;
        for (std::size_t i = 0; i < gains.size(); ++i) {
            if (gains[i] > best_gain) {
                best_gain = gains[i];
                best = i;
            }
        }
        if (best_gain == 0) break;
        sel.order.push_back(best);
        apply(sets[best], covered, sel.covered);
    }
    return sel;
}

}  // namespace parallel

}  // namespace confmap
