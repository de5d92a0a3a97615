// Serial vs OpenMP timings for the visibility and greedy-cover kernels on a
// world file (fig2-like fixture by default). Results of both paths are
// compared before any timing is reported.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "confmap/kernels.hpp"
#include "confmap/semantic_map.hpp"

using namespace confmap;

namespace {

double best_ms(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark serial and parallel kernels"};
    std::string world_path = std::string(CONFMAP_FIXTURES) + "/fig2_like.world";
    int reps = 5;
    double range = 3.0;
    app.add_option("--world", world_path, "world file");
    app.add_option("--reps", reps, "repetitions per measurement (best is reported)")->check(CLI::PositiveNumber);
    app.add_option("--range", range, "sensor range in meters")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        const GridWorld world = load_world(world_path);
        const auto poses = lattice_schedule(world, 2.0 * world.resolution, kTwoPi, range);
        std::printf("world %dx%d, %zu viewpoints, range %.2f m, %d threads\n", world.width, world.height, poses.size(),
                    range, kernel_threads());

        std::vector<std::vector<CellIndex>> a, b;
        const double vs_s = best_ms(reps, [&] { a = serial::visible_sets(world, poses); });
        const double vs_p = best_ms(reps, [&] { b = parallel::visible_sets(world, poses); });
        if (a != b) {
            std::fprintf(stderr, "visible_sets: serial and parallel results differ\n");
            return 1;
        }
        row("visible_sets", vs_s, vs_p);

        // Cover every free cell with the sets just computed.
        std::vector<int> element(world.cell_count(), -1);
        int n = 0;
        for (CellIndex c : world.free_cells()) element[static_cast<std::size_t>(c)] = n++;
        std::vector<std::vector<int>> sets;
        for (const auto& s : a) {
            std::vector<int> e;
            for (CellIndex c : s) e.push_back(element[static_cast<std::size_t>(c)]);
            sets.push_back(std::move(e));
        }
        const auto universe = static_cast<std::size_t>(n);
        GreedySelection gs, gp;
        const double gc_s = best_ms(reps, [&] { gs = serial::greedy_cover(sets, universe, universe); });
        const double gc_p = best_ms(reps, [&] { gp = parallel::greedy_cover(sets, universe, universe); });
        if (gs.order != gp.order || gs.covered != gp.covered) {
            std::fprintf(stderr, "greedy_cover: serial and parallel results differ\n");
            return 1;
        }
        row("greedy_cover", gc_s, gc_p);
        std::printf("greedy picked %zu of %zu sets, covering %zu cells\n", gs.order.size(), sets.size(), gs.covered);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
