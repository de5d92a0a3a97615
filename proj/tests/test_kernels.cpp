#include <random>

#include "confmap/kernels.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace confmap;
using namespace testsupport;

TEST_CASE("visible sets agree between serial and parallel") {
    GridWorld w = load_world(fixture("fig2_like.world"));
    std::mt19937_64 rng(21);
    auto free = w.free_cells();
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    std::vector<Viewpoint> vps;
    for (int i = 0; i < 200; ++i) {
        const GridCoord g = w.coord(free[pick(rng)]);
        vps.push_back(center_pose(w, g.col, g.row, ang(rng), i % 3 ? kTwoPi : 2.0, 1.0 + (i % 4)));
    }
    auto a = serial::visible_sets(w, vps);
    auto b = parallel::visible_sets(w, vps);
    CHECK(a == b);
    for (std::size_t i = 0; i < vps.size(); ++i) CHECK(a[i] == visible_cells(w, vps[i]));
}

TEST_CASE("greedy cover agrees between serial and parallel") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const std::size_t universe = 20 + rng() % 200;
        std::vector<std::vector<int>> sets(5 + rng() % 60);
        for (auto& s : sets) {
            for (std::size_t e = 0; e < universe; ++e)
                if (rng() % 7 == 0) s.push_back(static_cast<int>(e));
        }
        const std::size_t target = rng() % (universe + 1);
        auto a = serial::greedy_cover(sets, universe, target);
        auto b = parallel::greedy_cover(sets, universe, target);
        CHECK(a.order == b.order);
        CHECK(a.covered == b.covered);
    }
}

TEST_CASE("greedy cover basics") {
    std::vector<std::vector<int>> sets{{0, 1}, {2, 3, 4}, {0, 1, 2}, {5}};
    auto g = serial::greedy_cover(sets, 6, 6);
    CHECK(g.order == std::vector<std::size_t>{1, 0, 3});
    CHECK(g.covered == 6);
    // ties go to the lowest index
    std::vector<std::vector<int>> ties{{0}, {1}, {0}};
    CHECK(serial::greedy_cover(ties, 3, 3).order == std::vector<std::size_t>{0, 1});
    CHECK(serial::greedy_cover(ties, 3, 3).covered == 2);
    CHECK(serial::greedy_cover(sets, 6, 0).order.empty());
    CHECK(kernel_threads() >= 1);
}
