#include <filesystem>
#include <numbers>
#include <random>

#include "confmap/world.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace confmap;
using namespace testsupport;

namespace {

const double kPi = std::numbers::pi;

// L-shaped corridor two cells wide; rays around the elbow graze its corner.
const std::vector<std::string> kLCorridor = {
    "############",
    "#aaaaaaaaaa#",
    "#aaaaaaaaaa#",
    "#aa#########",
    "#aa#########",
    "#aa#########",
    "#aa#########",
    "#aa#########",
    "############",
};

}  // namespace

TEST_CASE("one room world has 100 cells and 64 free") {
    GridWorld w = make_world(box_rows(8, 8));
    CHECK(w.cell_count() == 100);
    CHECK(w.free_cell_count() == 64);
    CHECK(w.room_count() == 1);
    CHECK(w.zones.size() == 1);
    CHECK(w.zones[0].cells.size() == 64);
    CHECK(w.objects.empty());
}

TEST_CASE("zone spanning two rooms is rejected by name") {
    std::vector<std::string> rows = {"#####", "#aab#", "#####"};
    std::string legend = "a room=north zone=shared category=kitchen\nb room=south zone=shared category=kitchen\n";
    try {
        make_world(rows, legend);
        FAIL("expected InvariantError");
    } catch (const InvariantError& e) {
        CHECK(std::string(e.what()).find("shared") != std::string::npos);
    }
}

TEST_CASE("object on an occupied cell is rejected") {
    CHECK_THROWS_AS(make_world(box_rows(3, 3), "a room=r zone=z category=kitchen\n", "object mug 0 0\n"), InvariantError);
}

TEST_CASE("malformed files report the line") {
    std::string text = world_text(box_rows(3, 3), "a room=r zone=z category=kitchen\n");
    SUBCASE("unknown legend letter") {
        std::string bad = text;
        bad.replace(bad.find("#aaa#"), 5, "#aqa#");
        CHECK_THROWS_AS(parse_world(bad), ParseError);
    }
    SUBCASE("ragged grid") {
        std::string bad = text;
        bad.replace(bad.find("#aaa#"), 5, "#aa#");
        try {
            parse_world(bad);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 5);
        }
    }
    SUBCASE("unknown category") {
        CHECK_THROWS(make_world(box_rows(3, 3), "a room=r zone=z category=garage\n"));
    }
}

TEST_CASE("fig2-like fixture structure") {
    GridWorld w = load_world(fixture("fig2_like.world"));
    CHECK(w.room_count() == 4);
    CHECK(w.zones.size() == 6);
    int in_living = 0;
    for (const auto& z : w.zones)
        if (w.room_names[static_cast<std::size_t>(z.room_id)] == "living_room") ++in_living;
    CHECK(in_living == 3);
}

TEST_CASE("open 5x5 area is fully visible") {
    GridWorld w = make_world(box_rows(5, 5));
    auto vis = visible_cells(w, center_pose(w, 3, 3, 0.0, kTwoPi, 1.0));
    CHECK(vis.size() == 25);
}

TEST_CASE("wall one cell ahead blocks everything beyond it") {
    // Facing +y from (2,2); the wall row 3 spans the whole quarter sector.
    std::vector<std::string> rows = {
        "#########",
        "#aaaaaaa#",
        "#aaaaaaa#",
        "#a#######",
        "#aaaaaaa#",
        "#aaaaaaa#",
        "#########",
    };
    GridWorld w = make_world(rows);
    auto vis = visible_cells(w, center_pose(w, 2, 2, kPi / 2.0, kPi / 2.0, 5.0));
    for (CellIndex c : vis) CHECK(w.coord(c).row < 3);
    CHECK(vis == visible_oracle(w, center_pose(w, 2, 2, kPi / 2.0, kPi / 2.0, 5.0), sampled_los_vertex));
}

TEST_CASE("diagonal through a vertex is blocked by either side cell") {
    std::vector<std::string> rows = {"#####", "#aaa#", "#a#a#", "#aaa#", "#####"};
    GridWorld w = make_world(rows);
    // (1,1)->(2,2) would be the pillar; (1,1)->(3,3) passes the pillar's center.
    CHECK_FALSE(line_of_sight(w, {1, 1}, {3, 3}));
    // (1,2)->(2,1) grazes the vertex shared with the pillar at (2,2).
    CHECK_FALSE(line_of_sight(w, {1, 2}, {2, 1}));
    CHECK(line_of_sight(w, {1, 1}, {3, 1}));
    CHECK(line_of_sight(w, {1, 1}, {1, 3}));
}

TEST_CASE("L corridor matches the sampled and exact oracles") {
    GridWorld w = make_world(kLCorridor);
    for (CellIndex c : w.free_cells()) {
        const GridCoord g = w.coord(c);
        Viewpoint vp = center_pose(w, g.col, g.row, 0.0, kTwoPi, 2.0);
        auto vis = visible_cells(w, vp);
        CHECK(vis == visible_oracle(w, vp, sampled_los_vertex));
        CHECK(vis == visible_oracle(w, vp, exact_los));
    }
    // Pure point sampling only disagrees on segments through a wall corner.
    for (CellIndex a : w.free_cells())
        for (CellIndex b : w.free_cells())
            if (sampled_los(w, w.coord(a), w.coord(b)) != line_of_sight(w, w.coord(a), w.coord(b)))
                CHECK(grazes_occupied_vertex(w, w.coord(a), w.coord(b)));
}

TEST_CASE("fig2-like fixture matches the exact oracle") {
    GridWorld w = load_world(fixture("fig2_like.world"));
    auto free = w.free_cells();
    for (std::size_t i = 0; i < free.size(); i += 97) {
        const GridCoord g = w.coord(free[i]);
        Viewpoint vp = center_pose(w, g.col, g.row, 0.5, i % 2 ? kTwoPi : 2.0, 3.0);
        REQUIRE(visible_cells(w, vp) == visible_oracle(w, vp, exact_los));
    }
}

TEST_CASE("random worlds match the exact oracle") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        GridWorld w = random_world(rng, 16, 12, 0.2);
        auto free = w.free_cells();
        std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
        std::uniform_real_distribution<double> ang(0.0, kTwoPi);
        for (int k = 0; k < 10; ++k) {
            const GridCoord g = w.coord(free[pick(rng)]);
            Viewpoint vp = center_pose(w, g.col, g.row, ang(rng), k % 2 ? kTwoPi : ang(rng), 0.3 + 0.1 * k);
            REQUIRE(visible_cells(w, vp) == visible_oracle(w, vp, exact_los));
        }
    }
}

TEST_CASE("line of sight is symmetric") {
    std::mt19937_64 rng(11);
    GridWorld w = random_world(rng, 14, 14, 0.25);
    auto free = w.free_cells();
    for (CellIndex a : free)
        for (CellIndex b : free) REQUIRE(line_of_sight(w, w.coord(a), w.coord(b)) == line_of_sight(w, w.coord(b), w.coord(a)));
}

TEST_CASE("visibility is monotone in range and heading-invariant at full fov") {
    GridWorld w = load_world(fixture("fig2_like.world"));
    std::mt19937_64 rng(3);
    auto free = w.free_cells();
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    for (int t = 0; t < 30; ++t) {
        const GridCoord g = w.coord(free[pick(rng)]);
        auto near = visible_cells(w, center_pose(w, g.col, g.row, 1.0, 1.5, 0.8));
        auto far = visible_cells(w, center_pose(w, g.col, g.row, 1.0, 1.5, 1.6));
        CHECK(std::includes(far.begin(), far.end(), near.begin(), near.end()));
        auto h0 = visible_cells(w, center_pose(w, g.col, g.row, 0.0, kTwoPi, 1.2));
        auto h1 = visible_cells(w, center_pose(w, g.col, g.row, 4.0, kTwoPi, 1.2));
        CHECK(h0 == h1);
    }
}

TEST_CASE("visible objects") {
    std::vector<std::string> rows = {"#######", "#aa#aa#", "#aa#aa#", "#aaaaa#", "#######"};
    GridWorld w = make_world(rows, "a room=r zone=z category=kitchen\n",
                             "object mug 1 1\nobject cup 5 1\nobject pan 2 3\n");
    Viewpoint vp = center_pose(w, 1, 1, 0.0, kTwoPi, 5.0);
    auto objs = visible_objects(w, vp);
    REQUIRE(objs.size() == 2);
    CHECK(objs[0].category == "mug");
    CHECK(objs[1].category == "pan");
    CHECK(objs[0].id < objs[1].id);

    // Filter identity against visible_cells on every pose.
    for (CellIndex c : w.free_cells()) {
        const GridCoord g = w.coord(c);
        Viewpoint p = center_pose(w, g.col, g.row, 0.0, kTwoPi, 3.0);
        auto cells = visible_cells(w, p);
        std::vector<int> expect;
        for (const auto& o : w.objects)
            if (std::binary_search(cells.begin(), cells.end(), w.index(o.cell))) expect.push_back(o.id);
        std::vector<int> got;
        for (const auto& o : visible_objects(w, p)) got.push_back(o.id);
        CHECK(got == expect);
    }
}

TEST_CASE("pose cell is always visible") {
    GridWorld w = make_world(box_rows(4, 4));
    Viewpoint vp = center_pose(w, 2, 2, 0.0, 0.1, 0.01);
    auto vis = visible_cells(w, vp);
    REQUIRE(vis.size() == 1);
    CHECK(vis[0] == w.index(2, 2));
}

TEST_CASE("save and load round trip") {
    GridWorld w = load_world(fixture("fig2_like.world"));
    auto path = std::filesystem::temp_directory_path() / "confmap_roundtrip.world";
    save_world(w, path);
    CHECK(load_world(path) == w);
    CHECK(parse_world(format_world(w)) == w);
    std::filesystem::remove(path);
}
