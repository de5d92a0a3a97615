#include <cmath>
#include <filesystem>
#include <map>
#include <tuple>

#include "confmap/harness.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace confmap;
using namespace testsupport;

namespace {

const std::string kCats = "kitchen,office,corridor,storage";

GridWorld three_zone_world() {
    return make_world({"##########", "#kkk#ooo##", "#kkk#ooo##", "#ccccccc##", "##########"},
                      "k room=a zone=cook category=kitchen\no room=b zone=desk category=office\n"
                      "c room=hall zone=hall category=corridor\n",
                      "", kCats);
}

ObjectLocationPrior four_way_prior() {
    return parse_location_prior(
        "prior mug kitchen 0.6\nprior mug office 0.3\nprior mug corridor 0.07\nprior mug storage 0.03\n",
        CategorySet(split(kCats, ',')));
}

ExperimentConfig small_config() {
    ExperimentConfig c = load_experiment_config(fixture("fig2_like.json"));
    c.repetitions = 3;
    return c;
}

}  // namespace

TEST_CASE("placement follows the prior ranking") {
    GridWorld w = three_zone_world();
    ObjectLocationPrior pri = four_way_prior();
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        GridWorld p1 = place_object_by_rank(w, "mug", pri, 1, rng);
        REQUIRE(p1.objects.size() == 1);
        CHECK(p1.zones[static_cast<std::size_t>(p1.zone_of[static_cast<std::size_t>(p1.index(p1.objects[0].cell))])].name ==
              "cook");
        GridWorld p2 = place_object_by_rank(w, "mug", pri, 2, rng);
        CHECK(p2.zones[static_cast<std::size_t>(p2.zone_of[static_cast<std::size_t>(p2.index(p2.objects[0].cell))])].name ==
              "desk");
        CHECK_NOTHROW(p2.validate());
    }
    CHECK(w.objects.empty());
    try {
        place_object_by_rank(w, "mug", pri, 4, rng);
        FAIL("expected ArgumentError");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("storage") != std::string::npos);
    }
    CHECK_THROWS_AS(place_object_by_rank(w, "mug", pri, 0, rng), ArgumentError);
}

TEST_CASE("summary statistics") {
    auto s = mean_and_stddev({3.0, 5.0});
    CHECK(s.mean == 4.0);
    CHECK(s.stddev == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    auto one = mean_and_stddev({7.5});
    CHECK(one.mean == 7.5);
    CHECK(one.stddev == 0.0);

    RunRecord r;
    r.strategy = MapKind::baseline;
    r.object = "mug";
    r.viewpoints = 4;
    r.covered_area_m2 = 2.5;
    auto rows = summarize({r});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 1);
    CHECK(rows[0].viewpoints.mean == 4.0);
    CHECK(rows[0].covered_area_m2.stddev == 0.0);
}

TEST_CASE("experiment produces one record per condition") {
    ExperimentConfig c = small_config();
    ExperimentSetup setup = load_setup(c);
    std::vector<RunLog> logs;
    auto records = run_experiment(c, setup, &logs);
    REQUIRE(records.size() == 18);
    CHECK(logs.size() == 18);

    // Strategy-major ordering and shared seeds across strategies.
    std::size_t i = 0;
    for (MapKind k : c.strategies)
        for (int rank : c.ranks)
            for (int rep = 0; rep < c.repetitions; ++rep, ++i) {
                CHECK(records[i].strategy == k);
                CHECK(records[i].rank == rank);
                CHECK(records[i].rep == rep);
                CHECK(records[i].seed == derive_seed(c.seed, "backpack", rank, rep));
                CHECK(records[i].seed == records[i % 9].seed);
                CHECK(records[i].found);
            }

    SUBCASE("summary matches a direct recomputation") {
        std::map<std::tuple<int, int>, std::vector<const RunRecord*>> groups;
        for (const auto& r : records) groups[{static_cast<int>(r.strategy), r.rank}].push_back(&r);
        auto rows = summarize(records);
        REQUIRE(rows.size() == 6);
        for (const auto& row : rows) {
            const auto& g = groups[{static_cast<int>(row.strategy), row.rank}];
            REQUIRE(static_cast<int>(g.size()) == row.n);
            double sum = 0.0, sq = 0.0;
            for (auto* r : g) sum += r->covered_area_m2;
            const double mean = sum / static_cast<double>(g.size());
            for (auto* r : g) sq += (r->covered_area_m2 - mean) * (r->covered_area_m2 - mean);
            CHECK(row.covered_area_m2.mean == doctest::Approx(mean).epsilon(1e-12));
            CHECK(row.covered_area_m2.stddev == doctest::Approx(std::sqrt(sq / static_cast<double>(g.size() - 1))).epsilon(1e-12));
            double vsum = 0.0;
            for (auto* r : g) vsum += r->viewpoints;
            CHECK(row.viewpoints.mean == doctest::Approx(vsum / static_cast<double>(g.size())).epsilon(1e-12));
        }
        CHECK(rows[0].strategy == MapKind::baseline);
        CHECK(rows[0].rank == 1);
        CHECK(rows[5].strategy == MapKind::merged);
        CHECK(rows[5].rank == 3);
    }

    SUBCASE("csv round trip") {
        const std::string csv = format_runs_csv(records);
        CHECK(csv.rfind("strategy,object,rank,rep,seed,found,viewpoints,covered_area_m2,path_length_m,regions_visited\n", 0) == 0);
        CHECK(parse_runs_csv(csv) == records);
        CHECK_THROWS_AS(parse_runs_csv("nope\n"), ParseError);
    }

    SUBCASE("byte-identical on repeat") {
        CHECK(format_runs_csv(run_experiment(c, setup)) == format_runs_csv(records));
        CHECK(format_runs_csv(run_experiment(c)) == format_runs_csv(records));
    }
}

TEST_CASE("config parsing") {
    const auto base = std::filesystem::path(CONFMAP_FIXTURES);
    ExperimentConfig c = parse_experiment_config(
        R"({"world": "fig2_like.world", "cooccurrence": "cooccurrence.txt", "priors": "location_priors.txt",
            "appearance": "appearance.txt", "objects": ["backpack"], "ranks": [2], "repetitions": 2,
            "strategies": ["object"], "search": {"fov": 1.5, "range": 2.0}, "detector": {"p_detect": {"backpack": 0.9}}})",
        base);
    CHECK(c.world == base / "fig2_like.world");
    CHECK(c.strategies == std::vector<MapKind>{MapKind::object});
    CHECK(c.search.fov == 1.5);
    CHECK(c.search.range == 2.0);
    CHECK(c.detector.probability("backpack") == 0.9);
    CHECK(c.detector.probability("mug") == 1.0);
    CHECK(c.mapping.spacing == 1.0);
    CHECK_FALSE(c.has_start_pose);

    CHECK_THROWS_AS(parse_experiment_config(R"({"world": "w"})", base), ParseError);
    CHECK_THROWS_AS(parse_experiment_config("{not json", base), ParseError);
    ExperimentConfig bad = c;
    bad.repetitions = 0;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = c;
    bad.ranks.clear();
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("seed derivation separates conditions") {
    CHECK(derive_seed(1, "mug", 1, 0) == derive_seed(1, "mug", 1, 0));
    CHECK(derive_seed(1, "mug", 1, 0) != derive_seed(2, "mug", 1, 0));
    CHECK(derive_seed(1, "mug", 1, 0) != derive_seed(1, "cup", 1, 0));
    CHECK(derive_seed(1, "mug", 1, 0) != derive_seed(1, "mug", 2, 0));
    CHECK(derive_seed(1, "mug", 1, 0) != derive_seed(1, "mug", 1, 1));
    CHECK(mapping_seed(1) != mapping_seed(2));
}

TEST_CASE("start pose defaults to the first free cell") {
    ExperimentConfig c = small_config();
    GridWorld w = three_zone_world();
    c.has_start_pose = false;
    Viewpoint vp = start_pose_for(c, w);
    CHECK(w.cell_at(vp.x, vp.y) == w.free_cells().front());
    c.has_start_pose = true;
    c.search.start_pose = {0.05, 0.05, 0.0, kTwoPi, 3.0};
    CHECK_THROWS_AS(start_pose_for(c, w), ArgumentError);
}

TEST_CASE("mug in the office nook is found sooner on the confusion map") {
    ExperimentConfig c = small_config();
    ExperimentSetup setup = load_setup(c);
    MapSet maps = build_map_set(c, setup);
    SearchParams params = c.search;
    params.start_pose = start_pose_for(c, setup.world);
    const GridWorld& w = setup.world;
    const Zone* office = nullptr;
    for (const auto& z : w.zones)
        if (z.name == "office_nook") office = &z;
    REQUIRE(office != nullptr);

    const SearchPlan merged_plan = plan_search(w, maps.get(MapKind::merged), params);
    const SearchPlan base_plan = plan_search(w, maps.get(MapKind::baseline), params);
    Rng pick(12);
    double merged_total = 0.0, base_total = 0.0;
    for (int t = 0; t < 10; ++t) {
        GridWorld placed = w;
        const CellIndex cell = office->cells[std::uniform_int_distribution<std::size_t>(0, office->cells.size() - 1)(pick)];
        placed.objects.push_back({static_cast<int>(w.objects.size()), "mug", w.coord(cell)});
        Rng a(static_cast<std::uint64_t>(t)), b(static_cast<std::uint64_t>(t));
        auto rm = execute_search(placed, maps.get(MapKind::merged), merged_plan, "mug", setup.priors, params, c.detector, a);
        auto rb = execute_search(placed, maps.get(MapKind::baseline), base_plan, "mug", setup.priors, params, c.detector, b);
        REQUIRE(rm.found);
        REQUIRE(rb.found);
        merged_total += rm.viewpoints_visited;
        base_total += rb.viewpoints_visited;
    }
    CHECK(merged_total < base_total);
}
