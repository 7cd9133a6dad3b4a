#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ossrisk/intervention.hpp"
#include "support.hpp"

using namespace ossrisk;

namespace {

EcosystemModel chain_model() {
    // D -> C -> B -> A, plus E standing alone; older libraries have more stars
    return build_model(testing::SnapshotBuilder{}
                           .library("A", 10, 50, "2010-01-01")
                           .library("B", 40, 20, "2012-01-01")
                           .library("C", 40, 30, "2011-01-01")
                           .library("D", 5, 20, "2014-01-01")
                           .library("E", 99, 0, "2013-01-01")
                           .edge("B", "A")
                           .edge("C", "B")
                           .edge("D", "C")
                           .commits("x", "A", 2)
                           .commits("y", "C", 3)
                           .build());
}

} // namespace

TEST_CASE("strategy names") {
    for (std::string name : {"transitive", "downloads", "age", "stars", "random", "rts"})
        CHECK(RankingStrategy::from_name(name).name() == name);
    CHECK_THROWS_AS(RankingStrategy::from_name("vibes"), std::invalid_argument);
}

TEST_CASE("rankings order by their metric with id tie-breaks") {
    auto m = chain_model();
    RankingStrategy s;
    s.kind = RankingStrategy::Kind::transitive_dependents;
    CHECK(rank_libraries(m, s) == std::vector<std::string>{"A", "B", "C", "D", "E"});
    s.transitive_direction = DependencyDirection::upstream;
    CHECK(rank_libraries(m, s) == std::vector<std::string>{"D", "C", "B", "A", "E"});

    s.kind = RankingStrategy::Kind::downloads;
    CHECK(rank_libraries(m, s) == std::vector<std::string>{"E", "B", "C", "A", "D"});
    s.kind = RankingStrategy::Kind::stars;
    CHECK(rank_libraries(m, s) == std::vector<std::string>{"A", "C", "B", "D", "E"});
    s.kind = RankingStrategy::Kind::age;
    CHECK(rank_libraries(m, s) == std::vector<std::string>{"A", "C", "B", "E", "D"});

    s.kind = RankingStrategy::Kind::risk_transmission;
    CHECK_THROWS_AS(rank_libraries(m, s), std::invalid_argument);
    RtsTable rts;
    rts.scores = {{"C", 0.5}, {"D", 0.5}, {"A", 0.9}};
    CHECK(rank_libraries(m, s, &rts) == std::vector<std::string>{"A", "C", "D", "B", "E"});
}

TEST_CASE("seeded permutations are reproducible permutations") {
    for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 123456789ULL}) {
        auto p = seeded_permutation(50, seed);
        CHECK(p == seeded_permutation(50, seed));
        auto sorted = p;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
    }
    CHECK(seeded_permutation(50, 1) != seeded_permutation(50, 2));
    CHECK(seeded_permutation(0, 3).empty());
    CHECK(seeded_permutation(1, 3) == std::vector<std::size_t>{0});

    auto m = chain_model();
    auto r = RankingStrategy::from_name("random", 7);
    CHECK(rank_libraries(m, r) == rank_libraries(m, r));
}

TEST_CASE("surplus vector") {
    auto m = build_model(testing::SnapshotBuilder{}
                             .library("A")
                             .library("B")
                             .library("C")
                             .commits("x", "A", 10)
                             .commits("y", "B", 400)
                             .build());
    auto x = build_surplus(m, {"A", "B", "C"}, 260.0);
    CHECK(x.values == std::vector<double>{26.0, 0.65, 1.0});
    CHECK(build_surplus(m, {}, 260.0).empty());
    CHECK_THROWS_AS(build_surplus(m, {"Z"}, 260.0), std::out_of_range);
    CHECK_THROWS_AS(build_surplus(m, {"A"}, 0.0), std::invalid_argument);
    CHECK(InterventionConfig::developer_commits_for_window(365.0) == doctest::Approx(260.714285714).epsilon(1e-9));
}

TEST_CASE("config validation") {
    InterventionConfig c;
    c.k_values = {1, 2, 4};
    CHECK_NOTHROW(c.validate(4));
    CHECK_THROWS_AS(c.validate(3), std::invalid_argument);
    c.k_values = {2, 2};
    CHECK_THROWS_AS(c.validate(4), std::invalid_argument);
    c.k_values = {0, 1};
    CHECK_THROWS_AS(c.validate(4), std::invalid_argument);
    c.k_values = {1};
    c.developer_commits = -1.0;
    CHECK_THROWS_AS(c.validate(4), std::invalid_argument);
}

TEST_CASE("toy: allocating to the root changes nothing, allocating to its dependents helps") {
    auto m = build_model(testing::toy_snapshot());
    RiskSettings settings;
    const double e = InterventionConfig{}.developer_commits;
    const double baseline = all_contributor_impacts(m, settings).global;

    // lib1 has no upstreams, so extra upstream health cannot matter
    auto root = build_surplus(m, {"lib1"}, e);
    CHECK(all_contributor_impacts(m, settings, root).global == baseline);

    auto mid = build_surplus(m, {"lib2", "lib4"}, e);
    const double g = all_contributor_impacts(m, settings, mid).global;
    CHECK(g < baseline);
    // c2 now only takes lib1, a quarter of lib2 and, through lib2, part of lib3
    const double lib2 = std::sqrt(0.75);
    const double lib3 = std::sqrt(1.0 - 0.5 * (1.0 - lib2));
    const double c2 = (1.0 + (1.0 - lib2) + (1.0 - lib3)) / 4.0;
    const double c1 = (1.0 - std::sqrt(0.5) + 1.0 - std::sqrt(1.0 - 0.5 * (1.0 - std::sqrt(0.5)))) / 4.0;
    const double c3 = (1.0 - lib2 + 2.0) / 4.0;
    CHECK(g == doctest::Approx(c1 + c2 + c3).epsilon(1e-12));
}

TEST_CASE("property: sweeps are non-increasing and match full recomputation") {
    std::mt19937_64 rng(2718);
    RiskSettings settings;
    for (int trial = 0; trial < 60; ++trial) {
        auto m = build_model(testing::random_snapshot(rng, 12, 8));
        const auto n = m.libraries.size();
        InterventionConfig config;
        for (std::size_t k = 1; k <= n; ++k) config.k_values.push_back(k);
        const double baseline = all_contributor_impacts(m, settings).global;
        INFO("trial " << trial);
        for (std::string name : {"transitive", "downloads", "age", "stars", "random", "rts"}) {
            auto strategy = RankingStrategy::from_name(name, 11);
            auto curve = intervention_sweep(m, strategy, config, settings);
            CHECK(curve.strategy == name);
            CHECK(std::abs(curve.baseline - baseline) <= 1e-12);
            double previous = curve.baseline;
            for (const auto& [k, g] : curve.points) {
                CHECK(g <= previous + 1e-9);
                previous = g;
            }
            // the last point allocates everywhere: same set for every strategy
            if (!curve.points.empty() && name == "age") {
                std::vector<std::string> all(m.libraries.ids());
                const double full = all_contributor_impacts(m, settings, build_surplus(m, all, config.developer_commits)).global;
                CHECK(std::abs(curve.points.back().second - full) <= 1e-12);
            }
        }
    }
}

TEST_CASE("sweep points equal independent recomputation of G") {
    std::mt19937_64 rng(161);
    RiskSettings settings;
    for (int trial = 0; trial < 40; ++trial) {
        auto m = build_model(testing::random_snapshot(rng, 12, 8));
        InterventionConfig config;
        config.k_values = {1};
        if (m.libraries.size() >= 3) config.k_values.push_back(3);
        auto strategy = RankingStrategy::from_name("downloads");
        auto curve = intervention_sweep(m, strategy, config, settings);
        auto ranking = rank_libraries(m, strategy);
        for (const auto& [k, g] : curve.points) {
            std::vector<std::string> top(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
            auto x = build_surplus(m, top, config.developer_commits);
            CHECK(std::abs(g - all_contributor_impacts(m, settings, x).global) <= 1e-12);
        }
    }
}

TEST_CASE("cumulative reduction") {
    InterventionCurve curve{"test", 10.0, {{1, 8.0}, {2, 6.0}, {4, 6.0}}};
    CHECK(cumulative_reduction(curve, 1) == doctest::Approx(0.2));
    CHECK(cumulative_reduction(curve, 2) == doctest::Approx(0.3));
    CHECK(cumulative_reduction(curve, 3) == doctest::Approx(0.35));
    CHECK(cumulative_reduction(curve, 4) == doctest::Approx(11.0 / 30.0));
    CHECK_THROWS_AS(cumulative_reduction(curve, 0), std::invalid_argument);
    CHECK_THROWS_AS(cumulative_reduction(curve, 5), std::invalid_argument);

    InterventionCurve flat{"test", 0.0, {{1, 0.0}, {2, 0.0}}};
    CHECK(cumulative_reduction(flat, 2) == 0.0);
    CHECK_THROWS_AS(cumulative_reduction(InterventionCurve{}, 1), std::invalid_argument);
}
