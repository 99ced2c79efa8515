#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "groupform/experiments.hpp"

using namespace groupform;

TEST_CASE("generated scenarios have m agents per category") {
    ScenarioParams p;
    p.seed = 4;
    const auto s = generate_scenario(p);
    REQUIRE(s.size() == 15);
    CHECK(s.k() == 3);
    for (const auto& a : s.agents()) {
        CHECK(a.category.index == a.id / 5);
        CHECK(a.position.x >= 0.0);
        CHECK(a.position.x <= p.x_max);
        CHECK(a.position.y >= 0.0);
        CHECK(a.position.y <= p.y_max);
        CHECK(a.resource >= 1.0);
        CHECK(a.resource <= p.r_max);
    }
}

TEST_CASE("r_max of one pins every resource") {
    ScenarioParams p;
    p.r_max = 1.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        p.seed = seed;
        for (const auto& a : generate_scenario(p).agents()) CHECK(a.resource == 1.0);
    }
}

TEST_CASE("integer resources stay on the integer grid") {
    ScenarioParams p;
    p.integer_resources = true;
    p.r_max = 4.7;
    std::set<double> seen;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        p.seed = seed;
        for (const auto& a : generate_scenario(p).agents()) {
            CHECK(a.resource == std::floor(a.resource));
            seen.insert(a.resource);
        }
    }
    CHECK(seen == std::set<double>{1, 2, 3, 4});
}

TEST_CASE("generation is a function of the seed") {
    ScenarioParams p;
    p.seed = 11;
    CHECK(generate_scenario(p) == generate_scenario(p));
    auto q = p;
    q.seed = 12;
    CHECK_FALSE(generate_scenario(p) == generate_scenario(q));
}

TEST_CASE("invalid generator parameters") {
    ScenarioParams p;
    p.r_max = 0.5;
    CHECK_THROWS_AS(generate_scenario(p), ParameterError);
    p = {};
    p.m = 0;
    CHECK_THROWS_AS(generate_scenario(p), ParameterError);
    p = {};
    p.x_max = -1;
    CHECK_THROWS_AS(generate_scenario(p), ParameterError);
    p = {};
    p.k = 0;
    CHECK_THROWS(generate_scenario(p));
}

TEST_CASE("equilibrium metrics on extreme partitions") {
    ScenarioParams p;
    const auto s = generate_scenario(p);

    const auto singles = equilibrium_metrics(Partition::singletons(15), s);
    CHECK(singles.num_groups == 15);
    CHECK(singles.mean_group_size == 1.0);
    CHECK(singles.mean_sectors_per_group == 1.0);

    std::vector<AgentId> all(15);
    for (AgentId i = 0; i < 15; ++i) all[i] = i;
    const auto grand = equilibrium_metrics(Partition::from_groups({all}, 15), s);
    CHECK(grand.num_groups == 1);
    CHECK(grand.mean_group_size == 15.0);
    CHECK(grand.mean_sectors_per_group == 3.0);

    // Groups of sizes 3, 2, 2, 2 covering 3, 2, 2 and 2 categories.
    const Scenario nine(3, [] {
        std::vector<Agent> v;
        for (AgentId i = 0; i < 9; ++i) v.push_back({i, Category{i / 3}, 1.0, {0, 0}});
        return v;
    }());
    const auto mixed = equilibrium_metrics(
        Partition::from_groups({{0, 3, 6}, {1, 7}, {2, 5}, {4, 8}}, 9), nine);
    CHECK(mixed.num_groups == 4);
    CHECK(mixed.mean_group_size == 2.25);
    CHECK(mixed.mean_sectors_per_group == 2.25);
}

TEST_CASE("metrics identities over sweep runs") {
    SweepParams sp;
    sp.x_max_list = {1, 20};
    sp.r_max_list = {1, 60};
    sp.replications = 10;
    std::mutex mu;
    std::size_t runs = 0;
    run_sweep(sp, [&](const RunRecord& r) {
        const auto m = equilibrium_metrics(r.trace, r.scenario);
        std::size_t largest = 0;
        for (const auto& g : r.trace.final_partition.canonical())
            largest = std::max(largest, g.size());
        std::lock_guard lock(mu);
        ++runs;
        CHECK(static_cast<double>(m.num_groups) * m.mean_group_size ==
              doctest::Approx(static_cast<double>(r.scenario.size())));
        CHECK(m.mean_sectors_per_group >= 1.0);
        CHECK(m.mean_sectors_per_group <= static_cast<double>(std::min<std::size_t>(3, largest)));
        CHECK(m.mean_sectors_per_group <= m.mean_group_size + 1e-12);
    });
    CHECK(runs == 40);
}

TEST_CASE("one-cell sweep matches hand aggregation") {
    SweepParams sp;
    sp.x_max_list = {5};
    sp.r_max_list = {30};
    sp.replications = 3;
    sp.base_seed = 17;
    std::mutex mu;
    std::vector<std::pair<std::size_t, EquilibriumMetrics>> got;
    const auto res = run_sweep(sp, [&](const RunRecord& r) {
        CHECK(r.seed == cell_seed(17, 0, 0, r.rep));
        std::lock_guard lock(mu);
        got.emplace_back(r.rep, equilibrium_metrics(r.trace, r.scenario));
    });
    REQUIRE(got.size() == 3);
    std::sort(got.begin(), got.end(), [](auto& a, auto& b) { return a.first < b.first; });

    double sum = 0, sum_size = 0;
    for (const auto& [rep, m] : got) {
        sum += static_cast<double>(m.num_groups);
        sum_size += m.mean_group_size;
    }
    const double mean = sum / 3;
    double ss = 0;
    for (const auto& [rep, m] : got) ss += std::pow(static_cast<double>(m.num_groups) - mean, 2);

    const auto& c = res.cell(0, 0);
    CHECK(c.replications == 3);
    CHECK(c.x_max == 5);
    CHECK(c.r_max == 30);
    CHECK(c.num_groups.mean == doctest::Approx(mean));
    CHECK(c.num_groups.std == doctest::Approx(std::sqrt(ss / 2)));
    CHECK(c.mean_group_size.mean == doctest::Approx(sum_size / 3));
    CHECK(c.failures == 0);
}

TEST_CASE("sweep results do not depend on the thread count") {
    SweepParams sp;
    sp.x_max_list = {1, 10, 40};
    sp.r_max_list = {1, 50};
    sp.replications = 12;
    sp.threads = 1;
    const auto one = run_sweep(sp);
    sp.threads = 4;
    const auto four = run_sweep(sp);
    CHECK(one.cells == four.cells);
}

TEST_CASE("cell seeds are distinct across the grid") {
    std::set<std::uint64_t> seeds;
    for (std::size_t xi = 0; xi < 7; ++xi)
        for (std::size_t ri = 0; ri < 6; ++ri)
            for (std::size_t rep = 0; rep < 50; ++rep) seeds.insert(cell_seed(0, xi, ri, rep));
    CHECK(seeds.size() == 7 * 6 * 50);
    CHECK(cell_seed(0, 1, 2, 3) != cell_seed(1, 1, 2, 3));
}

TEST_CASE("default attempt budget") {
    CHECK(default_max_iterations(15) == 2400);
    CHECK(default_max_iterations(1) == 20);
}

TEST_CASE("spearman rank correlation") {
    CHECK(*spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(*spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(*spearman({1, 2, 3}, {1, 8, 27}) == doctest::Approx(1.0));
    // Average ranks for ties.
    CHECK(*spearman({1, 2, 2, 3}, {1, 3, 2, 4}) == doctest::Approx(0.9486832980505138));
    CHECK_FALSE(spearman({1, 1, 1}, {1, 2, 3}));
    CHECK_FALSE(spearman({1}, {1}));
    CHECK_THROWS(spearman({1, 2}, {1, 2, 3}));
}

TEST_CASE("trend checks on a synthetic monotone grid") {
    SweepResult r;
    r.params.x_max_list = {1, 2, 3};
    r.params.r_max_list = {1, 2};
    for (std::size_t xi = 0; xi < 3; ++xi) {
        for (std::size_t ri = 0; ri < 2; ++ri) {
            SweepCell c;
            c.x_max = r.params.x_max_list[xi];
            c.r_max = r.params.r_max_list[ri];
            c.mean_group_size.mean = 1.0 + static_cast<double>(ri) + 0.1 * static_cast<double>(xi);
            c.num_groups.mean = 1.0 + static_cast<double>(xi);
            c.mean_sectors_per_group.mean = c.mean_group_size.mean / 2;
            r.cells.push_back(c);
        }
    }
    const auto t = trend_checks(r);
    REQUIRE(t.size_vs_resource_range.size() == 3);
    for (const auto& s : t.size_vs_resource_range) CHECK(*s.correlation == doctest::Approx(1.0));
    REQUIRE(t.groups_vs_location_range.size() == 2);
    for (const auto& s : t.groups_vs_location_range) CHECK(*s.correlation == doctest::Approx(1.0));
    CHECK(*t.sectors_vs_size.correlation == doctest::Approx(1.0));

    SweepResult single;
    single.params.x_max_list = {1};
    single.params.r_max_list = {1};
    single.cells.resize(1);
    const auto u = trend_checks(single);
    CHECK_FALSE(u.size_vs_resource_range[0].correlation);
    CHECK_FALSE(u.groups_vs_location_range[0].correlation);
    CHECK_FALSE(u.sectors_vs_size.correlation);
}
