#include <doctest.h>

#include <numeric>

#include "hfbi/bursts.hpp"
#include "hfbi/errors.hpp"
#include "hfbi/rng.hpp"
#include "test_util.hpp"

using namespace hfbi;

using Spans = std::vector<std::pair<std::size_t, std::size_t>>;

TEST_SUITE("bursts") {

TEST_CASE("burst spans cover the hand examples") {
    CHECK(burst_spans({1, 2, 3, 50, 51, 90}, 8) == Spans{{0, 2}, {3, 4}});
    CHECK(burst_spans({0, 10, 20, 30}, 8) == Spans{});
    CHECK(burst_spans({0, 1}, 2) == Spans{{0, 1}});
    CHECK(burst_spans({}, 5) == Spans{});
    CHECK(burst_spans({42}, 5) == Spans{});
}

TEST_CASE("a gap equal to delta breaks the burst") {
    CHECK(burst_spans({0, 8, 16}, 8) == Spans{});       // gaps of exactly delta never join
    CHECK(burst_spans({0, 7, 15}, 8) == Spans{{0, 1}});  // 7 joins, 8 splits
    CHECK(burst_spans({0, 1, 2}, 2) == Spans{{0, 2}});
    CHECK(burst_spans({0, 2, 4}, 2) == Spans{});
}

TEST_CASE("burst spans validate their inputs") {
    CHECK_THROWS_AS(burst_spans({0, 1}, 1), ValidationError);
    CHECK_THROWS_AS(burst_spans({0, 1}, 0), ValidationError);
    CHECK_THROWS_AS(burst_spans({1, 1}, 3), ValidationError);
    CHECK_THROWS_AS(burst_spans({2, 1}, 3), ValidationError);
}

TEST_CASE("burst spans match a brute-force oracle on random sequences") {
    Rng rng(8675309);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_below(26));
        std::vector<std::int64_t> values(n);
        std::int64_t v = static_cast<std::int64_t>(rng.uniform_below(5));
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = v;
            v += 1 + static_cast<std::int64_t>(rng.uniform_below(12));
        }
        for (std::int64_t delta : {std::int64_t{2}, std::int64_t{3}, std::int64_t{8}}) {
            CAPTURE(rep);
            CAPTURE(delta);
            CHECK(burst_spans(values, delta) == test_util::oracle_burst_spans(values, delta));
        }
    }
}

TEST_CASE("detect_bursts records the first incentive position per burst") {
    // users 7 and 9 jointly cover activities 0..14; incentives at 9 and 12
    const auto log = test_util::make_log(
        {{7, {0, 1, 2, 9, 10, 14}}, {9, {3, 4, 5, 6, 7, 8, 11, 12, 13}}}, {9, 12});
    const auto bursts = detect_bursts(log, {7, 9}, 3);
    REQUIRE(bursts.size() == 4);

    CHECK(bursts[0].user_id == 7);
    CHECK(bursts[0].activity_ids == std::vector<std::int64_t>{0, 1, 2});
    CHECK(bursts[0].first_incentive_position == -1);

    CHECK(bursts[1].user_id == 7);
    CHECK(bursts[1].activity_ids == std::vector<std::int64_t>{9, 10});
    CHECK(bursts[1].first_incentive_position == 0);

    CHECK(bursts[2].user_id == 9);
    CHECK(bursts[2].activity_ids == std::vector<std::int64_t>{3, 4, 5, 6, 7, 8});
    CHECK(bursts[2].first_incentive_position == -1);

    CHECK(bursts[3].user_id == 9);
    CHECK(bursts[3].activity_ids == std::vector<std::int64_t>{11, 12, 13});
    CHECK(bursts[3].first_incentive_position == 1);

    const auto table = burst_table(bursts, 3);
    CHECK(table.delta == 3);
    CHECK(table.total_bursts == 4);
    CHECK(table.count_by_position.at(-1) == 2);
    CHECK(table.count_by_position.at(0) == 1);
    CHECK(table.count_by_position.at(1) == 1);
    CHECK(table.share_first == 0.25);
    CHECK(table.share_two == 0.5);
    CHECK(table.share_three == 0.5);

    const auto empty = burst_table({}, 8);
    CHECK(empty.total_bursts == 0);
    CHECK(empty.share_first == 0.0);
    CHECK(empty.count_by_position.empty());
}

TEST_CASE("loyal_users applies a strict attendance cutoff") {
    const auto log =
        test_util::make_log({{3, {0, 1, 2}}, {1, {0, 1}}, {5, {0, 1, 2, 3}}, {2, {0}}});
    CHECK(loyal_users(log, 2) == std::vector<std::int64_t>{3, 5});  // strictly more than 2
    CHECK(loyal_users(log, 3) == std::vector<std::int64_t>{5});
    CHECK(loyal_users(log, 0) == std::vector<std::int64_t>{1, 2, 3, 5});  // ascending ids
    CHECK(loyal_users(log, 100).empty());
    CHECK_THROWS_AS(loyal_users(log, -1), ValidationError);
}

TEST_CASE("fit_intervals fits heavy-tailed gap users and skips unfittable ones") {
    // user 4: gaps drawn from a discrete power law; user 8: a rigid ladder
    PowerLawSampler gaps(2.5, 1);
    Rng rng(2025);
    std::vector<std::int64_t> acts_heavy;
    std::int64_t t = 0;
    for (int i = 0; i < 400; ++i) {
        t += gaps(rng);
        acts_heavy.push_back(t);
    }
    std::vector<std::int64_t> acts_ladder(16);
    std::iota(acts_ladder.begin(), acts_ladder.end(), 0);
    for (auto& a : acts_ladder) a *= 10;

    // a background user covers every activity id so the log is contiguous
    std::vector<std::int64_t> all_acts(static_cast<std::size_t>(acts_heavy.back()) + 1);
    std::iota(all_acts.begin(), all_acts.end(), 0);
    const auto log = test_util::make_log({{4, acts_heavy}, {8, acts_ladder}, {1000, all_acts}});

    SelectXminOptions opts;
    opts.n_boot = 150;
    opts.seed = 31;
    const auto fits = fit_intervals(log, {4, 8}, opts);
    REQUIRE(fits.size() == 1);
    CHECK(fits[0].user_id == 4);
    CHECK(fits[0].fit.gamma == doctest::Approx(2.5).epsilon(0.14));
    CHECK(fits[0].fit.n_tail >= opts.min_tail);
}

TEST_CASE("burst_baseline is the incentive share of all activities") {
    const auto half = test_util::make_log({{0, {0, 1, 2, 3}}}, {1, 3});
    CHECK(burst_baseline(half) == 0.5);
    const auto none = test_util::make_log({{0, {0, 1, 2, 3}}});
    CHECK(burst_baseline(none) == 0.0);
}

}  // TEST_SUITE
