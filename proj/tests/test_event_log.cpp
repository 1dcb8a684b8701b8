#include <doctest.h>

#include <sstream>

#include "hfbi/errors.hpp"
#include "hfbi/event_log.hpp"
#include "test_util.hpp"

using namespace hfbi;
using test_util::make_log;

TEST_SUITE("event_log") {

TEST_CASE("from_records sorts, indexes and validates") {
    std::vector<ParticipationRecord> recs{
        {7, 1, std::nullopt, true},
        {3, 0, 42, false},
        {7, 0, std::nullopt, false},
        {3, 1, std::nullopt, true},
        {5, 2, std::nullopt, false},
    };
    const auto log = ActivityLog::from_records(recs);

    CHECK(log.record_count() == 5);
    CHECK(log.activity_count() == 3);
    CHECK(log.user_count() == 3);
    CHECK(log.user_ids() == std::vector<std::int64_t>{3, 5, 7});

    // records come back sorted by (activity, participant)
    CHECK(log.records().front() == ParticipationRecord{3, 0, 42, false});
    CHECK(log.records().back() == ParticipationRecord{5, 2, std::nullopt, false});

    CHECK(log.attendances(7) == std::vector<std::int64_t>{0, 1});
    CHECK(log.attendances(5) == std::vector<std::int64_t>{2});
    CHECK_THROWS_AS(log.attendances(99), ValidationError);

    CHECK(log.is_incentive(1));
    CHECK_FALSE(log.is_incentive(0));
    CHECK_THROWS_AS(log.is_incentive(3), ValidationError);
    CHECK(log.incentive_activities() == std::vector<std::int64_t>{1});
    CHECK(log.incentive_count() == 1);
}

TEST_CASE("from_records rejects malformed logs") {
    CHECK_THROWS_AS(ActivityLog::from_records({}), ValidationError);
    // duplicate attendance
    CHECK_THROWS_AS(ActivityLog::from_records({{1, 0, std::nullopt, false},
                                               {1, 0, std::nullopt, false}}),
                    ValidationError);
    // hole in activity ids (no activity 1)
    CHECK_THROWS_AS(ActivityLog::from_records({{1, 0, std::nullopt, false},
                                               {1, 2, std::nullopt, false}}),
                    ValidationError);
    // conflicting incentive flags within one activity
    CHECK_THROWS_AS(ActivityLog::from_records({{1, 0, std::nullopt, true},
                                               {2, 0, std::nullopt, false}}),
                    ValidationError);
    // negative ids
    CHECK_THROWS_AS(ActivityLog::from_records({{-1, 0, std::nullopt, false}}),
                    ValidationError);
    CHECK_THROWS_AS(ActivityLog::from_records({{1, -2, std::nullopt, false}}),
                    ValidationError);
}

TEST_CASE("csv round trip preserves the log") {
    const auto log = make_log({{0, {0, 1, 3}}, {1, {1, 2}}, {9, {0, 2, 3}}}, {1, 3});
    std::ostringstream out;
    write_csv(log, out);

    std::istringstream in(out.str());
    const auto back = parse_csv(in, "roundtrip");
    CHECK(back.records() == log.records());

    std::ostringstream out2;
    write_csv(back, out2);
    CHECK(out2.str() == out.str());
}

TEST_CASE("csv parser accepts team ids, blank teams and both bool forms") {
    std::istringstream in(
        "participant_id,activity_id,team_id,incentive\n"
        "1,0,5,true\n"
        "2,0,,1\n"
        "1,1,5,false\n"
        "2,1,,0\n");
    const auto log = parse_csv(in, "mem");
    CHECK(log.record_count() == 4);
    CHECK(log.records()[0].team_id == 5);
    CHECK_FALSE(log.records()[1].team_id.has_value());
    CHECK(log.is_incentive(0));
    CHECK_FALSE(log.is_incentive(1));
}

TEST_CASE("csv parser reports the offending line") {
    auto expect_parse_error = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            parse_csv(in, "bad");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_parse_error("", "empty input");
    expect_parse_error("wrong,header\n1,0,,0\n", "expected header");
    expect_parse_error("participant_id,activity_id,team_id,incentive\n", "no data rows");
    expect_parse_error("participant_id,activity_id,team_id,incentive\n1,0,0\n", "bad:2");
    expect_parse_error("participant_id,activity_id,team_id,incentive\n1,0,,0\nx,1,,0\n",
                       "bad:3");
    expect_parse_error("participant_id,activity_id,team_id,incentive\n1,0,,maybe\n",
                       "incentive");
    // structural problems surface as ParseError with the source name
    expect_parse_error("participant_id,activity_id,team_id,incentive\n1,0,,0\n1,0,,0\n",
                       "duplicate");
}

TEST_CASE("frequency_sequence counts attendances, optionally over a prefix") {
    const auto log = make_log({{0, {0, 1, 2, 3}}, {1, {1, 3}}, {2, {2}}, {3, {3}}});
    CHECK(frequency_sequence(log) == FrequencySequence{4, 2, 1, 1});
    // users absent from the prefix are dropped, not zero-padded
    CHECK(frequency_sequence(log, 1) == FrequencySequence{2, 1});
    CHECK(frequency_sequence(log, 0) == FrequencySequence{1});
    CHECK_THROWS_AS(frequency_sequence(log, 4), ValidationError);
    CHECK_THROWS_AS(frequency_sequence(log, -1), ValidationError);
}

TEST_CASE("interval_sequence takes first differences") {
    const auto log = make_log({{0, {0, 1, 4, 9}}, {1, {2, 6, 7}}, {2, {3, 5, 8}}, {3, {2}}});
    const auto seq = interval_sequence(log, 0);
    CHECK(seq.user_id == 0);
    CHECK(seq.intervals == std::vector<std::int64_t>{1, 3, 5});
    CHECK(interval_sequence(log, 2).intervals == std::vector<std::int64_t>{2, 3});
    CHECK_THROWS_AS(interval_sequence(log, 3), ValidationError);
}

TEST_CASE("prefix restricts to early activities") {
    const auto log = make_log({{0, {0, 1, 2}}, {1, {1}}, {2, {2}}});
    const auto cut = prefix(log, 1);
    CHECK(cut.activity_count() == 2);
    CHECK(cut.user_count() == 2);
    CHECK(cut.attendances(0) == std::vector<std::int64_t>{0, 1});
    CHECK_THROWS_AS(prefix(log, 3), ValidationError);
    CHECK_THROWS_AS(prefix(log, -1), ValidationError);
}

TEST_CASE("users_reaching finds the earliest activity with the population") {
    const auto log = make_log({{0, {0, 1, 2, 3}}, {1, {1}}, {2, {2}}, {3, {2}}, {4, {3}}});
    CHECK(users_reaching(log, 1) == 0);
    CHECK(users_reaching(log, 2) == 1);
    CHECK(users_reaching(log, 4) == 2);  // users 2 and 3 both debut at activity 2
    CHECK(users_reaching(log, 5) == 3);
    CHECK_THROWS_AS(users_reaching(log, 6), ValidationError);
    CHECK_THROWS_AS(users_reaching(log, 0), ValidationError);
}

}  // TEST_SUITE
