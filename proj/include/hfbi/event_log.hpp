#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hfbi {

// One attendance row: `participant_id` took part in `activity_id`.
// Activities are numbered consecutively from 0 in the order they were held;
// `incentive` marks activities that offered rewards.
struct ParticipationRecord {
    std::int64_t participant_id = 0;
    std::int64_t activity_id = 0;
    std::optional<std::int64_t> team_id;
    bool incentive = false;

    friend bool operator==(const ParticipationRecord&, const ParticipationRecord&) = default;
};

// Participation counts per user, one entry per user with at least one
// attendance in the range considered.
using FrequencySequence = std::vector<std::int64_t>;

// Gaps between one user's consecutive attended activity ids.
struct IntervalSequence {
    std::int64_t user_id = 0;
    std::vector<std::int64_t> intervals;
};

// Validated, immutable participation log. Construction enforces:
//   - activity ids cover 0..max contiguously (every activity has a record)
//   - no duplicate (participant, activity) pair
//   - the incentive flag is consistent within each activity
// Immutable after construction; safe for concurrent reads.
class ActivityLog {
public:
    static ActivityLog from_records(std::vector<ParticipationRecord> records);

    // Rows sorted by (activity_id, participant_id).
    const std::vector<ParticipationRecord>& records() const { return records_; }
    std::int64_t record_count() const { return static_cast<std::int64_t>(records_.size()); }
    std::int64_t activity_count() const { return activity_count_; }

    std::int64_t user_count() const { return static_cast<std::int64_t>(user_ids_.size()); }
    // Distinct participant ids, ascending.
    const std::vector<std::int64_t>& user_ids() const { return user_ids_; }
    bool has_user(std::int64_t user) const { return user_index_.count(user) > 0; }
    // Attended activity ids of one user, ascending. Throws on unknown user.
    const std::vector<std::int64_t>& attendances(std::int64_t user) const;

    bool is_incentive(std::int64_t activity) const;
    // Activity ids flagged incentive, ascending.
    const std::vector<std::int64_t>& incentive_activities() const { return incentive_ids_; }
    std::int64_t incentive_count() const { return static_cast<std::int64_t>(incentive_ids_.size()); }

private:
    ActivityLog() = default;

    std::vector<ParticipationRecord> records_;
    std::int64_t activity_count_ = 0;
    std::vector<std::uint8_t> incentive_flag_;  // by activity id
    std::vector<std::int64_t> incentive_ids_;
    std::vector<std::int64_t> user_ids_;
    std::unordered_map<std::int64_t, std::size_t> user_index_;
    std::vector<std::vector<std::int64_t>> attendance_;  // by user index
};

// CSV ingestion. Header `participant_id,activity_id,team_id,incentive` is
// required; `incentive` accepts 0/1/true/false and team_id may be empty.
// Errors report the offending line number.
ActivityLog parse_csv(const std::filesystem::path& path);
ActivityLog parse_csv(std::istream& in, const std::string& source_name = "<stream>");

// Deterministic inverse of parse_csv (rows sorted, incentive as 0/1).
void write_csv(const ActivityLog& log, std::ostream& out);
void write_csv(const ActivityLog& log, const std::filesystem::path& path);

// Per-user attendance counts over activities [0, upto]; default full log.
// Users absent from the prefix are not represented.
FrequencySequence frequency_sequence(const ActivityLog& log,
                                     std::optional<std::int64_t> upto = std::nullopt);

// First differences of one user's attended activity ids. Requires >= 2
// attendances.
IntervalSequence interval_sequence(const ActivityLog& log, std::int64_t user);

// Log restricted to records with activity_id <= upto.
ActivityLog prefix(const ActivityLog& log, std::int64_t upto);

// Smallest activity id whose prefix contains >= population distinct users.
std::int64_t users_reaching(const ActivityLog& log, std::int64_t population);

}  // namespace hfbi
