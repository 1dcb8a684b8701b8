#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hfbi/event_log.hpp"
#include "hfbi/powerlaw.hpp"

namespace hfbi {

// Maximal run of one user's consecutive attendances with every gap
// strictly below delta.
struct Burst {
    std::int64_t user_id = 0;
    std::vector<std::int64_t> activity_ids;           // >= 2 entries, ascending
    std::int64_t first_incentive_position = -1;       // 0-based; -1 = none
};

struct BurstTable {
    std::int64_t delta = 0;
    std::int64_t total_bursts = 0;
    std::map<std::int64_t, std::int64_t> count_by_position;  // key -1 = no incentive
    double share_first = 0.0;   // fraction of bursts with an incentive at position 0
    double share_two = 0.0;     // ... within the first two positions
    double share_three = 0.0;   // ... within the first three positions
};

// Users with strictly more than `min_count` attendances, ascending ids.
std::vector<std::int64_t> loyal_users(const ActivityLog& log, std::int64_t min_count = 100);

// Power-law fits of each listed user's gap sequence. Users whose gaps never
// pass the fit are skipped.
struct IntervalFit {
    std::int64_t user_id = 0;
    PowerLawFit fit;
};
std::vector<IntervalFit> fit_intervals(const ActivityLog& log,
                                       const std::vector<std::int64_t>& users,
                                       const SelectXminOptions& opts = {});

// Maximal [i, j] index spans (inclusive) of `values` where consecutive
// differences are all strictly below delta and j > i (a single isolated
// value is not a burst). Requires delta >= 2 and strictly ascending values.
std::vector<std::pair<std::size_t, std::size_t>> burst_spans(
    const std::vector<std::int64_t>& values, std::int64_t delta);

// All bursts of the listed users at gap threshold delta.
std::vector<Burst> detect_bursts(const ActivityLog& log,
                                 const std::vector<std::int64_t>& users, std::int64_t delta);

// Positional incentive tally over a burst list.
BurstTable burst_table(const std::vector<Burst>& bursts, std::int64_t delta);

// Fraction of all activities flagged incentive (chance-level comparison for
// the positional shares).
double burst_baseline(const ActivityLog& log);

}  // namespace hfbi
