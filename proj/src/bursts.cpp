#include "hfbi/bursts.hpp"

#include <algorithm>

#include "hfbi/errors.hpp"

namespace hfbi {

std::vector<std::int64_t> loyal_users(const ActivityLog& log, std::int64_t min_count) {
    if (min_count < 0) throw ValidationError("loyal_users: min_count must be >= 0");
    std::vector<std::int64_t> out;
    for (auto user : log.user_ids())
        if (static_cast<std::int64_t>(log.attendances(user).size()) > min_count)
            out.push_back(user);
    return out;
}

std::vector<IntervalFit> fit_intervals(const ActivityLog& log,
                                       const std::vector<std::int64_t>& users,
                                       const SelectXminOptions& opts) {
    std::vector<IntervalFit> out;
    for (auto user : users) {
        const auto seq = interval_sequence(log, user);
        try {
            out.push_back({user, select_xmin(seq.intervals, opts)});
        } catch (const FitError&) {
            // user skipped: gap sequence never passes the fit
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> burst_spans(
    const std::vector<std::int64_t>& values, std::int64_t delta) {
    if (delta < 2) throw ValidationError("burst_spans: delta must be >= 2");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1])
            throw ValidationError("burst_spans: values must be strictly ascending");

    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] - values[j] < delta) ++j;
        if (j > i) out.emplace_back(i, j);  // a burst needs at least two events
        i = j + 1;
    }
    return out;
}

std::vector<Burst> detect_bursts(const ActivityLog& log,
                                 const std::vector<std::int64_t>& users, std::int64_t delta) {
    std::vector<Burst> out;
    for (auto user : users) {
        const auto& acts = log.attendances(user);
        for (const auto& [lo, hi] : burst_spans(acts, delta)) {
            Burst b;
            b.user_id = user;
            b.activity_ids.assign(acts.begin() + static_cast<std::ptrdiff_t>(lo),
                                  acts.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
            for (std::size_t k = 0; k < b.activity_ids.size(); ++k) {
                if (log.is_incentive(b.activity_ids[k])) {
                    b.first_incentive_position = static_cast<std::int64_t>(k);
                    break;
                }
            }
            out.push_back(std::move(b));
        }
    }
    return out;
}

BurstTable burst_table(const std::vector<Burst>& bursts, std::int64_t delta) {
    BurstTable table;
    table.delta = delta;
    table.total_bursts = static_cast<std::int64_t>(bursts.size());
    for (const auto& b : bursts) ++table.count_by_position[b.first_incentive_position];

    if (table.total_bursts > 0) {
        auto count_at = [&](std::int64_t pos) {
            const auto it = table.count_by_position.find(pos);
            return it == table.count_by_position.end() ? std::int64_t{0} : it->second;
        };
        const auto total = static_cast<double>(table.total_bursts);
        table.share_first = static_cast<double>(count_at(0)) / total;
        table.share_two = static_cast<double>(count_at(0) + count_at(1)) / total;
        table.share_three =
            static_cast<double>(count_at(0) + count_at(1) + count_at(2)) / total;
    }
    return table;
}

double burst_baseline(const ActivityLog& log) {
    return static_cast<double>(log.incentive_count()) /
           static_cast<double>(log.activity_count());
}

}  // namespace hfbi
