#pragma once

#include <cstdint>
#include <vector>

#include "hfbi/event_log.hpp"
#include "hfbi/exec.hpp"

namespace hfbi {

// One point of an empirical participation-propensity curve: of the
// `exposed` user-activity pairs where the user's covariate equalled `x`,
// `participated` attended.
struct PropensityPoint {
    std::int64_t x = 0;
    std::int64_t participated = 0;
    std::int64_t exposed = 0;
    double proportion = 0.0;
};

// P(attend activity j | attended q of activities 0..j-1), tallied over all
// (user, activity) pairs with j >= 1 and q >= 1. Point x = q.
std::vector<PropensityPoint> prop_by_history(const ActivityLog& log, Exec exec = Exec::Parallel);

// P(attend activity j | last attendance was d activities ago), same pairs.
// Point x = d >= 1.
std::vector<PropensityPoint> prop_by_absence(const ActivityLog& log, Exec exec = Exec::Parallel);

// Moving-average smoothing: point i is re-averaged over neighbours within a
// symmetric window (radius window/2, shrunk near the ends). Counts are
// summed over the same window so `exposed` reflects the evidence behind the
// smoothed value.
std::vector<PropensityPoint> smooth(const std::vector<PropensityPoint>& curve, int window = 20);

}  // namespace hfbi
