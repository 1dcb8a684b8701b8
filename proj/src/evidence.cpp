#include "hfbi/evidence.hpp"

#include <algorithm>

#include "hfbi/errors.hpp"

namespace hfbi {

namespace {

// Walk one user's timeline from the activity after their debut, invoking
// visit(covariate, attended) once per later activity.
template <typename Visit>
void walk_user(const std::vector<std::int64_t>& acts, std::int64_t n_activities, Visit visit) {
    std::size_t idx = 1;
    for (std::int64_t j = acts.front() + 1; j < n_activities; ++j) {
        const bool attended = idx < acts.size() && acts[idx] == j;
        visit(j, attended);
        if (attended) ++idx;
    }
}

std::vector<PropensityPoint> collect(const std::vector<std::int64_t>& exposed,
                                     const std::vector<std::int64_t>& participated) {
    std::vector<PropensityPoint> out;
    for (std::size_t x = 0; x < exposed.size(); ++x) {
        if (exposed[x] == 0) continue;
        PropensityPoint p;
        p.x = static_cast<std::int64_t>(x);
        p.participated = participated[x];
        p.exposed = exposed[x];
        p.proportion = static_cast<double>(p.participated) / static_cast<double>(p.exposed);
        out.push_back(p);
    }
    return out;
}

// Shared tally driver: Tally(user_acts, n, exposed, participated) adds one
// user's contributions. Merging per-thread tallies is integer addition, so
// the parallel path reproduces the serial one exactly.
template <typename Tally>
std::vector<PropensityPoint> tally_users(const ActivityLog& log, Exec exec, Tally tally) {
    const std::int64_t n = log.activity_count();
    const auto& users = log.user_ids();
    const auto slots = static_cast<std::size_t>(n) + 1;
    std::vector<std::int64_t> exposed(slots, 0), participated(slots, 0);

    if (exec == Exec::Parallel) {
#pragma omp parallel
        {
            std::vector<std::int64_t> le(slots, 0), lp(slots, 0);
#pragma omp for schedule(static) nowait
            for (std::int64_t u = 0; u < static_cast<std::int64_t>(users.size()); ++u)
                tally(log.attendances(users[static_cast<std::size_t>(u)]), n, le, lp);
#pragma omp critical
            {
                for (std::size_t i = 0; i < slots; ++i) {
                    exposed[i] += le[i];
                    participated[i] += lp[i];
                }
            }
        }
    } else {
        for (auto user : users) tally(log.attendances(user), n, exposed, participated);
    }
    return collect(exposed, participated);
}

}  // namespace

std::vector<PropensityPoint> prop_by_history(const ActivityLog& log, Exec exec) {
    return tally_users(log, exec,
                       [](const std::vector<std::int64_t>& acts, std::int64_t n,
                          std::vector<std::int64_t>& exposed,
                          std::vector<std::int64_t>& participated) {
                           std::int64_t q = 1;  // attendances before activity j
                           walk_user(acts, n, [&](std::int64_t, bool attended) {
                               ++exposed[static_cast<std::size_t>(q)];
                               if (attended) {
                                   ++participated[static_cast<std::size_t>(q)];
                                   ++q;
                               }
                           });
                       });
}

std::vector<PropensityPoint> prop_by_absence(const ActivityLog& log, Exec exec) {
    return tally_users(log, exec,
                       [](const std::vector<std::int64_t>& acts, std::int64_t n,
                          std::vector<std::int64_t>& exposed,
                          std::vector<std::int64_t>& participated) {
                           std::int64_t last = acts.front();
                           walk_user(acts, n, [&](std::int64_t j, bool attended) {
                               const auto d = static_cast<std::size_t>(j - last);
                               ++exposed[d];
                               if (attended) {
                                   ++participated[d];
                                   last = j;
                               }
                           });
                       });
}

std::vector<PropensityPoint> smooth(const std::vector<PropensityPoint>& curve, int window) {
    if (window < 0) throw ValidationError("smooth: window must be >= 0");
    if (curve.empty() || window == 0) return curve;

    const auto k = static_cast<int>(curve.size());
    const int half = window / 2;
    std::vector<PropensityPoint> out(curve.size());
    for (int i = 0; i < k; ++i) {
        const int r = std::min({half, i, k - 1 - i});  // window shrinks near the ends
        double sum_prop = 0.0;
        std::int64_t sum_exposed = 0, sum_participated = 0;
        for (int t = i - r; t <= i + r; ++t) {
            sum_prop += curve[static_cast<std::size_t>(t)].proportion;
            sum_exposed += curve[static_cast<std::size_t>(t)].exposed;
            sum_participated += curve[static_cast<std::size_t>(t)].participated;
        }
        out[static_cast<std::size_t>(i)] = {curve[static_cast<std::size_t>(i)].x,
                                            sum_participated, sum_exposed,
                                            sum_prop / static_cast<double>(2 * r + 1)};
    }
    return out;
}

}  // namespace hfbi
