#include "hfbi/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "hfbi/errors.hpp"
#include "hfbi/powerlaw.hpp"

namespace hfbi {

std::string to_string(InertiaKernel kernel) {
    return kernel == InertiaKernel::Reciprocal ? "reciprocal" : "exponential";
}

InertiaKernel kernel_from_string(const std::string& name) {
    if (name == "reciprocal") return InertiaKernel::Reciprocal;
    if (name == "exponential") return InertiaKernel::Exponential;
    throw ValidationError("unknown inertia kernel '" + name +
                          "' (expected 'reciprocal' or 'exponential')");
}

void HfbiParams::validate() const {
    if (rounds < 1) throw ValidationError("params: rounds must be >= 1");
    if (new_per_round < 1) throw ValidationError("params: new_per_round must be >= 1");
    if (returning_per_round < 0)
        throw ValidationError("params: returning_per_round must be >= 0");
    if (!(habit_weight >= 0.0 && habit_weight <= 1.0))
        throw ValidationError("params: habit_weight must be in [0, 1]");
}

std::vector<double> participation_probabilities(const SimState& state,
                                                const HfbiParams& params) {
    params.validate();
    if (state.counts.size() != state.last_seen.size())
        throw ValidationError("state: counts and last_seen sizes differ");
    const auto pool = state.counts.size();
    std::vector<double> phi(pool, 0.0);
    if (pool == 0) return phi;

    double sum_q = 0.0;
    for (auto q : state.counts) {
        if (q < 0) throw ValidationError("state: negative attendance count");
        sum_q += static_cast<double>(q);
    }

    std::vector<double> w(pool);
    double sum_w = 0.0;
    for (std::size_t i = 0; i < pool; ++i) {
        // rounds since last attendance, floored at 1 so the debut round
        // carries weight instead of dividing by zero
        const std::int64_t d = std::max<std::int64_t>(state.round - state.last_seen[i], 1);
        w[i] = params.kernel == InertiaKernel::Reciprocal
                   ? 1.0 / static_cast<double>(d)
                   : std::exp(-static_cast<double>(std::min<std::int64_t>(d, 700)));
        sum_w += w[i];
    }

    const double uniform = 1.0 / static_cast<double>(pool);
    const double alpha = params.habit_weight;
    for (std::size_t i = 0; i < pool; ++i) {
        const double habit =
            sum_q > 0.0 ? static_cast<double>(state.counts[i]) / sum_q : uniform;
        const double inertia = sum_w > 0.0 ? w[i] / sum_w : uniform;
        phi[i] = alpha * habit + (1.0 - alpha) * inertia;
    }
    return phi;
}

namespace detail {

MassTree::MassTree(std::size_t capacity) : tree_(capacity + 1, 0) {}

void MassTree::add(std::size_t i, std::int64_t delta) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

std::size_t MassTree::find(std::uint64_t k) const {
    if (tree_.size() <= 1) return 0;
    std::size_t pos = 0;
    std::size_t pw = std::bit_floor(tree_.size() - 1);
    for (; pw > 0; pw >>= 1) {
        const std::size_t next = pos + pw;
        if (next < tree_.size() && static_cast<std::uint64_t>(tree_[next]) <= k) {
            pos = next;
            k -= static_cast<std::uint64_t>(tree_[next]);
        }
    }
    return pos;
}

// One round of habit-only selection: m_eff distinct users, each pick
// proportional to counts over the users not yet taken this round (marked
// with `stamp`). `find` maps a mass unit to its owning user with users in
// id order, so step() (fresh prefix sums) and Simulation (incremental
// MassTree) consume identical draws. A pick first rejects against the full
// mass, then falls back to an exact integer draw over the untaken counts;
// when no countable mass remains the pick is uniform over untaken users.
template <class FindFn>
void draw_habit_round(const std::vector<std::int64_t>& counts, std::vector<std::int64_t>& mark,
                      std::int64_t stamp, std::int64_t m_eff, std::uint64_t total_mass,
                      FindFn&& find, Rng& rng, std::vector<std::int64_t>& picked) {
    const auto pool = static_cast<std::int64_t>(counts.size());
    std::uint64_t remaining = total_mass;
    std::int64_t taken_n = 0;
    for (std::int64_t t = 0; t < m_eff; ++t) {
        std::int64_t chosen = -1;
        if (remaining > 0) {
            for (int attempt = 0; attempt < 64 && chosen < 0; ++attempt) {
                const auto id = static_cast<std::int64_t>(find(rng.uniform_below(total_mass)));
                if (mark[static_cast<std::size_t>(id)] != stamp) chosen = id;
            }
            if (chosen < 0) {
                // exact draw over the unpicked users' counts
                auto k = rng.uniform_below(remaining);
                for (std::int64_t id = 0; id < pool; ++id) {
                    if (mark[static_cast<std::size_t>(id)] == stamp) continue;
                    const auto c =
                        static_cast<std::uint64_t>(counts[static_cast<std::size_t>(id)]);
                    if (k < c) {
                        chosen = id;
                        break;
                    }
                    k -= c;
                }
            }
        }
        if (chosen < 0) {
            // zero selectable mass: uniform over unpicked users
            auto k = rng.uniform_below(static_cast<std::uint64_t>(pool - taken_n));
            for (std::int64_t id = 0; id < pool; ++id) {
                if (mark[static_cast<std::size_t>(id)] == stamp) continue;
                if (k == 0) {
                    chosen = id;
                    break;
                }
                --k;
            }
        }
        mark[static_cast<std::size_t>(chosen)] = stamp;
        remaining -= static_cast<std::uint64_t>(counts[static_cast<std::size_t>(chosen)]);
        ++taken_n;
        picked.push_back(chosen);
    }
}

// Draw `m` distinct indices with probabilities proportional to phi,
// renormalizing over the not-yet-drawn set after each pick. Shared by
// step() and Simulation so both consume the RNG stream identically.
// Each pick first tries rejection against the full-mass prefix sums (cheap
// when little mass is used up), then falls back to an exact scan over the
// remaining indices; picks from an exhausted distribution are uniform.
std::vector<std::int64_t> draw_without_replacement(const std::vector<double>& phi,
                                                   std::int64_t m, Rng& rng) {
    const auto pool = static_cast<std::int64_t>(phi.size());
    if (m < 0 || m > pool)
        throw ValidationError("draw_without_replacement: m out of range");

    std::vector<double> prefix(phi.size());
    double total = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(phi[i] >= 0.0))
            throw ValidationError("draw_without_replacement: negative weight");
        total += phi[i];
        prefix[i] = total;
    }

    std::vector<char> taken(phi.size(), 0);
    std::vector<std::int64_t> picked;
    picked.reserve(static_cast<std::size_t>(m));
    double removed = 0.0;
    std::int64_t untaken = pool;

    for (std::int64_t t = 0; t < m; ++t) {
        std::int64_t chosen = -1;
        const double remaining = total - removed;
        if (remaining > 0.0) {
            for (int attempt = 0; attempt < 64 && chosen < 0; ++attempt) {
                const double u = rng.uniform01() * total;
                const auto it = std::upper_bound(prefix.begin(), prefix.end(), u);
                const auto i = static_cast<std::int64_t>(it - prefix.begin());
                if (i < pool && !taken[static_cast<std::size_t>(i)]) chosen = i;
            }
            if (chosen < 0) {
                const double u = rng.uniform01() * remaining;
                double acc = 0.0;
                std::int64_t last_positive = -1;
                for (std::int64_t i = 0; i < pool; ++i) {
                    if (taken[static_cast<std::size_t>(i)] || phi[static_cast<std::size_t>(i)] <= 0.0)
                        continue;
                    acc += phi[static_cast<std::size_t>(i)];
                    last_positive = i;
                    if (u < acc) {
                        chosen = i;
                        break;
                    }
                }
                if (chosen < 0) chosen = last_positive;  // float shortfall at the top end
            }
        }
        if (chosen < 0) {
            // no selectable mass left: uniform over the remaining indices
            auto k = rng.uniform_below(static_cast<std::uint64_t>(untaken));
            for (std::int64_t i = 0; i < pool; ++i) {
                if (taken[static_cast<std::size_t>(i)]) continue;
                if (k == 0) {
                    chosen = i;
                    break;
                }
                --k;
            }
        }
        taken[static_cast<std::size_t>(chosen)] = 1;
        removed += phi[static_cast<std::size_t>(chosen)];
        --untaken;
        picked.push_back(chosen);
    }
    return picked;
}

}  // namespace detail

std::vector<std::int64_t> step(SimState& state, const HfbiParams& params, Rng& rng) {
    params.validate();
    if (state.counts.size() != state.last_seen.size())
        throw ValidationError("state: counts and last_seen sizes differ");
    const auto pool = static_cast<std::int64_t>(state.counts.size());
    const std::int64_t m_eff = std::min(params.returning_per_round, pool);

    std::vector<std::int64_t> attendees;
    if (m_eff == pool) {
        // everyone returns; no randomness to consume
        attendees.resize(static_cast<std::size_t>(pool));
        std::iota(attendees.begin(), attendees.end(), std::int64_t{0});
    } else if (m_eff > 0) {
        if (params.habit_weight == 1.0) {
            // habit-only: exact integer draws over id-ordered prefix sums
            std::vector<std::uint64_t> prefix(state.counts.size());
            std::uint64_t total = 0;
            for (std::size_t i = 0; i < state.counts.size(); ++i) {
                if (state.counts[i] < 0)
                    throw ValidationError("state: negative attendance count");
                total += static_cast<std::uint64_t>(state.counts[i]);
                prefix[i] = total;
            }
            std::vector<std::int64_t> mark(state.counts.size(), -1);
            detail::draw_habit_round(
                state.counts, mark, 0, m_eff, total,
                [&prefix](std::uint64_t k) {
                    return static_cast<std::size_t>(
                        std::upper_bound(prefix.begin(), prefix.end(), k) - prefix.begin());
                },
                rng, attendees);
        } else {
            const auto phi = participation_probabilities(state, params);
            attendees = detail::draw_without_replacement(phi, m_eff, rng);
        }
    }

    for (auto id : attendees) {
        ++state.counts[static_cast<std::size_t>(id)];
        state.last_seen[static_cast<std::size_t>(id)] = state.round;
    }
    for (std::int64_t t = 0; t < params.new_per_round; ++t) {
        const auto id = static_cast<std::int64_t>(state.counts.size());
        state.counts.push_back(1);
        state.last_seen.push_back(state.round);
        attendees.push_back(id);
    }
    ++state.round;
    return attendees;
}

Simulation::Simulation(const HfbiParams& params, std::uint64_t seed)
    : params_(params), rng_(seed) {
    params_.validate();
    // seed pool: returning_per_round users with no history yet
    state_.counts.assign(static_cast<std::size_t>(params_.returning_per_round), 0);
    state_.last_seen.assign(static_cast<std::size_t>(params_.returning_per_round), 0);
    state_.round = 0;
}

void Simulation::round_alpha_one(std::vector<std::int64_t>& picked) {
    const std::int64_t j = state_.round;
    const auto pool = static_cast<std::int64_t>(state_.counts.size());
    const std::int64_t m_eff = std::min(params_.returning_per_round, pool);
    detail::draw_habit_round(
        state_.counts, mark_, j, m_eff, total_mass_,
        [this](std::uint64_t k) { return mass_.find(k); }, rng_, picked);
}

void Simulation::round_general(std::vector<std::int64_t>& picked) {
    const auto pool = static_cast<std::int64_t>(state_.counts.size());
    const std::int64_t m_eff = std::min(params_.returning_per_round, pool);
    const auto phi = participation_probabilities(state_, params_);
    picked = detail::draw_without_replacement(phi, m_eff, rng_);
}

void Simulation::run_rounds() {
    const bool fast = params_.habit_weight == 1.0;
    mark_.assign(state_.counts.size(), -1);
    const auto final_pool = static_cast<std::size_t>(
        params_.returning_per_round + params_.new_per_round * params_.rounds);
    if (fast) {
        mass_ = detail::MassTree(final_pool);
        total_mass_ = 0;
    }
    if (keep_records_)
        records_.reserve(static_cast<std::size_t>(
            (params_.new_per_round + params_.returning_per_round) * params_.rounds));

    std::vector<std::int64_t> picked;
    for (std::int64_t j = 0; j < params_.rounds; ++j) {
        picked.clear();
        const auto pool = static_cast<std::int64_t>(state_.counts.size());
        const std::int64_t m_eff = std::min(params_.returning_per_round, pool);
        if (m_eff == pool) {
            picked.resize(static_cast<std::size_t>(pool));
            std::iota(picked.begin(), picked.end(), std::int64_t{0});
        } else if (m_eff > 0) {
            if (fast)
                round_alpha_one(picked);
            else
                round_general(picked);
        }

        for (auto id : picked) {
            ++state_.counts[static_cast<std::size_t>(id)];
            state_.last_seen[static_cast<std::size_t>(id)] = j;
            if (fast) mass_.add(static_cast<std::size_t>(id), 1);
        }
        for (std::int64_t t = 0; t < params_.new_per_round; ++t) {
            const auto id = static_cast<std::int64_t>(state_.counts.size());
            state_.counts.push_back(1);
            state_.last_seen.push_back(j);
            mark_.push_back(-1);
            if (fast) mass_.add(static_cast<std::size_t>(id), 1);
            picked.push_back(id);
        }
        if (fast)
            total_mass_ += static_cast<std::uint64_t>(picked.size());
        if (keep_records_)
            for (auto id : picked)
                records_.push_back({id, j, std::nullopt, false});
        state_.round = j + 1;
    }
}

SimResult Simulation::run() {
    keep_records_ = true;
    run_rounds();
    SimResult result{ActivityLog::from_records(std::move(records_)),
                     FrequencySequence(state_.counts)};
    records_.clear();
    return result;
}

FrequencySequence Simulation::run_frequencies() {
    keep_records_ = false;
    run_rounds();
    return state_.counts;
}

SimResult simulate(const HfbiParams& params, std::uint64_t seed) {
    Simulation sim(params, seed);
    return sim.run();
}

FrequencySequence simulate_frequencies(const HfbiParams& params, std::uint64_t seed) {
    Simulation sim(params, seed);
    return sim.run_frequencies();
}

HfbiParams derive_params(const ActivityLog& log) {
    const std::int64_t n = log.activity_count();
    if (n < 2) throw ValidationError("derive_params: need at least two activities");

    // Activity 0 only debuts users, so the per-activity means of new and
    // returning attendees run over activities 1..n-1.
    std::unordered_set<std::int64_t> seen;
    const auto& recs = log.records();
    std::size_t i = 0;
    std::int64_t sum_new = 0, sum_ret = 0;
    for (std::int64_t a = 0; a < n; ++a) {
        std::int64_t fresh = 0, back = 0;
        while (i < recs.size() && recs[i].activity_id == a) {
            if (seen.insert(recs[i].participant_id).second)
                ++fresh;
            else
                ++back;
            ++i;
        }
        if (a >= 1) {
            sum_new += fresh;
            sum_ret += back;
        }
    }

    HfbiParams p;
    p.rounds = n;
    p.new_per_round = std::llround(static_cast<double>(sum_new) / static_cast<double>(n - 1));
    p.returning_per_round =
        std::llround(static_cast<double>(sum_ret) / static_cast<double>(n - 1));
    return p;
}

double habit_only_exponent(const HfbiParams& params) {
    if (params.new_per_round < 1)
        throw ValidationError("habit_only_exponent: new_per_round must be >= 1");
    if (params.returning_per_round < 1)
        throw ValidationError("habit_only_exponent: returning_per_round must be >= 1");
    return 2.0 + static_cast<double>(params.new_per_round) /
                     static_cast<double>(params.returning_per_round);
}

TheoryCheck validate_theory(const HfbiParams& params, const TheoryOptions& opts) {
    params.validate();
    if (params.habit_weight != 1.0)
        throw ValidationError("validate_theory: the closed form holds for habit_weight == 1");
    if (opts.n_runs < 1) throw ValidationError("validate_theory: n_runs must be >= 1");

    TheoryCheck check;
    check.params = params;
    check.predicted_gamma = habit_only_exponent(params);
    check.fitted_gammas.resize(static_cast<std::size_t>(opts.n_runs));
    for (int r = 0; r < opts.n_runs; ++r) {
        const auto run_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(r));
        const auto freqs = simulate_frequencies(params, run_seed);
        SelectXminOptions so;
        so.n_boot = opts.n_boot;
        so.seed = run_seed;
        so.exec = opts.exec;
        check.fitted_gammas[static_cast<std::size_t>(r)] = select_xmin(freqs, so).gamma;
    }

    auto sorted = check.fitted_gammas;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    check.median_gamma = sorted.size() % 2 == 1
                             ? sorted[mid]
                             : 0.5 * (sorted[mid - 1] + sorted[mid]);
    check.abs_error = std::abs(check.median_gamma - check.predicted_gamma);
    return check;
}

}  // namespace hfbi
