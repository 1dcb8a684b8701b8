#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfbi/event_log.hpp"
#include "hfbi/exec.hpp"
#include "hfbi/rng.hpp"

namespace hfbi {

// Distance weighting for the inertia term: 1/d or exp(-d).
enum class InertiaKernel { Reciprocal, Exponential };

std::string to_string(InertiaKernel kernel);
InertiaKernel kernel_from_string(const std::string& name);  // ValidationError on unknown

struct HfbiParams {
    std::int64_t rounds = 0;               // number of activities to simulate
    std::int64_t new_per_round = 0;        // fresh users added after each round (c)
    std::int64_t returning_per_round = 0;  // returning users drawn each round (m)
    double habit_weight = 1.0;             // alpha in [0, 1]
    InertiaKernel kernel = InertiaKernel::Reciprocal;

    void validate() const;  // throws ValidationError
};

// Mutable state mid-simulation; index = user id.
struct SimState {
    std::vector<std::int64_t> counts;     // attendances so far (q_i)
    std::vector<std::int64_t> last_seen;  // round of most recent attendance (l_i)
    std::int64_t round = 0;               // next round to run (j)
};

// Selection weights phi_i for every user in `state` at the coming round:
// alpha * q_i / sum(q) + (1 - alpha) * w(d_i) / sum(w), with d_i the rounds
// since the user last attended (floored at 1). Degenerate terms (all-zero
// counts) fall back to uniform.
std::vector<double> participation_probabilities(const SimState& state, const HfbiParams& params);

// Advance `state` by one round: draw `returning_per_round` distinct users by
// phi (renormalizing after each pick), then append `new_per_round` fresh
// attendees. Returns the ids that attended. Reference implementation; the
// Simulation class reproduces it exactly.
std::vector<std::int64_t> step(SimState& state, const HfbiParams& params, Rng& rng);

struct SimResult {
    ActivityLog log;
    FrequencySequence frequencies;  // per-user counts, user id order
};

namespace detail {

// Prefix-sum tree over per-user attendance counts: locates the owner of the
// k-th unit of habit mass (users in id order) in O(log n). Lets the
// simulation reproduce step()'s habit-only draws without rebuilding prefix
// sums every round.
class MassTree {
public:
    MassTree() = default;
    explicit MassTree(std::size_t capacity);

    void add(std::size_t i, std::int64_t delta);
    // Smallest i whose inclusive prefix sum exceeds k.
    std::size_t find(std::uint64_t k) const;

private:
    std::vector<std::int64_t> tree_;
};

}  // namespace detail

// Full simulation driver. Selection for habit_weight == 1 walks an
// id-ordered mass index (integer arithmetic only); other weights go through
// participation_probabilities. Both paths consume the RNG exactly as n
// rounds of step() would, so a driven step() loop reproduces run() bit for
// bit.
class Simulation {
public:
    Simulation(const HfbiParams& params, std::uint64_t seed);

    // Runs the configured number of rounds from the empty state.
    SimResult run();
    // Runs and returns only per-user counts (skips log assembly).
    FrequencySequence run_frequencies();

private:
    void run_rounds();
    void round_alpha_one(std::vector<std::int64_t>& picked);
    void round_general(std::vector<std::int64_t>& picked);

    HfbiParams params_;
    Rng rng_;
    SimState state_;
    detail::MassTree mass_;             // id-grouped counts, alpha == 1 path
    std::uint64_t total_mass_ = 0;      // sum of counts before this round
    std::vector<std::int64_t> mark_;    // round in which a user was last picked
    std::vector<ParticipationRecord> records_;
    bool keep_records_ = true;
};

SimResult simulate(const HfbiParams& params, std::uint64_t seed);
FrequencySequence simulate_frequencies(const HfbiParams& params, std::uint64_t seed);

// Parameters implied by an observed log: c and m are the means of new and
// returning attendee counts over activities 1..last, n is the activity
// count. Requires at least two activities.
HfbiParams derive_params(const ActivityLog& log);

// Closed-form tail exponent of the habit-only model, 2 + c/m.
double habit_only_exponent(const HfbiParams& params);

struct TheoryCheck {
    HfbiParams params;
    double predicted_gamma = 0.0;
    std::vector<double> fitted_gammas;  // one per seed
    double median_gamma = 0.0;
    double abs_error = 0.0;
};

struct TheoryOptions {
    int n_runs = 5;
    std::uint64_t seed = kDefaultSeed;
    int n_boot = 250;  // bootstrap depth for the per-run x_min scan
    Exec exec = Exec::Parallel;
};

// Simulates habit-only runs and compares the median fitted exponent with
// 2 + c/m.
TheoryCheck validate_theory(const HfbiParams& params, const TheoryOptions& opts = {});

}  // namespace hfbi
