// Timing harness for the data-parallel kernels. Each kernel runs once with
// the serial reference and once with the parallel path; results must agree
// exactly (every task derives its own seed), so the run doubles as an
// equality check. Exits non-zero on any mismatch.

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>

#include "hfbi/calibration.hpp"
#include "hfbi/evidence.hpp"
#include "hfbi/model.hpp"
#include "hfbi/powerlaw.hpp"

using hfbi::Exec;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int failures = 0;

template <typename Fn>
auto timed(const std::string& label, Exec exec, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto result = fn(exec);
    const double dt = seconds_since(start);
    std::cout << "  " << std::left << std::setw(10)
              << (exec == Exec::Serial ? "serial" : "parallel") << std::setw(10) << std::fixed
              << std::setprecision(3) << dt << "s  " << label << '\n';
    return result;
}

template <typename Fn>
void compare(const std::string& label, Fn&& fn) {
    std::cout << label << '\n';
    const auto serial = timed(label, Exec::Serial, fn);
    const auto parallel = timed(label, Exec::Parallel, fn);
    const bool same = serial == parallel;
    std::cout << "  identical: " << (same ? "yes" : "NO") << '\n';
    if (!same) ++failures;
}

}  // namespace

int main() {
    constexpr std::uint64_t seed = hfbi::kDefaultSeed;

    // shared inputs
    hfbi::HfbiParams params;
    params.rounds = 2000;
    params.new_per_round = 2;
    params.returning_per_round = 5;
    params.habit_weight = 1.0;
    const auto sim = hfbi::simulate(params, seed);

    hfbi::PowerLawSampler sampler(2.5, 1);
    hfbi::Rng rng(seed);
    std::vector<std::int64_t> sample;
    sampler.fill(sample, 2000, rng);

    compare("bootstrap goodness-of-fit (n=2000, 400 replicates)", [&](Exec exec) {
        hfbi::GofOptions opts;
        opts.n_boot = 400;
        opts.seed = seed;
        opts.exec = exec;
        return hfbi::gof_p_value(sample, hfbi::mle_gamma(sample, 1), 1, opts);
    });

    compare("habit-weight calibration (11-point grid, 3 runs)", [&](Exec exec) {
        hfbi::CalibrationOptions opts;
        opts.grid_step = 0.1;
        opts.runs = 3;
        opts.seed = seed;
        opts.exec = exec;
        const auto cal = hfbi::calibrate_alpha(sim.frequencies, hfbi::derive_params(sim.log), opts);
        return std::pair(cal.best_alpha, cal.run_p);
    });

    compare("propensity tallies (history + absence)", [&](Exec exec) {
        auto h = hfbi::prop_by_history(sim.log, exec);
        auto d = hfbi::prop_by_absence(sim.log, exec);
        std::vector<std::int64_t> key;
        for (const auto& p : h) {
            key.push_back(p.x);
            key.push_back(p.participated);
            key.push_back(p.exposed);
        }
        for (const auto& p : d) {
            key.push_back(p.x);
            key.push_back(p.participated);
            key.push_back(p.exposed);
        }
        return key;
    });

    compare("per-stage fits (7 stages)", [&](Exec exec) {
        hfbi::NodeFitOptions opts;
        opts.population_threshold = 1000;
        opts.stride = 250;
        opts.fit.n_boot = 100;
        opts.fit.seed = seed;
        opts.fit.exec = Exec::Serial;  // inner kernel; the stage loop is what varies
        opts.exec = exec;
        std::vector<double> key;
        for (const auto& node : hfbi::per_node_fits(sim.log, opts)) {
            key.push_back(static_cast<double>(node.upto));
            key.push_back(node.fit.gamma);
            key.push_back(node.fit.p_value);
        }
        return key;
    });

    if (failures > 0) {
        std::cout << failures << " kernel(s) diverged between serial and parallel\n";
        return 1;
    }
    std::cout << "all kernels identical between serial and parallel\n";
    return 0;
}
