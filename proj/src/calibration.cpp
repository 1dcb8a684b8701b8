#include "hfbi/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hfbi/errors.hpp"

namespace hfbi {

namespace {

std::vector<double> alpha_grid(double step) {
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double a = static_cast<double>(k) * step;
        if (a >= 1.0 - 1e-12) break;
        grid.push_back(a);
    }
    grid.push_back(1.0);
    return grid;
}

std::vector<std::int64_t> node_list(const ActivityLog& log, const NodeFitOptions& opts) {
    if (opts.stride < 1) throw ValidationError("per-node analysis: stride must be >= 1");
    const std::int64_t start = users_reaching(log, opts.population_threshold);
    const std::int64_t last = log.activity_count() - 1;
    std::vector<std::int64_t> nodes;
    for (std::int64_t upto = start; upto <= last; upto += opts.stride) nodes.push_back(upto);
    if (nodes.back() != last) nodes.push_back(last);  // always include the full log
    return nodes;
}

}  // namespace

AlphaCalibration calibrate_alpha(const FrequencySequence& observed, const HfbiParams& base,
                                 const CalibrationOptions& opts) {
    if (observed.empty()) throw ValidationError("calibrate_alpha: empty observed sample");
    if (!(opts.grid_step > 0.0 && opts.grid_step <= 1.0))
        throw ValidationError("calibrate_alpha: grid_step must be in (0, 1]");
    if (opts.runs < 1) throw ValidationError("calibrate_alpha: runs must be >= 1");
    base.validate();

    AlphaCalibration cal;
    cal.grid = alpha_grid(opts.grid_step);
    cal.runs = opts.runs;
    cal.kernel = opts.kernel;
    cal.seed = opts.seed;

    const auto n_grid = static_cast<std::int64_t>(cal.grid.size());
    cal.run_p.assign(cal.grid.size(), std::vector<double>(static_cast<std::size_t>(opts.runs)));

    // one independent simulation per (grid point, run), seeded by (k, r)
#pragma omp parallel for collapse(2) schedule(dynamic) if (opts.exec == Exec::Parallel)
    for (std::int64_t k = 0; k < n_grid; ++k) {
        for (int r = 0; r < opts.runs; ++r) {
            HfbiParams params = base;
            params.habit_weight = cal.grid[static_cast<std::size_t>(k)];
            params.kernel = opts.kernel;
            const auto seed =
                derive_seed(opts.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r));
            const auto sim = simulate_frequencies(params, seed);
            cal.run_p[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] =
                two_sample_ks(sim, observed).p_value;
        }
    }

    cal.mean_p.resize(cal.grid.size());
    for (std::size_t k = 0; k < cal.grid.size(); ++k) {
        double sum = 0.0;
        for (double p : cal.run_p[k]) sum += p;
        cal.mean_p[k] = sum / static_cast<double>(opts.runs);
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < cal.grid.size(); ++k)
        if (cal.mean_p[k] > cal.mean_p[best]) best = k;  // ties keep the smaller alpha
    cal.best_alpha = cal.grid[best];
    cal.best_mean_p = cal.mean_p[best];
    return cal;
}

AlphaCalibration calibrate_alpha(const ActivityLog& log, const CalibrationOptions& opts) {
    return calibrate_alpha(frequency_sequence(log), derive_params(log), opts);
}

std::vector<NodeFit> per_node_fits(const ActivityLog& log, const NodeFitOptions& opts) {
    const auto nodes = node_list(log, opts);
    std::vector<std::optional<NodeFit>> slots(nodes.size());

    const auto n_nodes = static_cast<std::int64_t>(nodes.size());
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n_nodes; ++i) {
        const auto upto = nodes[static_cast<std::size_t>(i)];
        const auto freqs = frequency_sequence(log, upto);
        try {
            // every node gets the same master seed: a node's fit must not
            // depend on which other nodes are analysed
            NodeFit node;
            node.upto = upto;
            node.users = static_cast<std::int64_t>(freqs.size());
            node.fit = select_xmin(freqs, opts.fit);
            slots[static_cast<std::size_t>(i)] = node;
        } catch (const FitError&) {
            // node skipped: no truncation point passes here
        }
    }

    std::vector<NodeFit> out;
    for (auto& slot : slots)
        if (slot) out.push_back(*slot);
    return out;
}

std::vector<NodeCalibration> per_node_calibration(const ActivityLog& log,
                                                  const NodeFitOptions& nodes,
                                                  const CalibrationOptions& cal) {
    const auto list = node_list(log, nodes);
    std::vector<NodeCalibration> out(list.size());

    const auto n_nodes = static_cast<std::int64_t>(list.size());
#pragma omp parallel for schedule(dynamic) if (nodes.exec == Exec::Parallel)
    for (std::int64_t i = 0; i < n_nodes; ++i) {
        const auto upto = list[static_cast<std::size_t>(i)];
        const auto sub = prefix(log, upto);
        CalibrationOptions node_cal = cal;
        if (nodes.exec == Exec::Parallel) node_cal.exec = Exec::Serial;  // outer loop owns the threads
        const auto result = calibrate_alpha(sub, node_cal);
        auto& slot = out[static_cast<std::size_t>(i)];
        slot.upto = upto;
        slot.users = sub.user_count();
        slot.best_alpha = result.best_alpha;
        slot.best_mean_p = result.best_mean_p;
    }
    return out;
}

}  // namespace hfbi
