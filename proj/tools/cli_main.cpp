// Command-line front end: simulate participation logs, fit heavy-tailed
// frequency distributions, trace propensity curves, calibrate the habit
// weight, tally incentive-aligned bursts, and check the closed-form
// exponent. Every run writes a manifest.json from which the exact same run
// can be reproduced.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hfbi/bursts.hpp"
#include "hfbi/calibration.hpp"
#include "hfbi/errors.hpp"
#include "hfbi/evidence.hpp"
#include "hfbi/model.hpp"
#include "hfbi/powerlaw.hpp"
#include "hfbi/serialize.hpp"
#include "hfbi/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string input;
    std::string out;
    std::uint64_t seed = hfbi::kDefaultSeed;
    bool serial = false;

    hfbi::Exec exec() const { return serial ? hfbi::Exec::Serial : hfbi::Exec::Parallel; }
};

struct FitArgs : CommonArgs {
    std::int64_t upto = -1;  // -1 = full log
    int boot = 1000;
    double threshold = 0.1;
    std::int64_t min_tail = 10;
    bool per_node = false;
    std::int64_t population = 1000;
    std::int64_t stride = 1;
};

struct SimulateArgs : CommonArgs {
    std::int64_t rounds = 0;
    std::int64_t new_per_round = 0;
    std::int64_t returning = 0;
    double alpha = 1.0;
    std::string kernel = "reciprocal";
};

struct CalibrateArgs : CommonArgs {
    double grid_step = 0.01;
    int runs = 5;
    std::string kernel = "reciprocal";
    bool per_node = false;
    std::int64_t population = 1000;
    std::int64_t stride = 1;
};

struct EvidenceArgs : CommonArgs {
    int window = 20;
};

struct BurstsArgs : CommonArgs {
    std::int64_t delta = 8;
    std::int64_t min_count = 100;
    std::string scope = "loyal";
    bool fit_intervals = true;
    int boot = 1000;
    double threshold = 0.1;
    std::int64_t min_tail = 10;
};

struct TheoryArgs : CommonArgs {
    std::int64_t rounds = 0;
    std::int64_t new_per_round = 0;
    std::int64_t returning = 0;
    int runs = 5;
    int boot = 250;
};

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

// The manifest records the subcommand and every effective parameter except
// the output directory, so re-running it into any directory reproduces the
// artifacts byte for byte.
void write_manifest(const fs::path& dir, const std::string& command, json parameters) {
    json manifest{{"schema", "run_manifest"},
                  {"tool", "hfbi"},
                  {"version", hfbi::kVersion},
                  {"command", command},
                  {"parameters", std::move(parameters)}};
    hfbi::write_json(manifest, dir / "manifest.json");
}

int run_fit(const FitArgs& a) {
    const auto dir = prepare_out(a.out);
    const auto log = hfbi::parse_csv(fs::path(a.input));
    const auto freqs = hfbi::frequency_sequence(
        log, a.upto < 0 ? std::nullopt : std::optional<std::int64_t>(a.upto));

    hfbi::SelectXminOptions opts;
    opts.p_threshold = a.threshold;
    opts.n_boot = a.boot;
    opts.seed = a.seed;
    opts.min_tail = a.min_tail;
    opts.exec = a.exec();
    const auto fit = hfbi::select_xmin(freqs, opts);

    json fit_json = fit;
    fit_json["top20_share"] = hfbi::top_share(freqs, 0.2);
    hfbi::write_json(fit_json, dir / "fit.json");
    hfbi::write_ccdf_csv(hfbi::ccdf(freqs), dir / "ccdf.csv");
    hfbi::write_lorenz_csv(hfbi::lorenz_curve(freqs), dir / "lorenz.csv");

    if (a.per_node) {
        hfbi::NodeFitOptions node_opts;
        node_opts.population_threshold = a.population;
        node_opts.stride = a.stride;
        node_opts.fit = opts;
        node_opts.exec = a.exec();
        hfbi::write_node_fits_csv(hfbi::per_node_fits(log, node_opts), dir / "node_fits.csv");
    }

    write_manifest(dir, "fit",
                   json{{"input", a.input},
                        {"upto", a.upto},
                        {"boot", a.boot},
                        {"threshold", a.threshold},
                        {"min-tail", a.min_tail},
                        {"seed", a.seed},
                        {"serial", a.serial},
                        {"per-node", a.per_node},
                        {"population", a.population},
                        {"stride", a.stride}});
    std::cout << "fit: gamma=" << hfbi::format_double(fit.gamma) << " x_min=" << fit.x_min
              << " p=" << hfbi::format_double(fit.p_value) << " n_tail=" << fit.n_tail << '\n';
    return 0;
}

int run_simulate(const SimulateArgs& a) {
    const auto dir = prepare_out(a.out);
    hfbi::HfbiParams params;
    params.rounds = a.rounds;
    params.new_per_round = a.new_per_round;
    params.returning_per_round = a.returning;
    params.habit_weight = a.alpha;
    params.kernel = hfbi::kernel_from_string(a.kernel);

    const auto result = hfbi::simulate(params, a.seed);
    hfbi::write_csv(result.log, dir / "log.csv");
    json params_json = params;
    params_json["seed"] = a.seed;
    params_json["users"] = result.log.user_count();
    params_json["records"] = result.log.record_count();
    hfbi::write_json(params_json, dir / "params.json");

    write_manifest(dir, "simulate",
                   json{{"rounds", a.rounds},
                        {"new", a.new_per_round},
                        {"returning", a.returning},
                        {"alpha", a.alpha},
                        {"kernel", a.kernel},
                        {"seed", a.seed},
                        {"serial", a.serial}});
    std::cout << "simulate: " << result.log.record_count() << " records, "
              << result.log.user_count() << " users, " << result.log.activity_count()
              << " activities\n";
    return 0;
}

int run_calibrate(const CalibrateArgs& a) {
    const auto dir = prepare_out(a.out);
    const auto log = hfbi::parse_csv(fs::path(a.input));

    hfbi::CalibrationOptions opts;
    opts.grid_step = a.grid_step;
    opts.runs = a.runs;
    opts.seed = a.seed;
    opts.kernel = hfbi::kernel_from_string(a.kernel);
    opts.exec = a.exec();
    const auto cal = hfbi::calibrate_alpha(log, opts);

    hfbi::write_json(json(cal), dir / "calibration.json");
    {
        std::ofstream curve(dir / "alpha_curve.csv");
        curve << "alpha,mean_p\n";
        for (std::size_t k = 0; k < cal.grid.size(); ++k)
            curve << hfbi::format_double(cal.grid[k]) << ','
                  << hfbi::format_double(cal.mean_p[k]) << '\n';
    }

    if (a.per_node) {
        hfbi::NodeFitOptions node_opts;
        node_opts.population_threshold = a.population;
        node_opts.stride = a.stride;
        node_opts.exec = a.exec();
        hfbi::write_node_calibration_csv(hfbi::per_node_calibration(log, node_opts, opts),
                                         dir / "node_calibration.csv");
    }

    write_manifest(dir, "calibrate",
                   json{{"input", a.input},
                        {"grid-step", a.grid_step},
                        {"runs", a.runs},
                        {"kernel", a.kernel},
                        {"seed", a.seed},
                        {"serial", a.serial},
                        {"per-node", a.per_node},
                        {"population", a.population},
                        {"stride", a.stride}});
    std::cout << "calibrate: best_alpha=" << hfbi::format_double(cal.best_alpha)
              << " mean_p=" << hfbi::format_double(cal.best_mean_p) << '\n';
    return 0;
}

int run_evidence(const EvidenceArgs& a) {
    const auto dir = prepare_out(a.out);
    const auto log = hfbi::parse_csv(fs::path(a.input));

    const auto history = hfbi::prop_by_history(log, a.exec());
    const auto absence = hfbi::prop_by_absence(log, a.exec());
    hfbi::write_propensity_csv(history, "history", dir / "history.csv");
    hfbi::write_propensity_csv(absence, "absence", dir / "absence.csv");
    hfbi::write_propensity_csv(hfbi::smooth(history, a.window), "history",
                               dir / "history_smoothed.csv");
    hfbi::write_propensity_csv(hfbi::smooth(absence, a.window), "absence",
                               dir / "absence_smoothed.csv");

    write_manifest(dir, "evidence",
                   json{{"input", a.input}, {"window", a.window}, {"serial", a.serial}});
    std::cout << "evidence: " << history.size() << " history points, " << absence.size()
              << " absence points\n";
    return 0;
}

int run_bursts(const BurstsArgs& a) {
    const auto dir = prepare_out(a.out);
    const auto log = hfbi::parse_csv(fs::path(a.input));

    std::vector<std::int64_t> users;
    if (a.scope == "loyal")
        users = hfbi::loyal_users(log, a.min_count);
    else if (a.scope == "all")
        users = log.user_ids();
    else
        throw hfbi::ValidationError("bursts: scope must be 'loyal' or 'all'");

    const auto bursts = hfbi::detect_bursts(log, users, a.delta);
    auto table = hfbi::burst_table(bursts, a.delta);
    hfbi::write_bursts_csv(bursts, dir / "bursts.csv");
    json table_json = table;
    table_json["baseline_incentive_rate"] = hfbi::burst_baseline(log);
    table_json["users_considered"] = static_cast<std::int64_t>(users.size());
    hfbi::write_json(table_json, dir / "burst_table.json");

    if (a.fit_intervals) {
        hfbi::SelectXminOptions opts;
        opts.p_threshold = a.threshold;
        opts.n_boot = a.boot;
        opts.seed = a.seed;
        opts.min_tail = a.min_tail;
        opts.exec = a.exec();
        std::vector<std::int64_t> fittable;
        for (auto user : users)
            if (log.attendances(user).size() >= 2) fittable.push_back(user);
        hfbi::write_interval_fits_csv(hfbi::fit_intervals(log, fittable, opts),
                                      dir / "interval_fits.csv");
    }

    write_manifest(dir, "bursts",
                   json{{"input", a.input},
                        {"delta", a.delta},
                        {"min-count", a.min_count},
                        {"scope", a.scope},
                        {"fit-intervals", a.fit_intervals},
                        {"boot", a.boot},
                        {"threshold", a.threshold},
                        {"min-tail", a.min_tail},
                        {"seed", a.seed},
                        {"serial", a.serial}});
    std::cout << "bursts: " << table.total_bursts << " bursts from " << users.size()
              << " users (delta=" << a.delta << ")\n";
    return 0;
}

int run_theory(const TheoryArgs& a) {
    const auto dir = prepare_out(a.out);
    hfbi::HfbiParams params;
    params.rounds = a.rounds;
    params.new_per_round = a.new_per_round;
    params.returning_per_round = a.returning;
    params.habit_weight = 1.0;

    hfbi::TheoryOptions opts;
    opts.n_runs = a.runs;
    opts.seed = a.seed;
    opts.n_boot = a.boot;
    opts.exec = a.exec();
    const auto check = hfbi::validate_theory(params, opts);
    hfbi::write_json(json(check), dir / "theory.json");

    write_manifest(dir, "theory",
                   json{{"rounds", a.rounds},
                        {"new", a.new_per_round},
                        {"returning", a.returning},
                        {"runs", a.runs},
                        {"boot", a.boot},
                        {"seed", a.seed},
                        {"serial", a.serial}});
    std::cout << "theory: predicted=" << hfbi::format_double(check.predicted_gamma)
              << " median_fit=" << hfbi::format_double(check.median_gamma)
              << " abs_error=" << hfbi::format_double(check.abs_error) << '\n';
    return 0;
}

int run_validate(const CommonArgs& a) {
    const auto log = hfbi::parse_csv(fs::path(a.input));
    const auto freqs = hfbi::frequency_sequence(log);
    json summary{{"schema", "log_summary"},
                 {"records", log.record_count()},
                 {"activities", log.activity_count()},
                 {"users", log.user_count()},
                 {"incentive_activities", log.incentive_count()},
                 {"max_user_count", *std::max_element(freqs.begin(), freqs.end())},
                 {"top20_share", hfbi::top_share(freqs, 0.2)}};
    if (a.out.empty()) {
        std::cout << summary.dump(2) << '\n';
    } else {
        const auto dir = prepare_out(a.out);
        hfbi::write_json(summary, dir / "summary.json");
        write_manifest(dir, "validate", json{{"input", a.input}});
        std::cout << "validate: ok (" << log.record_count() << " records)\n";
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_input, bool needs_out = true) {
    if (needs_input)
        cmd->add_option("--input", a.input, "participation log CSV")->required();
    auto* out = cmd->add_option("--out", a.out, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", a.seed, "master RNG seed")->capture_default_str();
    cmd->add_flag("--serial,!--no-serial", a.serial,
                  "run single-threaded (results are identical either way)");
}

void add_fit_knobs(CLI::App* cmd, int& boot, double& threshold, std::int64_t& min_tail) {
    cmd->add_option("--boot", boot, "bootstrap replicates per truncation point")
        ->capture_default_str();
    cmd->add_option("--threshold", threshold, "goodness-of-fit p-value threshold")
        ->capture_default_str();
    cmd->add_option("--min-tail", min_tail, "smallest usable tail size")->capture_default_str();
}

void add_node_knobs(CLI::App* cmd, bool& per_node, std::int64_t& population,
                    std::int64_t& stride) {
    cmd->add_flag("--per-node,!--no-per-node", per_node, "repeat per growth stage of the log");
    cmd->add_option("--population", population, "users required before the first stage")
        ->capture_default_str();
    cmd->add_option("--stride", stride, "activities between analysed stages")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and statistics toolkit for participation logs"};
    app.set_version_flag("--version", hfbi::kVersion);
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "fit a discrete power law to per-user counts");
    add_common(fit, fit_args, true);
    fit->add_option("--upto", fit_args.upto, "last activity id to include (-1 = all)")
        ->capture_default_str();
    add_fit_knobs(fit, fit_args.boot, fit_args.threshold, fit_args.min_tail);
    add_node_knobs(fit, fit_args.per_node, fit_args.population, fit_args.stride);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic participation log");
    add_common(sim, sim_args, false);
    sim->add_option("--rounds", sim_args.rounds, "number of activities")->required();
    sim->add_option("--new", sim_args.new_per_round, "new users per activity")->required();
    sim->add_option("--returning", sim_args.returning, "returning users per activity")
        ->required();
    sim->add_option("--alpha", sim_args.alpha, "habit weight in [0, 1]")->capture_default_str();
    sim->add_option("--kernel", sim_args.kernel, "inertia kernel: reciprocal | exponential")
        ->capture_default_str();

    CalibrateArgs cal_args;
    auto* cal = app.add_subcommand("calibrate", "grid-search the habit weight against a log");
    add_common(cal, cal_args, true);
    cal->add_option("--grid-step", cal_args.grid_step, "alpha grid spacing")
        ->capture_default_str();
    cal->add_option("--runs", cal_args.runs, "simulations per grid point")
        ->capture_default_str();
    cal->add_option("--kernel", cal_args.kernel, "inertia kernel: reciprocal | exponential")
        ->capture_default_str();
    add_node_knobs(cal, cal_args.per_node, cal_args.population, cal_args.stride);

    EvidenceArgs ev_args;
    auto* ev = app.add_subcommand("evidence", "propensity curves by history and by absence");
    add_common(ev, ev_args, true);
    ev->add_option("--window", ev_args.window, "smoothing window")->capture_default_str();

    BurstsArgs burst_args;
    auto* bursts = app.add_subcommand("bursts", "burst detection and incentive alignment");
    add_common(bursts, burst_args, true);
    bursts->add_option("--delta", burst_args.delta,
                       "burst threshold: in-burst gaps are strictly below this")
        ->capture_default_str();
    bursts->add_option("--min-count", burst_args.min_count,
                       "loyal scope: more than this many attendances")
        ->capture_default_str();
    bursts->add_option("--scope", burst_args.scope, "user scope: loyal | all")
        ->capture_default_str();
    bursts->add_flag("--fit-intervals,!--no-fit-intervals", burst_args.fit_intervals,
                     "also fit each user's gap distribution");
    add_fit_knobs(bursts, burst_args.boot, burst_args.threshold, burst_args.min_tail);

    TheoryArgs th_args;
    auto* th = app.add_subcommand("theory", "compare fitted exponents with 2 + new/returning");
    add_common(th, th_args, false);
    th->add_option("--rounds", th_args.rounds, "number of activities")->required();
    th->add_option("--new", th_args.new_per_round, "new users per activity")->required();
    th->add_option("--returning", th_args.returning, "returning users per activity")
        ->required();
    th->add_option("--runs", th_args.runs, "independent simulations")->capture_default_str();
    th->add_option("--boot", th_args.boot, "bootstrap replicates per truncation point")
        ->capture_default_str();

    CommonArgs val_args;
    auto* val = app.add_subcommand("validate", "check a log and print a summary");
    add_common(val, val_args, true, /*needs_out=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (fit->parsed()) return run_fit(fit_args);
        if (sim->parsed()) return run_simulate(sim_args);
        if (cal->parsed()) return run_calibrate(cal_args);
        if (ev->parsed()) return run_evidence(ev_args);
        if (bursts->parsed()) return run_bursts(burst_args);
        if (th->parsed()) return run_theory(th_args);
        if (val->parsed()) return run_validate(val_args);
    } catch (const hfbi::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const hfbi::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const hfbi::FitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
