#include "hfbi/serialize.hpp"

#include <fstream>

#include "hfbi/errors.hpp"

namespace hfbi {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const PowerLawFit& fit) {
    j = nlohmann::json{{"schema", "powerlaw_fit"}, {"gamma", fit.gamma},
                       {"x_min", fit.x_min},       {"ks_stat", fit.ks_stat},
                       {"p_value", fit.p_value},   {"n_tail", fit.n_tail},
                       {"n_total", fit.n_total},   {"seed", fit.seed},
                       {"n_boot", fit.n_boot}};
}

void to_json(nlohmann::json& j, const TwoSampleKs& ks) {
    j = nlohmann::json{{"schema", "two_sample_ks"},
                       {"d", ks.d},
                       {"p_value", ks.p_value},
                       {"n_a", ks.n_a},
                       {"n_b", ks.n_b}};
}

void to_json(nlohmann::json& j, const HfbiParams& params) {
    j = nlohmann::json{{"schema", "hfbi_params"},
                       {"rounds", params.rounds},
                       {"new_per_round", params.new_per_round},
                       {"returning_per_round", params.returning_per_round},
                       {"habit_weight", params.habit_weight},
                       {"kernel", to_string(params.kernel)}};
}

void to_json(nlohmann::json& j, const AlphaCalibration& cal) {
    j = nlohmann::json{{"schema", "alpha_calibration"},
                       {"grid", cal.grid},
                       {"mean_p", cal.mean_p},
                       {"run_p", cal.run_p},
                       {"best_alpha", cal.best_alpha},
                       {"best_mean_p", cal.best_mean_p},
                       {"runs", cal.runs},
                       {"kernel", to_string(cal.kernel)},
                       {"seed", cal.seed}};
}

void to_json(nlohmann::json& j, const BurstTable& table) {
    auto positions = nlohmann::json::array();
    for (const auto& [pos, count] : table.count_by_position)
        positions.push_back(nlohmann::json::array({pos, count}));
    j = nlohmann::json{{"schema", "burst_table"},
                       {"delta", table.delta},
                       {"total_bursts", table.total_bursts},
                       {"count_by_position", positions},
                       {"share_first", table.share_first},
                       {"share_two", table.share_two},
                       {"share_three", table.share_three}};
}

void to_json(nlohmann::json& j, const TheoryCheck& check) {
    j = nlohmann::json{{"schema", "theory_check"},
                       {"params", check.params},
                       {"predicted_gamma", check.predicted_gamma},
                       {"fitted_gammas", check.fitted_gammas},
                       {"median_gamma", check.median_gamma},
                       {"abs_error", check.abs_error}};
}

std::string format_double(double v) { return nlohmann::json(v).dump(); }

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

void write_ccdf_csv(const std::vector<CcdfPoint>& points, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x,fraction\n";
    for (const auto& p : points) out << p.x << ',' << format_double(p.fraction) << '\n';
    finish(out, path);
}

void write_lorenz_csv(const std::vector<LorenzPoint>& points,
                      const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "population_share,activity_share\n";
    for (const auto& p : points)
        out << format_double(p.population_share) << ',' << format_double(p.activity_share)
            << '\n';
    finish(out, path);
}

void write_propensity_csv(const std::vector<PropensityPoint>& curve, const std::string& x_name,
                          const std::filesystem::path& path) {
    auto out = open_out(path);
    out << x_name << ",participated,exposed,proportion\n";
    for (const auto& p : curve)
        out << p.x << ',' << p.participated << ',' << p.exposed << ','
            << format_double(p.proportion) << '\n';
    finish(out, path);
}

void write_node_fits_csv(const std::vector<NodeFit>& nodes, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "upto,users,gamma,x_min,ks_stat,p_value,n_tail\n";
    for (const auto& n : nodes)
        out << n.upto << ',' << n.users << ',' << format_double(n.fit.gamma) << ','
            << n.fit.x_min << ',' << format_double(n.fit.ks_stat) << ','
            << format_double(n.fit.p_value) << ',' << n.fit.n_tail << '\n';
    finish(out, path);
}

void write_node_calibration_csv(const std::vector<NodeCalibration>& nodes,
                                const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "upto,users,best_alpha,best_mean_p\n";
    for (const auto& n : nodes)
        out << n.upto << ',' << n.users << ',' << format_double(n.best_alpha) << ','
            << format_double(n.best_mean_p) << '\n';
    finish(out, path);
}

void write_bursts_csv(const std::vector<Burst>& bursts, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "user_id,start_activity,end_activity,length,first_incentive_position\n";
    for (const auto& b : bursts)
        out << b.user_id << ',' << b.activity_ids.front() << ',' << b.activity_ids.back() << ','
            << b.activity_ids.size() << ',' << b.first_incentive_position << '\n';
    finish(out, path);
}

void write_interval_fits_csv(const std::vector<IntervalFit>& fits,
                             const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "user_id,gamma,x_min,ks_stat,p_value,n_tail,n_total\n";
    for (const auto& f : fits)
        out << f.user_id << ',' << format_double(f.fit.gamma) << ',' << f.fit.x_min << ','
            << format_double(f.fit.ks_stat) << ',' << format_double(f.fit.p_value) << ','
            << f.fit.n_tail << ',' << f.fit.n_total << '\n';
    finish(out, path);
}

}  // namespace hfbi
