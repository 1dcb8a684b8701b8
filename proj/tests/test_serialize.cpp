#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "hfbi/errors.hpp"
#include "hfbi/serialize.hpp"
#include "test_util.hpp"

using namespace hfbi;
using nlohmann::json;

TEST_SUITE("serialize") {

TEST_CASE("every document carries its schema tag and fields") {
    PowerLawFit fit;
    fit.gamma = 2.5;
    fit.x_min = 4;
    fit.ks_stat = 0.03125;
    fit.p_value = 0.42;
    fit.n_tail = 123;
    fit.n_total = 456;
    fit.seed = 99;
    fit.n_boot = 1000;
    const json jf = fit;
    CHECK(jf.at("schema") == "powerlaw_fit");
    CHECK(jf.at("gamma") == 2.5);
    CHECK(jf.at("x_min") == 4);
    CHECK(jf.at("ks_stat") == 0.03125);
    CHECK(jf.at("p_value") == 0.42);
    CHECK(jf.at("n_tail") == 123);
    CHECK(jf.at("n_total") == 456);
    CHECK(jf.at("seed") == 99);
    CHECK(jf.at("n_boot") == 1000);

    TwoSampleKs ks;
    ks.d = 0.25;
    ks.p_value = 0.125;
    ks.n_a = 10;
    ks.n_b = 20;
    const json jk = ks;
    CHECK(jk.at("schema") == "two_sample_ks");
    CHECK(jk.at("d") == 0.25);
    CHECK(jk.at("n_b") == 20);

    HfbiParams params;
    params.rounds = 7;
    params.new_per_round = 2;
    params.returning_per_round = 3;
    params.habit_weight = 0.75;
    params.kernel = InertiaKernel::Exponential;
    const json jp = params;
    CHECK(jp.at("schema") == "hfbi_params");
    CHECK(jp.at("rounds") == 7);
    CHECK(jp.at("kernel") == "exponential");

    BurstTable table;
    table.delta = 8;
    table.total_bursts = 4;
    table.count_by_position[-1] = 2;
    table.count_by_position[0] = 1;
    table.count_by_position[2] = 1;
    table.share_first = 0.25;
    table.share_two = 0.25;
    table.share_three = 0.5;
    const json jt = table;
    CHECK(jt.at("schema") == "burst_table");
    CHECK(jt.at("count_by_position") == json::array({{-1, 2}, {0, 1}, {2, 1}}));
    CHECK(jt.at("share_three") == 0.5);

    TheoryCheck check;
    check.params = params;
    check.predicted_gamma = 3.0;
    check.fitted_gammas = {2.9, 3.1, 3.0};
    check.median_gamma = 3.0;
    check.abs_error = 0.0;
    const json jc = check;
    CHECK(jc.at("schema") == "theory_check");
    CHECK(jc.at("params").at("schema") == "hfbi_params");
    CHECK(jc.at("fitted_gammas").size() == 3);
}

TEST_CASE("format_double round-trips bitwise") {
    // strtod instead of stod: stod throws on subnormals such as 5e-324
    const auto reparse = [](double v) { return std::strtod(format_double(v).c_str(), nullptr); };
    for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-9, 12345.678, 6.0221408e23,
                     5e-324, 0.75, 123456789.0}) {
        CAPTURE(v);
        CHECK(reparse(v) == v);
    }
    Rng rng(606);
    for (int rep = 0; rep < 200; ++rep) {
        const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform01() * 20 - 10);
        CAPTURE(v);
        CHECK(reparse(v) == v);
    }
    // integral doubles keep a decimal point so the type survives re-parsing
    CHECK(format_double(2.0) == "2.0");
}

TEST_CASE("json files end with a newline and parse back") {
    test_util::TempDir dir("json");
    const auto path = dir.path() / "doc.json";
    const json doc = {{"schema", "demo"}, {"value", 0.1}};
    write_json(doc, path);
    const auto text = test_util::slurp(path);
    REQUIRE(!text.empty());
    CHECK(text.back() == '\n');
    CHECK(json::parse(text) == doc);
}

TEST_CASE("csv writers emit exact headers and rows") {
    test_util::TempDir dir("csv");

    const auto ccdf_path = dir.path() / "ccdf.csv";
    write_ccdf_csv({{1, 1.0}, {2, 0.25}}, ccdf_path);
    CHECK(test_util::slurp(ccdf_path) == "x,fraction\n1,1.0\n2,0.25\n");

    const auto lorenz_path = dir.path() / "lorenz.csv";
    write_lorenz_csv({{0.5, 0.125}, {1.0, 1.0}}, lorenz_path);
    CHECK(test_util::slurp(lorenz_path) ==
          "population_share,activity_share\n0.5,0.125\n1.0,1.0\n");

    const auto prop_path = dir.path() / "prop.csv";
    write_propensity_csv({{1, 3, 5, 0.6}, {2, 1, 2, 0.5}}, "history", prop_path);
    CHECK(test_util::slurp(prop_path) ==
          "history,participated,exposed,proportion\n1,3,5,0.6\n2,1,2,0.5\n");

    Burst b;
    b.user_id = 7;
    b.activity_ids = {10, 11, 13};
    b.first_incentive_position = 2;
    const auto bursts_path = dir.path() / "bursts.csv";
    write_bursts_csv({b}, bursts_path);
    CHECK(test_util::slurp(bursts_path) ==
          "user_id,start_activity,end_activity,length,first_incentive_position\n"
          "7,10,13,3,2\n");

    NodeFit node;
    node.upto = 30;
    node.users = 155;
    node.fit.gamma = 2.5;
    node.fit.x_min = 2;
    node.fit.ks_stat = 0.0625;
    node.fit.p_value = 0.5;
    node.fit.n_tail = 40;
    const auto nodes_path = dir.path() / "nodes.csv";
    write_node_fits_csv({node}, nodes_path);
    CHECK(test_util::slurp(nodes_path) ==
          "upto,users,gamma,x_min,ks_stat,p_value,n_tail\n30,155,2.5,2,0.0625,0.5,40\n");

    NodeCalibration nc;
    nc.upto = 12;
    nc.users = 60;
    nc.best_alpha = 0.75;
    nc.best_mean_p = 0.5;
    const auto nc_path = dir.path() / "node_cal.csv";
    write_node_calibration_csv({nc}, nc_path);
    CHECK(test_util::slurp(nc_path) == "upto,users,best_alpha,best_mean_p\n12,60,0.75,0.5\n");

    IntervalFit iv;
    iv.user_id = 4;
    iv.fit = node.fit;
    iv.fit.n_total = 80;
    const auto iv_path = dir.path() / "intervals.csv";
    write_interval_fits_csv({iv}, iv_path);
    CHECK(test_util::slurp(iv_path) ==
          "user_id,gamma,x_min,ks_stat,p_value,n_tail,n_total\n4,2.5,2,0.0625,0.5,40,80\n");
}

TEST_CASE("unwritable destinations raise errors") {
    CHECK_THROWS_AS(write_json(json{{"k", 1}}, "/nonexistent_dir_zz/x.json"), Error);
    CHECK_THROWS_AS(write_ccdf_csv({}, "/nonexistent_dir_zz/x.csv"), Error);
}

}  // TEST_SUITE
