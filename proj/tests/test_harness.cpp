#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "catoni/harness.hpp"
#include "doctest.h"

using namespace catoni;
using doctest::Approx;

namespace {

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
    std::ostringstream os;
    write_rows_csv(os, rows);
    return os.str();
}

ExperimentConfig small_width_config() {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Figure1;
    cfg.distribution = DistKind::CenteredPareto18;
    cfg.deltas = {0.05, 0.2};
    cfg.ts = {20, 50};
    cfg.replications = 12;
    cfg.master_seed = 77;
    cfg.methods = {Method::Improved, Method::WR};
    return cfg;
}

}  // namespace

TEST_CASE("name round trips") {
    for (Method m : {Method::Improved, Method::WR, Method::ImprovedStitched, Method::WRStitched}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK(parse_dist("pareto") == DistKind::CenteredPareto18);
    CHECK(parse_dist("t2") == DistKind::StudentT2);
    CHECK(parse_experiment("table2") == ExperimentKind::Table2);
    CHECK(parse_regime("inv_t_pow") == ThetaRegime::InvTPow);
    CHECK_THROWS_AS((void)parse_method("bogus"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_dist("cauchy"), std::invalid_argument);
}

TEST_CASE("config validation names the offending field") {
    ExperimentConfig cfg = small_width_config();
    cfg.replications = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), "replications must be >= 1", std::invalid_argument);
    cfg = small_width_config();
    cfg.ts = {50, 50};
    CHECK_THROWS_WITH_AS(cfg.validate(), "t list must be strictly increasing",
                         std::invalid_argument);
    cfg = small_width_config();
    cfg.deltas = {1.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_width_config();
    cfg.theta_scale = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    // method/experiment pairing
    cfg = small_width_config();
    cfg.methods = {Method::ImprovedStitched};
    CHECK_THROWS_AS((void)run_width_experiment(cfg), std::invalid_argument);
    cfg.methods = {Method::Improved};
    CHECK_THROWS_AS((void)run_stitched_experiment(cfg), std::invalid_argument);
    cfg = small_width_config();
    cfg.replications = 50;
    CHECK_THROWS_AS((void)run_coverage_experiment(cfg), std::invalid_argument);
}

TEST_CASE("config file parsing") {
    const std::string path = "test_harness_config.tmp";
    {
        std::ofstream out(path);
        out << "# demo config\n"
            << "experiment = coverage\n"
            << "distribution = t2\n"
            << "alpha = 0.5\n"
            << "nu = 1.0   # alias for nu_alpha\n"
            << "delta = 0.05, 0.2\n"
            << "t = 100, 1000\n"
            << "reps = 150\n"
            << "seed = 99\n"
            << "methods = Improved, WRStitched\n"
            << "lambda = 0.4\n"
            << "u = 0.1\n"
            << "beta = 0.1\n"
            << "tuning = ci\n"
            << "theta_scale = 0.07\n"
            << "threads = 2\n";
    }
    ExperimentConfig cfg;
    apply_config_file(cfg, path);
    CHECK(cfg.experiment == ExperimentKind::Coverage);
    CHECK(cfg.distribution == DistKind::StudentT2);
    CHECK(cfg.nu_alpha == 1.0);
    CHECK(cfg.deltas == std::vector<double>{0.05, 0.2});
    CHECK(cfg.ts == std::vector<std::int64_t>{100, 1000});
    CHECK(cfg.replications == 150);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.methods == std::vector<Method>{Method::Improved, Method::WRStitched});
    CHECK(cfg.lambda == 0.4);
    CHECK(cfg.u == 0.1);
    CHECK(cfg.beta == 0.1);
    CHECK(cfg.tuning == Tuning::Ci);
    CHECK(cfg.theta_scale == 0.07);
    CHECK(cfg.threads == 2);

    {
        std::ofstream out(path);
        out << "bogus = 1\n";
    }
    try {
        apply_config_file(cfg, path);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << "alpha 0.5\n";
    }
    CHECK_THROWS_AS(apply_config_file(cfg, path), std::invalid_argument);
    std::remove(path.c_str());
    CHECK_THROWS_AS(apply_config_file(cfg, "does_not_exist.cfg"), std::runtime_error);
}

TEST_CASE("float formatting is six significant digits with exact re-parse") {
    CHECK(format_double(0.123456789) == "0.123457");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(-1.0681234e-07) == "-1.06812e-07");
    CHECK(printed_value(0.123456789) == 0.123457);
    CHECK(printed_value(printed_value(0.73279123)) == printed_value(0.73279123));
}

TEST_CASE("log spaced grid") {
    const auto ts = log_spaced_ts(10, 10000, 4);
    CHECK(ts.front() == 10);
    CHECK(ts.back() == 10000);
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
    CHECK(ts.size() >= 12);
    CHECK_THROWS_AS((void)log_spaced_ts(0, 10, 3), std::invalid_argument);
}

TEST_CASE("width experiment output is deterministic and schedule-independent") {
    const ExperimentConfig cfg = small_width_config();
    const auto rows1 = run_width_experiment(cfg);
    const auto rows2 = run_width_experiment(cfg);
    CHECK(rows_to_csv(rows1) == rows_to_csv(rows2));

    ExperimentConfig serial = cfg;
    serial.threads = 1;
    ExperimentConfig wide = cfg;
    wide.threads = 4;
    CHECK(rows_to_csv(run_width_experiment(serial)) == rows_to_csv(run_width_experiment(wide)));

    // rows are keyed by the stream id alone: a shorter run is a prefix
    ExperimentConfig prefix = cfg;
    prefix.replications = 5;
    const auto few = run_width_experiment(prefix);
    std::vector<ExperimentRow> filtered;
    for (const auto& r : rows1) {
        if (r.rep < 5) filtered.push_back(r);
    }
    CHECK(rows_to_csv(few) == rows_to_csv(filtered));

    // schema line and sort order
    const std::string csv = rows_to_csv(rows1);
    CHECK(csv.rfind("experiment,distribution,method,alpha,nu_alpha,delta,t,rep,seed,lower,upper,"
                    "width\n", 0) == 0);
}

TEST_CASE("summary aggregates are recomputable from the written rows") {
    const auto rows = run_width_experiment(small_width_config());
    const auto summary = summarize_rows(rows);
    CHECK(!summary.empty());

    // parse the rows CSV back and recompute mean/median per group
    std::istringstream in(rows_to_csv(rows));
    std::string line;
    std::getline(in, line);  // header
    std::map<std::string, std::vector<double>> groups;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            cols.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        REQUIRE(cols.size() == 12);
        groups[cols[1] + '|' + cols[2] + '|' + cols[5] + '|' + cols[6]].push_back(
            std::stod(cols[11]));
    }
    for (const auto& s : summary) {
        const std::string key = to_string(s.distribution) + '|' + to_string(s.method) + '|' +
                                format_double(s.delta) + '|' + std::to_string(s.t);
        REQUIRE(groups.count(key) == 1);
        const auto& widths = groups[key];
        CHECK(static_cast<std::int64_t>(widths.size()) == s.replications);
        double mean = 0.0;
        for (double w : widths) mean += w;
        mean /= static_cast<double>(widths.size());
        auto sorted = widths;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median =
            n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        CHECK(s.mean_width == Approx(mean).epsilon(1e-12));
        CHECK(s.median_width == Approx(median).epsilon(1e-12));
    }
}

TEST_CASE("stitched experiment output is deterministic across schedules") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Figure2;
    cfg.distribution = DistKind::StudentT2;
    cfg.nu_alpha = 1.0;
    cfg.deltas = {0.05};
    cfg.ts = {10, 40, 200};
    cfg.replications = 6;
    cfg.master_seed = 55;
    cfg.methods = {Method::ImprovedStitched, Method::WRStitched};
    ExperimentConfig wide = cfg;
    wide.threads = 4;
    CHECK(rows_to_csv(run_stitched_experiment(cfg)) ==
          rows_to_csv(run_stitched_experiment(wide)));
}

TEST_CASE("anytime coverage of a degenerate stream is exact") {
    const CsParams params = CsParams::defaults(0.5, 5.0, 0.05);
    const std::vector<double> zeros(500, 0.0);
    for (Method m : {Method::Improved, Method::WR, Method::ImprovedStitched, Method::WRStitched}) {
        CHECK(anytime_covered(zeros, m, params, 0.0));
    }
    const std::vector<double> twos(500, 2.0);
    CHECK(anytime_covered(twos, Method::Improved, params, 2.0));
    CHECK_FALSE(anytime_covered(zeros, Method::Improved, params, 50.0));
}

TEST_CASE("coverage experiment report") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Coverage;
    cfg.distribution = DistKind::CenteredPareto18;
    cfg.deltas = {0.5};
    cfg.ts = {300};
    cfg.replications = 100;
    cfg.master_seed = 11;
    cfg.methods = {Method::Improved};
    const auto report = run_coverage_experiment(cfg);
    REQUIRE(report.cells.size() == 1);
    const auto& cell = report.cells.front();
    CHECK(report.horizon == 300);
    CHECK(cell.rate >= 0.47);  // 0.5 guarantee minus Monte-Carlo slack
    CHECK(cell.wilson_lo <= cell.rate);
    CHECK(cell.rate <= cell.wilson_hi);
    CHECK(cell.wilson_lo >= 0.0);
    CHECK(cell.wilson_hi <= 1.0);

    // a t2 run with the nominal bound below the true moment reports both
    ExperimentConfig t2cfg = cfg;
    t2cfg.distribution = DistKind::StudentT2;
    t2cfg.nu_alpha = 1.0;
    t2cfg.deltas = {0.05};
    t2cfg.ts = {200};
    const auto dual = run_coverage_experiment(t2cfg);
    REQUIRE(dual.cells.size() == 2);
    CHECK(dual.cells[0].nu_alpha == 1.0);
    CHECK(dual.cells[1].nu_alpha == Approx(3.1181694995108225).epsilon(1e-8));

    std::ostringstream os;
    write_coverage_csv(os, dual);
    CHECK(os.str().rfind("method,delta,nu_alpha,horizon,reps,covered,rate,wilson_lo,wilson_hi\n",
                         0) == 0);
}

TEST_CASE("slope regime scales") {
    for (ThetaRegime r :
         {ThetaRegime::InvT, ThetaRegime::LogTOverTPow, ThetaRegime::InvTPow,
          ThetaRegime::InvTLogTPow, ThetaRegime::InvTLogTLogLogTPow}) {
        CHECK(regime_theta(r, 0.5, 0.05, 1) > 0.0);
        CHECK(regime_theta(r, 0.5, 0.05, 1000000) > 0.0);
        CHECK(regime_theta(r, 0.5, 0.05, 1000000) < regime_theta(r, 0.5, 0.05, 100));
    }
    CHECK(regime_theta(ThetaRegime::InvTPow, 0.5, 0.05, 1000) ==
          Approx(0.05 * std::pow(1000.0, -2.0 / 3.0)).epsilon(1e-14));

    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Slope;
    cfg.ts = {100, 1000};  // spans under three decades
    cfg.replications = 2;
    CHECK_THROWS_AS((void)run_slope_experiment(cfg), std::invalid_argument);
}

TEST_CASE("stitched runs sit above the plain improved sequence at moderate t") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::Figure2;
    cfg.distribution = DistKind::CenteredPareto18;
    cfg.deltas = {0.05};
    cfg.ts = log_spaced_ts(10, 20000, 5);
    cfg.replications = 10;
    cfg.master_seed = 21;
    cfg.methods = {Method::ImprovedStitched, Method::WRStitched};
    const auto stitched = figure_points(run_stitched_experiment(cfg));

    ExperimentConfig plain = cfg;
    plain.methods = {Method::Improved};
    const auto improved = figure_points(run_width_experiment(plain));

    std::map<std::int64_t, double> imp_st;
    std::map<std::int64_t, double> wr_st;
    std::map<std::int64_t, double> imp;
    for (const auto& p : stitched) {
        (p.method == Method::ImprovedStitched ? imp_st : wr_st)[p.t] = p.mean_width;
    }
    for (const auto& p : improved) imp[p.t] = p.mean_width;

    for (const auto& [t, w] : imp_st) {
        if (t >= 100) CHECK(w < wr_st.at(t));           // improved schedule stays tighter
        if (t <= 10000) CHECK(w > imp.at(t));           // stitching costs width at desk scales
    }
}
