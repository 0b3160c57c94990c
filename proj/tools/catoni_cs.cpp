// Command-line front end: reproduces the width/coverage/slope experiments and
// evaluates the running confidence sequence on piped data.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "catoni/harness.hpp"

namespace fs = std::filesystem;
using namespace catoni;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double default_nu(DistKind d) {
    return d == DistKind::CenteredPareto18 ? 5.0 : 1.0;
}

std::vector<DistKind> parse_dist_selection(const std::string& s) {
    if (s == "both") return {DistKind::CenteredPareto18, DistKind::StudentT2};
    return {parse_dist(s)};
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open output file: " + path.string());
    writer(os);
    os.flush();
    if (!os) throw IoError("error while writing: " + path.string());
}

fs::path prepare_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory: " + out);
    return {out};
}

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "results";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::int64_t reps = 0;
    int threads = -1;
};

// Precedence for the master seed: --seed flag > config file > CS_SEED > built-in.
ExperimentConfig base_config(const GlobalArgs& g) {
    ExperimentConfig cfg;
    cfg.master_seed = kDefaultSeed;
    if (const char* env = std::getenv("CS_SEED")) {
        try {
            std::size_t used = 0;
            cfg.master_seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("CS_SEED must be an unsigned 64-bit integer");
        }
    }
    if (!g.config_path.empty()) apply_config_file(cfg, g.config_path);
    if (g.seed_given) cfg.master_seed = g.seed;
    if (g.reps > 0) cfg.replications = g.reps;
    if (g.threads >= 0) cfg.threads = g.threads;
    if (g.format != "csv") throw std::invalid_argument("--format: only 'csv' is supported");
    return cfg;
}

void run_width_like(const GlobalArgs& g, ExperimentKind kind, const std::string& dist_sel,
                    double nu_override, std::int64_t tmin, std::int64_t tmax, int per_decade,
                    bool stitched) {
    const fs::path out = prepare_out_dir(g.out_dir);
    for (DistKind dist : parse_dist_selection(dist_sel)) {
        ExperimentConfig cfg = base_config(g);
        cfg.experiment = kind;
        cfg.distribution = dist;
        cfg.nu_alpha = nu_override > 0.0 ? nu_override : default_nu(dist);
        cfg.deltas = {0.05};
        cfg.ts = log_spaced_ts(tmin, tmax, per_decade);
        cfg.methods = stitched ? std::vector<Method>{Method::ImprovedStitched, Method::WRStitched}
                               : std::vector<Method>{Method::Improved, Method::WR};
        const auto rows = stitched ? run_stitched_experiment(cfg) : run_width_experiment(cfg);
        const std::string stem = to_string(kind) + "_" + to_string(dist);
        write_file(out / (stem + ".csv"),
                   [&](std::ostream& os) { write_figure_csv(os, figure_points(rows)); });
        write_file(out / (stem + "_rows.csv"),
                   [&](std::ostream& os) { write_rows_csv(os, rows); });
        std::cout << "wrote " << (out / (stem + ".csv")).string() << " and raw rows\n";
    }
}

void run_table2(const GlobalArgs& g, const std::string& dist_sel, double nu_override) {
    const fs::path out = prepare_out_dir(g.out_dir);
    for (DistKind dist : parse_dist_selection(dist_sel)) {
        ExperimentConfig cfg = base_config(g);
        cfg.experiment = ExperimentKind::Table2;
        cfg.distribution = dist;
        cfg.nu_alpha = nu_override > 0.0 ? nu_override : default_nu(dist);
        cfg.deltas = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
        cfg.ts = {100, 1000, 10000};
        cfg.methods = {Method::Improved, Method::WR};
        const auto rows = run_width_experiment(cfg);
        const std::string stem = "table2_" + to_string(dist);
        write_file(out / (stem + ".csv"), [&](std::ostream& os) { write_rows_csv(os, rows); });
        write_file(out / (stem + "_summary.csv"),
                   [&](std::ostream& os) { write_summary_csv(os, summarize_rows(rows)); });
        std::cout << "wrote " << (out / (stem + ".csv")).string() << " and summary\n";
    }
}

void run_coverage(const GlobalArgs& g, const std::string& dist_sel, double nu_override,
                  std::vector<double> deltas, std::int64_t horizon,
                  const std::vector<std::string>& method_names) {
    const fs::path out = prepare_out_dir(g.out_dir);
    for (DistKind dist : parse_dist_selection(dist_sel)) {
        ExperimentConfig cfg = base_config(g);
        cfg.experiment = ExperimentKind::Coverage;
        cfg.distribution = dist;
        cfg.nu_alpha = nu_override > 0.0 ? nu_override : default_nu(dist);
        if (g.reps <= 0) cfg.replications = 400;
        cfg.deltas = std::move(deltas);
        cfg.ts = {horizon};
        cfg.methods.clear();
        for (const auto& name : method_names) cfg.methods.push_back(parse_method(name));
        const CoverageReport report = run_coverage_experiment(cfg);
        const std::string stem = "coverage_" + to_string(dist);
        write_file(out / (stem + ".csv"),
                   [&](std::ostream& os) { write_coverage_csv(os, report); });
        std::cout << "wrote " << (out / (stem + ".csv")).string() << '\n';
    }
}

void run_slope(const GlobalArgs& g, const std::string& dist_sel, double nu_override, double alpha,
               double scale, std::int64_t tmin, std::int64_t tmax,
               const std::vector<std::string>& regime_names) {
    const fs::path out = prepare_out_dir(g.out_dir);
    for (DistKind dist : parse_dist_selection(dist_sel)) {
        ExperimentConfig cfg = base_config(g);
        cfg.experiment = ExperimentKind::Slope;
        cfg.distribution = dist;
        cfg.alpha = alpha;
        cfg.nu_alpha = nu_override > 0.0 ? nu_override : default_nu(dist);
        if (g.reps <= 0) cfg.replications = 10;
        cfg.theta_scale = scale;
        cfg.ts = log_spaced_ts(tmin, tmax, 4);
        if (!regime_names.empty()) {
            cfg.regimes.clear();
            for (const auto& name : regime_names) cfg.regimes.push_back(parse_regime(name));
        }
        const SlopeReport report = run_slope_experiment(cfg);
        const std::string stem = "slope_" + to_string(dist);
        write_file(out / (stem + ".csv"), [&](std::ostream& os) { write_slope_csv(os, report); });
        write_file(out / (stem + "_widths.csv"),
                   [&](std::ostream& os) { write_slope_widths_csv(os, report); });
        std::cout << "wrote " << (out / (stem + ".csv")).string() << " and widths\n";
    }
}

void run_interval(double alpha, double nu, double delta, double lambda, double u,
                  const std::string& variant, const std::string& tuning_name,
                  const std::string& input_path) {
    CsParams params;
    params.alpha = alpha;
    params.nu_alpha = nu;
    params.delta = delta;
    params.lambda = lambda > 0.0 ? lambda : alpha;
    params.u = u > 0.0 ? u : std::pow(4.0, -1.0 / alpha);
    params.validate();

    Method method = Method::Improved;
    Tuning tuning = Tuning::Cs;
    if (variant == "wr") {
        method = Method::WR;
    } else if (variant != "improved") {
        throw std::invalid_argument("--variant must be 'improved' or 'wr'");
    }
    if (tuning_name == "ci") {
        tuning = Tuning::Ci;
    } else if (tuning_name != "cs") {
        throw std::invalid_argument("--tuning must be 'cs' or 'ci'");
    }

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!input_path.empty() && input_path != "-") {
        file.open(input_path);
        if (!file) throw IoError("cannot open input file: " + input_path);
        in = &file;
    }

    const InfluenceSpec spec = method_spec(method, alpha);
    CsState state(alpha);
    ConfidenceInterval last{0.0, 0.0, 0};
    bool have_last = false;
    std::string token;
    while (*in >> token) {
        double x = 0.0;
        try {
            std::size_t used = 0;
            x = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed number in input: '" + token + "'");
        }
        const std::int64_t t = state.size() + 1;
        state.append(x, method_theta(method, tuning, t, params));
        last = interval(state, spec, params, have_last ? &last : nullptr);
        have_last = true;
        std::cout << t << ',' << format_double(last.lower) << ',' << format_double(last.upper)
                  << ',' << format_double(last.width()) << '\n';
    }
    if (in->bad()) throw IoError("error while reading input");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anytime-valid confidence sequences for heavy-tailed means"};
    app.require_subcommand(1);

    app.fallthrough();  // let global flags appear after the subcommand

    GlobalArgs g;
    app.add_option("--config", g.config_path, "flat key = value config file");
    app.add_option("--seed", g.seed, "master seed (overrides config file and CS_SEED)")
        ->each([&](const std::string&) { g.seed_given = true; });
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--reps", g.reps, "number of replications");
    app.add_option("--format", g.format, "output format")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");

    std::string dist_sel = "both";
    double nu_override = -1.0;

    auto* fig1 = app.add_subcommand("figure1", "running-width comparison of both methods");
    std::int64_t f1_tmin = 10, f1_tmax = 10000;
    int f1_per_decade = 8;
    fig1->add_option("--dist", dist_sel, "pareto | t2 | both")->capture_default_str();
    fig1->add_option("--nu", nu_override, "override the moment bound");
    fig1->add_option("--tmin", f1_tmin)->capture_default_str();
    fig1->add_option("--tmax", f1_tmax)->capture_default_str();
    fig1->add_option("--per-decade", f1_per_decade)->capture_default_str();

    auto* tab2 = app.add_subcommand("table2", "width growth as delta shrinks");
    tab2->add_option("--dist", dist_sel, "pareto | t2 | both")->capture_default_str();
    tab2->add_option("--nu", nu_override, "override the moment bound");

    auto* fig2 = app.add_subcommand("figure2", "stitched running-width comparison");
    std::int64_t f2_tmin = 10, f2_tmax = 30000;
    int f2_per_decade = 6;
    fig2->add_option("--dist", dist_sel, "pareto | t2 | both")->capture_default_str();
    fig2->add_option("--nu", nu_override, "override the moment bound");
    fig2->add_option("--tmin", f2_tmin)->capture_default_str();
    fig2->add_option("--tmax", f2_tmax)->capture_default_str();
    fig2->add_option("--per-decade", f2_per_decade)->capture_default_str();

    auto* cov = app.add_subcommand("coverage", "anytime coverage audit");
    std::vector<double> cov_deltas{0.05, 0.2};
    std::int64_t cov_horizon = 2000;
    std::vector<std::string> cov_methods{"Improved", "WR", "ImprovedStitched", "WRStitched"};
    cov->add_option("--dist", dist_sel, "pareto | t2 | both")->capture_default_str();
    cov->add_option("--nu", nu_override, "override the moment bound");
    cov->add_option("--delta", cov_deltas, "error levels")->delimiter(',');
    cov->add_option("--horizon", cov_horizon)->capture_default_str();
    cov->add_option("--methods", cov_methods)->delimiter(',');

    auto* slope = app.add_subcommand("slope", "width shrinkage rates per scale regime");
    double slope_alpha = 0.5, slope_scale = 0.05;
    std::int64_t slope_tmin = 100, slope_tmax = 1000000;
    std::vector<std::string> slope_regimes;
    slope->add_option("--dist", dist_sel, "pareto | t2 | both")->capture_default_str();
    slope->add_option("--nu", nu_override, "override the moment bound");
    slope->add_option("--alpha", slope_alpha)->capture_default_str();
    slope->add_option("--scale", slope_scale, "theta proportionality constant")
        ->capture_default_str();
    slope->add_option("--tmin", slope_tmin)->capture_default_str();
    slope->add_option("--tmax", slope_tmax)->capture_default_str();
    slope->add_option("--regimes", slope_regimes, "subset of regimes")->delimiter(',');

    auto* itv = app.add_subcommand("interval", "running CS over numbers from a file or stdin");
    double i_alpha = 0.0, i_nu = 0.0, i_delta = 0.0, i_lambda = -1.0, i_u = -1.0;
    std::string i_variant = "improved", i_tuning = "cs", i_input;
    itv->add_option("--alpha", i_alpha, "tail exponent in (0,1]")->required();
    itv->add_option("--nu", i_nu, "bound on the (1+alpha) central moment")->required();
    itv->add_option("--delta", i_delta, "error level")->required();
    itv->add_option("--lambda", i_lambda);
    itv->add_option("--u", i_u);
    itv->add_option("--variant", i_variant, "improved | wr")->capture_default_str();
    itv->add_option("--tuning", i_tuning, "cs | ci")->capture_default_str();
    itv->add_option("file", i_input, "input file ('-' or absent = stdin)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(fig1)) {
            run_width_like(g, ExperimentKind::Figure1, dist_sel, nu_override, f1_tmin, f1_tmax,
                           f1_per_decade, false);
        } else if (app.got_subcommand(tab2)) {
            run_table2(g, dist_sel, nu_override);
        } else if (app.got_subcommand(fig2)) {
            run_width_like(g, ExperimentKind::Figure2, dist_sel, nu_override, f2_tmin, f2_tmax,
                           f2_per_decade, true);
        } else if (app.got_subcommand(cov)) {
            run_coverage(g, dist_sel, nu_override, cov_deltas, cov_horizon, cov_methods);
        } else if (app.got_subcommand(slope)) {
            run_slope(g, dist_sel, nu_override, slope_alpha, slope_scale, slope_tmin, slope_tmax,
                      slope_regimes);
        } else if (app.got_subcommand(itv)) {
            run_interval(i_alpha, i_nu, i_delta, i_lambda, i_u, i_variant, i_tuning, i_input);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
