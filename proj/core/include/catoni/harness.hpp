#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catoni/confseq.hpp"
#include "catoni/distributions.hpp"
#include "catoni/stitching.hpp"

namespace catoni {

enum class Method { Improved, WR, ImprovedStitched, WRStitched };
enum class ExperimentKind { Figure1, Table2, Figure2, Coverage, Slope };

/// Scale tuning used by the Improved method in width experiments.
enum class Tuning { Cs, Ci };

/// Scale sequences whose width shrinkage rates the slope study measures.
enum class ThetaRegime {
    InvT,               ///< theta ~ 1/t
    LogTOverTPow,       ///< theta ~ ((log t)/t)^{1/(1+alpha)}
    InvTPow,            ///< theta ~ (1/t)^{1/(1+alpha)}
    InvTLogTPow,        ///< theta ~ (1/(t log t))^{1/(1+alpha)}
    InvTLogTLogLogTPow  ///< theta ~ (1/(t log t loglog t))^{1/(1+alpha)}
};

std::string to_string(Method m);
std::string to_string(ExperimentKind k);
std::string to_string(DistKind d);
std::string to_string(ThetaRegime r);
Method parse_method(const std::string& s);
ExperimentKind parse_experiment(const std::string& s);
DistKind parse_dist(const std::string& s);
ThetaRegime parse_regime(const std::string& s);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Table2;
    DistKind distribution = DistKind::CenteredPareto18;
    double alpha = 0.5;
    double nu_alpha = 5.0;
    std::vector<double> deltas{0.05};
    std::vector<std::int64_t> ts{100, 1000, 10000};
    std::int64_t replications = 200;
    std::uint64_t master_seed = 1;
    std::vector<Method> methods{Method::Improved, Method::WR};
    double lambda = -1.0;  ///< < 0 means the default lambda = alpha
    double u = -1.0;       ///< < 0 means the default u = 4^{-1/alpha}
    double beta = 0.05;
    Tuning tuning = Tuning::Cs;
    std::vector<ThetaRegime> regimes{ThetaRegime::InvT, ThetaRegime::LogTOverTPow,
                                     ThetaRegime::InvTPow, ThetaRegime::InvTLogTPow,
                                     ThetaRegime::InvTLogTLogLogTPow};
    double theta_scale = 0.05;  ///< proportionality constant of slope regimes
    int threads = 0;            ///< 0 = hardware concurrency

    /// CsParams at a given error level, with lambda/u defaults resolved.
    CsParams params(double delta) const;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Applies `key = value` lines from a flat config file ('#' starts a
/// comment). Keys mirror the field names above; lists are comma-separated.
/// Throws std::invalid_argument on unknown keys or malformed values and a
/// std::runtime_error on unreadable files.
void apply_config_file(ExperimentConfig& config, const std::string& path);

struct ExperimentRow {
    ExperimentKind experiment;
    DistKind distribution;
    Method method;
    double alpha;
    double nu_alpha;
    double delta;
    std::int64_t t;
    std::int64_t rep;
    std::uint64_t seed;
    double lower;
    double upper;
    double width;
};

/// Influence spec and per-step scale of a non-stitched method. The WR
/// method runs with the undamped baseline sequence, i.e. 2 * theta_wr.
InfluenceSpec method_spec(Method m, double alpha);
double method_theta(Method m, Tuning tuning, std::int64_t t, const CsParams& params);

/// Widths of the running intervals at the configured times, one stream per
/// replication, methods paired on the same stream. Rows come back sorted by
/// (experiment, distribution, method, delta, t, rep).
std::vector<ExperimentRow> run_width_experiment(const ExperimentConfig& config);

/// Same protocol with the epoch schedules and per-epoch error levels.
std::vector<ExperimentRow> run_stitched_experiment(const ExperimentConfig& config);

struct CoverageCell {
    Method method;
    double delta;
    double nu_alpha;
    std::int64_t replications;
    std::int64_t covered;  ///< streams with mu inside the interval at every t
    double rate;
    double wilson_lo;
    double wilson_hi;
};

struct CoverageReport {
    std::int64_t horizon;
    std::vector<CoverageCell> cells;
};

/// True when mu lies in the method's interval at every t <= xs.size().
/// Runs in O(|xs|); the interval endpoints are never materialized.
bool anytime_covered(std::span<const double> xs, Method method, const CsParams& params, double mu,
                     Tuning tuning = Tuning::Cs);

/// Empirical anytime coverage per (method, delta) with Wilson bands. When
/// the configured nu_alpha is below the distribution's true moment (the
/// moment oracle decides), each cell is reported twice: once as configured
/// and once with the oracle value, so the invalid-assumption run is visible.
CoverageReport run_coverage_experiment(const ExperimentConfig& config);

struct SlopeFit {
    ThetaRegime regime;
    double alpha;
    double slope;
    double intercept;
    double r2;
    std::vector<std::pair<std::int64_t, double>> mean_widths;
};

struct SlopeReport {
    std::vector<SlopeFit> fits;
};

/// Per-step scale of a slope regime: theta_scale * rate(t), with logs
/// shifted (log(t+1), loglog(t+2)) so every t >= 1 gets a positive scale.
double regime_theta(ThetaRegime regime, double alpha, double scale, std::int64_t t);

/// Mean realized width on the configured time grid for each regime, plus a
/// log-log least-squares fit. The InvT regime fits log(width * log t)
/// against log t (its width shrinks like 1/log t); all others fit
/// log(width) against log t.
SlopeReport run_slope_experiment(const ExperimentConfig& config);

// --- output ----------------------------------------------------------------

/// Shortest round-trip decimal with 6 significant digits (locale-independent).
std::string format_double(double v);

/// The value a reader of the CSV reconstructs from format_double(v).
/// Aggregates are computed over these, so every summary statistic is exactly
/// recomputable from the written rows.
double printed_value(double v);

void write_rows_csv(std::ostream& os, std::span<const ExperimentRow> rows);

struct SummaryRow {
    DistKind distribution;
    Method method;
    double alpha;
    double nu_alpha;
    double delta;
    std::int64_t t;
    std::int64_t replications;
    double mean_width;
    double median_width;
};

std::vector<SummaryRow> summarize_rows(std::span<const ExperimentRow> rows);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

struct FigurePoint {
    DistKind distribution;
    Method method;
    double delta;
    std::int64_t t;
    std::int64_t replications;
    double mean_width;
    double p10_width;
    double p90_width;
};

std::vector<FigurePoint> figure_points(std::span<const ExperimentRow> rows);
void write_figure_csv(std::ostream& os, std::span<const FigurePoint> points);

void write_coverage_csv(std::ostream& os, const CoverageReport& report);
void write_slope_csv(std::ostream& os, const SlopeReport& report);
void write_slope_widths_csv(std::ostream& os, const SlopeReport& report);

// --- small utilities --------------------------------------------------------

/// Runs body(0..n-1) across threads; results must go to per-index slots.
/// Rethrows the first worker exception.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body);

/// Strictly increasing log-spaced integer grid from lo to hi inclusive.
std::vector<std::int64_t> log_spaced_ts(std::int64_t lo, std::int64_t hi, int per_decade);

}  // namespace catoni
