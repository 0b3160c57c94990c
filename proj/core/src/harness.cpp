#include "catoni/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace catoni {

// --- names -------------------------------------------------------------------

std::string to_string(Method m) {
    switch (m) {
        case Method::Improved: return "Improved";
        case Method::WR: return "WR";
        case Method::ImprovedStitched: return "ImprovedStitched";
        case Method::WRStitched: return "WRStitched";
    }
    return "?";
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Figure1: return "figure1";
        case ExperimentKind::Table2: return "table2";
        case ExperimentKind::Figure2: return "figure2";
        case ExperimentKind::Coverage: return "coverage";
        case ExperimentKind::Slope: return "slope";
    }
    return "?";
}

std::string to_string(DistKind d) {
    switch (d) {
        case DistKind::CenteredPareto18: return "pareto18";
        case DistKind::StudentT2: return "t2";
    }
    return "?";
}

std::string to_string(ThetaRegime r) {
    switch (r) {
        case ThetaRegime::InvT: return "inv_t";
        case ThetaRegime::LogTOverTPow: return "logt_over_t_pow";
        case ThetaRegime::InvTPow: return "inv_t_pow";
        case ThetaRegime::InvTLogTPow: return "inv_t_logt_pow";
        case ThetaRegime::InvTLogTLogLogTPow: return "inv_t_logt_loglogt_pow";
    }
    return "?";
}

namespace {

std::string normalized(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '-' || c == ' ') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

Method parse_method(const std::string& s) {
    const std::string n = normalized(s);
    if (n == "improved") return Method::Improved;
    if (n == "wr") return Method::WR;
    if (n == "improvedstitched") return Method::ImprovedStitched;
    if (n == "wrstitched") return Method::WRStitched;
    throw std::invalid_argument("unknown method '" + s + "'");
}

ExperimentKind parse_experiment(const std::string& s) {
    const std::string n = normalized(s);
    if (n == "figure1") return ExperimentKind::Figure1;
    if (n == "table2") return ExperimentKind::Table2;
    if (n == "figure2") return ExperimentKind::Figure2;
    if (n == "coverage") return ExperimentKind::Coverage;
    if (n == "slope") return ExperimentKind::Slope;
    throw std::invalid_argument("unknown experiment '" + s + "'");
}

DistKind parse_dist(const std::string& s) {
    const std::string n = normalized(s);
    if (n == "pareto" || n == "pareto18" || n == "centeredpareto18") {
        return DistKind::CenteredPareto18;
    }
    if (n == "t2" || n == "studentt2") return DistKind::StudentT2;
    throw std::invalid_argument("unknown distribution '" + s + "'");
}

ThetaRegime parse_regime(const std::string& s) {
    const std::string n = normalized(s);
    if (n == "invt") return ThetaRegime::InvT;
    if (n == "logtovertpow") return ThetaRegime::LogTOverTPow;
    if (n == "invtpow") return ThetaRegime::InvTPow;
    if (n == "invtlogtpow") return ThetaRegime::InvTLogTPow;
    if (n == "invtlogtloglogtpow") return ThetaRegime::InvTLogTLogLogTPow;
    throw std::invalid_argument("unknown theta regime '" + s + "'");
}

// --- config ------------------------------------------------------------------

CsParams ExperimentConfig::params(double delta) const {
    CsParams p;
    p.alpha = alpha;
    p.nu_alpha = nu_alpha;
    p.delta = delta;
    p.lambda = lambda > 0.0 ? lambda : (alpha < 1.0 ? alpha : 0.5);
    p.u = u > 0.0 ? u : std::pow(4.0, -1.0 / alpha);
    p.beta = beta;
    p.validate();
    return p;
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (deltas.empty()) throw std::invalid_argument("delta list must be nonempty");
    for (double d : deltas) {
        if (!(d > 0.0) || !(d < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (ts.empty()) throw std::invalid_argument("t list must be nonempty");
    if (ts.front() < 1) throw std::invalid_argument("t values must be >= 1");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (ts[i] <= ts[i - 1]) throw std::invalid_argument("t list must be strictly increasing");
    }
    if (methods.empty()) throw std::invalid_argument("methods list must be nonempty");
    if (!(theta_scale > 0.0)) throw std::invalid_argument("theta_scale must be positive");
    if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    if (regimes.empty()) throw std::invalid_argument("regimes list must be nonempty");
    try {
        (void)params(deltas.front());
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(e.what());
    }
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string part =
            trimmed(comma == std::string::npos ? s.substr(start) : s.substr(start, comma - start));
        if (!part.empty()) parts.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

double parse_double_value(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed number '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
    return v;
}

std::int64_t parse_i64_value(const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed integer '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("malformed integer '" + s + "'");
    return v;
}

std::uint64_t parse_u64_value(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed unsigned integer '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("malformed unsigned integer '" + s + "'");
    return v;
}

void apply_config_entry(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "experiment") {
        c.experiment = parse_experiment(value);
    } else if (key == "distribution") {
        c.distribution = parse_dist(value);
    } else if (key == "alpha") {
        c.alpha = parse_double_value(value);
    } else if (key == "nu_alpha" || key == "nu") {
        c.nu_alpha = parse_double_value(value);
    } else if (key == "delta") {
        c.deltas.clear();
        for (const auto& part : split_list(value)) c.deltas.push_back(parse_double_value(part));
    } else if (key == "t") {
        c.ts.clear();
        for (const auto& part : split_list(value)) c.ts.push_back(parse_i64_value(part));
    } else if (key == "replications" || key == "reps") {
        c.replications = parse_i64_value(value);
    } else if (key == "master_seed" || key == "seed") {
        c.master_seed = parse_u64_value(value);
    } else if (key == "methods") {
        c.methods.clear();
        for (const auto& part : split_list(value)) c.methods.push_back(parse_method(part));
    } else if (key == "lambda") {
        c.lambda = parse_double_value(value);
    } else if (key == "u") {
        c.u = parse_double_value(value);
    } else if (key == "beta") {
        c.beta = parse_double_value(value);
    } else if (key == "tuning") {
        const std::string n = normalized(value);
        if (n == "cs") {
            c.tuning = Tuning::Cs;
        } else if (n == "ci") {
            c.tuning = Tuning::Ci;
        } else {
            throw std::invalid_argument("tuning must be 'cs' or 'ci'");
        }
    } else if (key == "regimes") {
        c.regimes.clear();
        for (const auto& part : split_list(value)) c.regimes.push_back(parse_regime(part));
    } else if (key == "theta_scale") {
        c.theta_scale = parse_double_value(value);
    } else if (key == "threads") {
        c.threads = static_cast<int>(parse_i64_value(value));
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

}  // namespace

void apply_config_file(ExperimentConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trimmed(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        try {
            apply_config_entry(config, trimmed(stripped.substr(0, eq)),
                               trimmed(stripped.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

// --- utilities ---------------------------------------------------------------

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::int64_t workers =
        std::min<std::int64_t>(threads > 0 ? threads : static_cast<std::int64_t>(hw), n);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<std::int64_t> log_spaced_ts(std::int64_t lo, std::int64_t hi, int per_decade) {
    if (lo < 1 || hi < lo || per_decade < 1) {
        throw std::invalid_argument("log_spaced_ts: need 1 <= lo <= hi and per_decade >= 1");
    }
    std::set<std::int64_t> grid{lo, hi};
    for (int k = 1;; ++k) {
        const double v = static_cast<double>(lo) *
                         std::pow(10.0, static_cast<double>(k) / static_cast<double>(per_decade));
        if (v >= static_cast<double>(hi)) break;
        grid.insert(static_cast<std::int64_t>(std::llround(v)));
    }
    return {grid.begin(), grid.end()};
}

// --- method plumbing ----------------------------------------------------------

InfluenceSpec method_spec(Method m, double alpha) {
    switch (m) {
        case Method::Improved:
        case Method::ImprovedStitched: return InfluenceSpec::tight(alpha);
        case Method::WR:
        case Method::WRStitched: return InfluenceSpec::chen_wr(alpha);
    }
    throw std::invalid_argument("method_spec: unknown method");
}

double method_theta(Method m, Tuning tuning, std::int64_t t, const CsParams& params) {
    switch (m) {
        case Method::Improved: return tuning == Tuning::Cs ? theta_cs(t, params) : theta_ci(t, params);
        case Method::WR: return 2.0 * theta_wr(t, params);  // undamped baseline sequence
        case Method::ImprovedStitched:
        case Method::WRStitched:
            throw std::invalid_argument("method_theta: stitched methods use the epoch schedule");
    }
    throw std::invalid_argument("method_theta: unknown method");
}

namespace {

StitchVariant stitch_variant_of(Method m) {
    if (m == Method::ImprovedStitched) return StitchVariant::Improved;
    if (m == Method::WRStitched) return StitchVariant::WR;
    throw std::invalid_argument("not a stitched method");
}

bool row_less(const ExperimentRow& a, const ExperimentRow& b) {
    return std::tuple(static_cast<int>(a.experiment), static_cast<int>(a.distribution),
                      static_cast<int>(a.method), a.delta, a.t, a.rep) <
           std::tuple(static_cast<int>(b.experiment), static_cast<int>(b.distribution),
                      static_cast<int>(b.method), b.delta, b.t, b.rep);
}

std::vector<ExperimentRow> gather_sorted(std::vector<std::vector<ExperimentRow>>& per_rep) {
    std::vector<ExperimentRow> rows;
    std::size_t total = 0;
    for (const auto& part : per_rep) total += part.size();
    rows.reserve(total);
    for (auto& part : per_rep) rows.insert(rows.end(), part.begin(), part.end());
    std::sort(rows.begin(), rows.end(), row_less);
    return rows;
}

// Walks the epoch schedule i = 1, 2, ... without recomputing epoch_of per step.
class EpochWalker {
public:
    EpochWalker(const CsParams& params, StitchVariant variant)
        : params_(params), variant_(variant) {}

    // scale and error level for time i; call with i = 1, 2, ... in order
    void advance(std::int64_t i) {
        const double id = static_cast<double>(i);
        while (id >= next_boundary_) {
            ++k_;
            next_boundary_ = std::exp(static_cast<double>(k_) + 1.0);
            fresh_ = true;
        }
        if (fresh_) {
            theta_ = epoch_theta(k_, params_, variant_);
            const double kk = static_cast<double>(k_) + 2.0;
            log_term_ = std::log(2.0 * kk * kk / params_.delta);
            fresh_ = false;
        }
    }

    int k() const { return k_; }
    double theta() const { return theta_; }
    double log_term() const { return log_term_; }  // log(2/delta_k)

private:
    CsParams params_;
    StitchVariant variant_;
    int k_ = 1;
    double next_boundary_ = std::exp(2.0);
    bool fresh_ = true;
    double theta_ = 0.0;
    double log_term_ = 0.0;
};

}  // namespace

// --- experiments --------------------------------------------------------------

std::vector<ExperimentRow> run_width_experiment(const ExperimentConfig& config) {
    config.validate();
    for (Method m : config.methods) {
        if (m != Method::Improved && m != Method::WR) {
            throw std::invalid_argument("run_width_experiment: methods must be Improved or WR");
        }
    }
    const std::int64_t max_t = config.ts.back();
    std::vector<std::vector<ExperimentRow>> per_rep(static_cast<std::size_t>(config.replications));
    parallel_for(config.replications, config.threads, [&](std::int64_t rep) {
        StreamRng rng(SeedSpec{config.master_seed, static_cast<std::uint64_t>(rep)});
        const std::uint64_t seed = rng.stream_seed();
        std::vector<double> xs(static_cast<std::size_t>(max_t));
        for (auto& x : xs) x = sample_one(config.distribution, rng);

        auto& out = per_rep[static_cast<std::size_t>(rep)];
        for (double delta : config.deltas) {
            const CsParams params = config.params(delta);
            for (Method m : config.methods) {
                const InfluenceSpec spec = method_spec(m, config.alpha);
                CsState state(config.alpha);
                ConfidenceInterval last{0.0, 0.0, 0};
                bool have_last = false;
                std::size_t next_idx = 0;
                for (std::int64_t t = 1; t <= max_t; ++t) {
                    state.append(xs[static_cast<std::size_t>(t - 1)],
                                 method_theta(m, config.tuning, t, params));
                    if (next_idx < config.ts.size() && t == config.ts[next_idx]) {
                        last = interval(state, spec, params, have_last ? &last : nullptr);
                        have_last = true;
                        out.push_back(ExperimentRow{config.experiment, config.distribution, m,
                                                    config.alpha, config.nu_alpha, delta, t, rep,
                                                    seed, last.lower, last.upper, last.width()});
                        ++next_idx;
                    }
                }
            }
        }
    });
    return gather_sorted(per_rep);
}

std::vector<ExperimentRow> run_stitched_experiment(const ExperimentConfig& config) {
    config.validate();
    for (Method m : config.methods) {
        if (m != Method::ImprovedStitched && m != Method::WRStitched) {
            throw std::invalid_argument(
                "run_stitched_experiment: methods must be ImprovedStitched or WRStitched");
        }
    }
    const std::int64_t max_t = config.ts.back();
    std::vector<std::vector<ExperimentRow>> per_rep(static_cast<std::size_t>(config.replications));
    parallel_for(config.replications, config.threads, [&](std::int64_t rep) {
        StreamRng rng(SeedSpec{config.master_seed, static_cast<std::uint64_t>(rep)});
        const std::uint64_t seed = rng.stream_seed();
        std::vector<double> xs(static_cast<std::size_t>(max_t));
        for (auto& x : xs) x = sample_one(config.distribution, rng);

        auto& out = per_rep[static_cast<std::size_t>(rep)];
        for (double delta : config.deltas) {
            const CsParams params = config.params(delta);
            for (Method m : config.methods) {
                const StitchVariant variant = stitch_variant_of(m);
                CsState state(config.alpha);
                EpochWalker walker(params, variant);
                std::size_t next_idx = 0;
                for (std::int64_t t = 1; t <= max_t; ++t) {
                    walker.advance(t);
                    state.append(xs[static_cast<std::size_t>(t - 1)], walker.theta());
                    if (next_idx < config.ts.size() && t == config.ts[next_idx]) {
                        const ConfidenceInterval ci = stitched_interval(state, t, params, variant);
                        out.push_back(ExperimentRow{config.experiment, config.distribution, m,
                                                    config.alpha, config.nu_alpha, delta, t, rep,
                                                    seed, ci.lower, ci.upper, ci.width()});
                        ++next_idx;
                    }
                }
            }
        }
    });
    return gather_sorted(per_rep);
}

bool anytime_covered(std::span<const double> xs, Method method, const CsParams& params, double mu,
                     Tuning tuning) {
    params.validate();
    const InfluenceSpec spec = method_spec(method, params.alpha);
    const bool stitched = method == Method::ImprovedStitched || method == Method::WRStitched;
    double psi_sum = 0.0;
    double pow_sum = 0.0;
    if (!stitched) {
        const double log_term = std::log(2.0 / params.delta);
        for (std::int64_t t = 1; t <= static_cast<std::int64_t>(xs.size()); ++t) {
            const double theta = method_theta(method, tuning, t, params);
            psi_sum += psi(spec, theta * (xs[static_cast<std::size_t>(t - 1)] - mu));
            pow_sum += pow_abs(theta, 1.0 + params.alpha);
            if (std::abs(psi_sum) > spec.c_alpha * params.nu_alpha * pow_sum + log_term) {
                return false;
            }
        }
        return true;
    }
    EpochWalker walker(params, stitch_variant_of(method));
    for (std::int64_t t = 1; t <= static_cast<std::int64_t>(xs.size()); ++t) {
        walker.advance(t);
        psi_sum += psi(spec, walker.theta() * (xs[static_cast<std::size_t>(t - 1)] - mu));
        pow_sum += pow_abs(walker.theta(), 1.0 + params.alpha);
        if (std::abs(psi_sum) > spec.c_alpha * params.nu_alpha * pow_sum + walker.log_term()) {
            return false;
        }
    }
    return true;
}

CoverageReport run_coverage_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.replications < 100) {
        throw std::invalid_argument("run_coverage_experiment: replications must be >= 100");
    }
    const std::int64_t horizon = config.ts.back();

    // When the configured moment bound is below the distribution's true
    // moment, report both runs so the broken-assumption case is visible.
    std::vector<double> nus{config.nu_alpha};
    try {
        const double oracle = central_moment(config.distribution, 1.0 + config.alpha);
        if (oracle > config.nu_alpha) nus.push_back(oracle);
    } catch (const std::domain_error&) {
        // moment of this order does not exist; nothing to compare against
    }

    struct CellKey {
        Method method;
        double delta;
        double nu;
    };
    std::vector<CellKey> keys;
    for (double delta : config.deltas) {
        for (Method m : config.methods) {
            for (double nu : nus) keys.push_back(CellKey{m, delta, nu});
        }
    }

    std::vector<std::vector<std::uint8_t>> covered(
        keys.size(), std::vector<std::uint8_t>(static_cast<std::size_t>(config.replications), 0));
    parallel_for(config.replications, config.threads, [&](std::int64_t rep) {
        StreamRng rng(SeedSpec{config.master_seed, static_cast<std::uint64_t>(rep)});
        std::vector<double> xs(static_cast<std::size_t>(horizon));
        for (auto& x : xs) x = sample_one(config.distribution, rng);
        for (std::size_t c = 0; c < keys.size(); ++c) {
            ExperimentConfig tweaked = config;
            tweaked.nu_alpha = keys[c].nu;
            const CsParams params = tweaked.params(keys[c].delta);
            covered[c][static_cast<std::size_t>(rep)] =
                anytime_covered(xs, keys[c].method, params, 0.0, config.tuning) ? 1 : 0;
        }
    });

    const double z = 1.959963984540054;
    CoverageReport report{horizon, {}};
    for (std::size_t c = 0; c < keys.size(); ++c) {
        std::int64_t hits = 0;
        for (std::uint8_t v : covered[c]) hits += v;
        const double n = static_cast<double>(config.replications);
        const double p = static_cast<double>(hits) / n;
        const double denom = 1.0 + z * z / n;
        const double center = p + z * z / (2.0 * n);
        const double spread = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
        report.cells.push_back(CoverageCell{keys[c].method, keys[c].delta, keys[c].nu,
                                            config.replications, hits, p,
                                            (center - spread) / denom, (center + spread) / denom});
    }
    return report;
}

double regime_theta(ThetaRegime regime, double alpha, double scale, std::int64_t t) {
    if (t < 1) throw std::domain_error("regime_theta: t must be >= 1");
    const double td = static_cast<double>(t);
    const double p = 1.0 / (1.0 + alpha);
    switch (regime) {
        case ThetaRegime::InvT: return scale / td;
        case ThetaRegime::LogTOverTPow: return scale * std::pow(std::log(td + 1.0) / td, p);
        case ThetaRegime::InvTPow: return scale * std::pow(1.0 / td, p);
        case ThetaRegime::InvTLogTPow:
            return scale * std::pow(1.0 / (td * std::log(td + 1.0)), p);
        case ThetaRegime::InvTLogTLogLogTPow:
            return scale *
                   std::pow(1.0 / (td * std::log(td + 1.0) * std::log(std::log(td + 2.0))), p);
    }
    throw std::domain_error("regime_theta: unknown regime");
}

SlopeReport run_slope_experiment(const ExperimentConfig& config) {
    config.validate();
    const double decades = std::log10(static_cast<double>(config.ts.back()) /
                                      static_cast<double>(config.ts.front()));
    if (decades < 3.0 - 1e-9) {
        throw std::invalid_argument("run_slope_experiment: t grid must span at least 3 decades");
    }
    const std::int64_t max_t = config.ts.back();
    const CsParams params = config.params(config.deltas.front());
    const InfluenceSpec spec = InfluenceSpec::tight(config.alpha);

    SlopeReport report;
    for (ThetaRegime regime : config.regimes) {
        std::vector<std::vector<double>> widths(
            static_cast<std::size_t>(config.replications),
            std::vector<double>(config.ts.size(), 0.0));
        parallel_for(config.replications, config.threads, [&](std::int64_t rep) {
            StreamRng rng(SeedSpec{config.master_seed, static_cast<std::uint64_t>(rep)});
            std::vector<double> xs(static_cast<std::size_t>(max_t));
            for (auto& x : xs) x = sample_one(config.distribution, rng);
            CsState state(config.alpha);
            ConfidenceInterval last{0.0, 0.0, 0};
            bool have_last = false;
            std::size_t next_idx = 0;
            for (std::int64_t t = 1; t <= max_t; ++t) {
                state.append(xs[static_cast<std::size_t>(t - 1)],
                             regime_theta(regime, config.alpha, config.theta_scale, t));
                if (next_idx < config.ts.size() && t == config.ts[next_idx]) {
                    last = interval(state, spec, params, have_last ? &last : nullptr);
                    have_last = true;
                    widths[static_cast<std::size_t>(rep)][next_idx] = last.width();
                    ++next_idx;
                }
            }
        });

        SlopeFit fit{regime, config.alpha, 0.0, 0.0, 0.0, {}};
        std::vector<double> log_t;
        std::vector<double> log_w;
        for (std::size_t j = 0; j < config.ts.size(); ++j) {
            double mean = 0.0;
            for (std::int64_t r = 0; r < config.replications; ++r) {
                mean += widths[static_cast<std::size_t>(r)][j];
            }
            mean /= static_cast<double>(config.replications);
            fit.mean_widths.emplace_back(config.ts[j], mean);
            const double td = static_cast<double>(config.ts[j]);
            log_t.push_back(std::log(td));
            // the 1/log t family is flattened before fitting
            log_w.push_back(regime == ThetaRegime::InvT ? std::log(mean * std::log(td))
                                                        : std::log(mean));
        }
        const double n = static_cast<double>(log_t.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t j = 0; j < log_t.size(); ++j) {
            sx += log_t[j];
            sy += log_w[j];
            sxx += log_t[j] * log_t[j];
            sxy += log_t[j] * log_w[j];
            syy += log_w[j] * log_w[j];
        }
        const double cov = sxy - sx * sy / n;
        const double var_x = sxx - sx * sx / n;
        const double var_y = syy - sy * sy / n;
        fit.slope = cov / var_x;
        fit.intercept = (sy - fit.slope * sx) / n;
        fit.r2 = var_y > 0.0 ? cov * cov / (var_x * var_y) : 1.0;
        report.fits.push_back(std::move(fit));
    }
    return report;
}

// --- output -------------------------------------------------------------------

namespace {

std::string format_full(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

double printed_value(double v) {
    const std::string s = format_double(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

void write_rows_csv(std::ostream& os, std::span<const ExperimentRow> rows) {
    os << "experiment,distribution,method,alpha,nu_alpha,delta,t,rep,seed,lower,upper,width\n";
    for (const auto& r : rows) {
        os << to_string(r.experiment) << ',' << to_string(r.distribution) << ','
           << to_string(r.method) << ',' << format_double(r.alpha) << ','
           << format_double(r.nu_alpha) << ',' << format_double(r.delta) << ',' << r.t << ','
           << r.rep << ',' << r.seed << ',' << format_double(r.lower) << ','
           << format_double(r.upper) << ',' << format_double(r.width) << '\n';
    }
}

namespace {

struct GroupKey {
    int distribution;
    int method;
    double alpha;
    double nu;
    double delta;
    std::int64_t t;

    static GroupKey of(const ExperimentRow& r) {
        return GroupKey{static_cast<int>(r.distribution), static_cast<int>(r.method), r.alpha,
                        r.nu_alpha, r.delta, r.t};
    }
    bool operator<(const GroupKey& o) const {
        return std::tie(distribution, method, alpha, nu, delta, t) <
               std::tie(o.distribution, o.method, o.alpha, o.nu, o.delta, o.t);
    }
    bool operator==(const GroupKey& o) const {
        return std::tie(distribution, method, alpha, nu, delta, t) ==
               std::tie(o.distribution, o.method, o.alpha, o.nu, o.delta, o.t);
    }
};

// Aggregates run over the printed width values, so everything here is
// exactly recomputable from the rows CSV.
template <class Emit>
void for_each_group(std::span<const ExperimentRow> rows, const Emit& emit) {
    std::vector<std::pair<GroupKey, const ExperimentRow*>> tagged;
    tagged.reserve(rows.size());
    for (const auto& r : rows) tagged.emplace_back(GroupKey::of(r), &r);
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t i = 0;
    while (i < tagged.size()) {
        std::size_t j = i;
        std::vector<double> widths;
        while (j < tagged.size() && tagged[j].first == tagged[i].first) {
            widths.push_back(printed_value(tagged[j].second->width));
            ++j;
        }
        emit(*tagged[i].second, widths);
        i = j;
    }
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile_of(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double rank = q * static_cast<double>(v.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(rank));
    if (idx > 0) --idx;
    if (idx >= v.size()) idx = v.size() - 1;
    return v[idx];
}

}  // namespace

std::vector<SummaryRow> summarize_rows(std::span<const ExperimentRow> rows) {
    std::vector<SummaryRow> out;
    for_each_group(rows, [&](const ExperimentRow& proto, const std::vector<double>& widths) {
        out.push_back(SummaryRow{proto.distribution, proto.method, proto.alpha, proto.nu_alpha,
                                 proto.delta, proto.t, static_cast<std::int64_t>(widths.size()),
                                 mean_of(widths), median_of(widths)});
    });
    return out;
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
    os << "distribution,method,alpha,nu_alpha,delta,t,reps,mean_width,median_width\n";
    for (const auto& r : rows) {
        os << to_string(r.distribution) << ',' << to_string(r.method) << ','
           << format_double(r.alpha) << ',' << format_double(r.nu_alpha) << ','
           << format_double(r.delta) << ',' << r.t << ',' << r.replications << ','
           << format_full(r.mean_width) << ',' << format_full(r.median_width) << '\n';
    }
}

std::vector<FigurePoint> figure_points(std::span<const ExperimentRow> rows) {
    std::vector<FigurePoint> out;
    for_each_group(rows, [&](const ExperimentRow& proto, const std::vector<double>& widths) {
        out.push_back(FigurePoint{proto.distribution, proto.method, proto.delta, proto.t,
                                  static_cast<std::int64_t>(widths.size()), mean_of(widths),
                                  percentile_of(widths, 0.1), percentile_of(widths, 0.9)});
    });
    return out;
}

void write_figure_csv(std::ostream& os, std::span<const FigurePoint> points) {
    os << "distribution,method,delta,t,reps,mean_width,p10_width,p90_width\n";
    for (const auto& p : points) {
        os << to_string(p.distribution) << ',' << to_string(p.method) << ','
           << format_double(p.delta) << ',' << p.t << ',' << p.replications << ','
           << format_full(p.mean_width) << ',' << format_full(p.p10_width) << ','
           << format_full(p.p90_width) << '\n';
    }
}

void write_coverage_csv(std::ostream& os, const CoverageReport& report) {
    os << "method,delta,nu_alpha,horizon,reps,covered,rate,wilson_lo,wilson_hi\n";
    for (const auto& c : report.cells) {
        os << to_string(c.method) << ',' << format_double(c.delta) << ','
           << format_double(c.nu_alpha) << ',' << report.horizon << ',' << c.replications << ','
           << c.covered << ',' << format_full(c.rate) << ',' << format_full(c.wilson_lo) << ','
           << format_full(c.wilson_hi) << '\n';
    }
}

void write_slope_csv(std::ostream& os, const SlopeReport& report) {
    os << "regime,alpha,slope,intercept,r2,points\n";
    for (const auto& f : report.fits) {
        os << to_string(f.regime) << ',' << format_double(f.alpha) << ',' << format_full(f.slope)
           << ',' << format_full(f.intercept) << ',' << format_full(f.r2) << ','
           << f.mean_widths.size() << '\n';
    }
}

void write_slope_widths_csv(std::ostream& os, const SlopeReport& report) {
    os << "regime,alpha,t,mean_width\n";
    for (const auto& f : report.fits) {
        for (const auto& [t, w] : f.mean_widths) {
            os << to_string(f.regime) << ',' << format_double(f.alpha) << ',' << t << ','
               << format_full(w) << '\n';
        }
    }
}

}  // namespace catoni
