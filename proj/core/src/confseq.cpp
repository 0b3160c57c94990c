#include "catoni/confseq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace catoni {

namespace {

void require_alpha_range(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha)) {
        throw std::domain_error("alpha must lie in (0, 1]");
    }
}

void require_same_alpha(double a, double b) {
    if (a != b) throw std::invalid_argument("mismatched alpha between state, spec and params");
}

double median_x(const CsState& state) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(state.size()));
    for (const auto& s : state.samples()) xs.push_back(s.x);
    const auto mid = xs.begin() + xs.size() / 2;
    std::nth_element(xs.begin(), mid, xs.end());
    return *mid;
}

// Root of the strictly decreasing influence sum at `target`. The bracket is
// centered at `seed` and grown by doubling until the target is straddled,
// then bisected; the point with the smallest residual seen is returned.
double solve_decreasing(const CsState& state, const InfluenceSpec& spec, double target,
                        double seed, double resid_tol) {
    const auto g = [&](double m) { return influence_sum(state, spec, m); };

    double radius = 1.0;
    double lo = seed - radius;
    double hi = seed + radius;
    double g_lo = g(lo);
    double g_hi = g(hi);
    int doublings = 0;
    while (g_lo < target || g_hi > target) {
        if (++doublings > 200) {
            throw std::runtime_error("interval: bracket expansion exceeded 200 doublings");
        }
        radius *= 2.0;
        if (g_lo < target) {
            lo = seed - radius;
            g_lo = g(lo);
        }
        if (g_hi > target) {
            hi = seed + radius;
            g_hi = g(hi);
        }
    }

    double best_m = lo;
    double best_res = std::abs(g_lo - target);
    if (std::abs(g_hi - target) < best_res) {
        best_m = hi;
        best_res = std::abs(g_hi - target);
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
        const double gm = g(mid);
        const double res = std::abs(gm - target);
        if (res < best_res) {
            best_res = res;
            best_m = mid;
        }
        if (gm >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (best_res <= resid_tol && hi - lo <= 1e-10 * (1.0 + std::abs(mid))) break;
    }
    return best_m;
}

}  // namespace

CsParams CsParams::defaults(double alpha, double nu_alpha, double delta) {
    require_alpha_range(alpha);
    // lambda = alpha is only admissible below 1; at alpha = 1 fall back to
    // the finite-variance setting lambda = 1/2.
    const double lambda = alpha < 1.0 ? alpha : 0.5;
    CsParams p{alpha, nu_alpha, delta, lambda, std::pow(4.0, -1.0 / alpha), 0.05};
    p.validate();
    return p;
}

void CsParams::validate() const {
    require_alpha_range(alpha);
    if (!(nu_alpha > 0.0) || !std::isfinite(nu_alpha)) {
        throw std::domain_error("nu_alpha must be positive and finite");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
    if (!(beta > 0.0) || !(beta < 1.0)) throw std::domain_error("beta must lie in (0, 1)");
    if (!(u > 0.0) || !(u < 1.0)) throw std::domain_error("u must lie in (0, 1)");
    if (!(lambda > 0.0) || !(lambda < 1.0 / alpha)) {
        throw std::domain_error("lambda must lie in (0, 1/alpha)");
    }
}

CsState::CsState(double alpha) : alpha_(alpha) {
    require_alpha_range(alpha);
}

void CsState::append(double x, double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::domain_error("append: theta must be positive and finite");
    }
    if (!std::isfinite(x)) throw std::domain_error("append: x must be finite");
    samples_.push_back(Sample{theta, x});
    sum_theta_ += theta;
    sum_theta_pow_ += pow_abs(theta, 1.0 + alpha_);
}

double influence_sum(const CsState& state, const InfluenceSpec& spec, double m) {
    require_same_alpha(state.alpha(), spec.alpha);
    double total = 0.0;
    for (const auto& s : state.samples()) total += psi(spec, s.theta * (s.x - m));
    return total;
}

double threshold(const CsState& state, const InfluenceSpec& spec, const CsParams& params) {
    require_same_alpha(state.alpha(), spec.alpha);
    require_same_alpha(spec.alpha, params.alpha);
    params.validate();
    return spec.c_alpha * params.nu_alpha * state.sum_theta_pow() + std::log(2.0 / params.delta);
}

double m_estimate(const CsState& state, const InfluenceSpec& spec) {
    if (state.size() < 1) throw std::domain_error("m_estimate: need at least one sample");
    return solve_decreasing(state, spec, 0.0, median_x(state), 1e-9);
}

ConfidenceInterval interval(const CsState& state, const InfluenceSpec& spec,
                            const CsParams& params, const ConfidenceInterval* warm) {
    if (state.size() < 1) throw std::domain_error("interval: need at least one sample");
    const double radius = threshold(state, spec, params);
    const double resid_tol = 1e-9 * (1.0 + radius);
    double seed_lower;
    double seed_upper;
    if (warm != nullptr) {
        seed_lower = warm->lower;
        seed_upper = warm->upper;
    } else {
        seed_lower = seed_upper = median_x(state);
    }
    const double upper = solve_decreasing(state, spec, -radius, seed_upper, resid_tol);
    const double lower = solve_decreasing(state, spec, radius, seed_lower, resid_tol);
    return ConfidenceInterval{lower, upper, state.size()};
}

WidthBound width_bound(const CsParams& params, std::span<const double> thetas) {
    params.validate();
    if (thetas.empty()) throw std::domain_error("width_bound: thetas must be nonempty");
    double sum_theta = 0.0;
    double sum_theta_pow = 0.0;
    for (const double th : thetas) {
        if (!(th > 0.0) || !std::isfinite(th)) {
            throw std::domain_error("width_bound: thetas must be positive and finite");
        }
        sum_theta += th;
        sum_theta_pow += pow_abs(th, 1.0 + params.alpha);
    }
    const double c = tight_coefficient(params.alpha);
    const double budget = std::log(2.0 / params.beta) + std::log(2.0 / params.delta);
    const double u_pow = 1.0 + std::pow(params.u, -params.alpha);
    const double lhs = std::pow(c, -1.0 / params.alpha) * (1.0 - params.u) *
                       std::pow(params.lambda, 1.0 / params.alpha) /
                       std::pow(1.0 + params.lambda, 1.0 + 1.0 / params.alpha) *
                       std::pow(sum_theta / sum_theta_pow, 1.0 + 1.0 / params.alpha);
    const double rhs = u_pow * c * params.nu_alpha + budget / sum_theta_pow;
    const double bound =
        2.0 * (1.0 + params.lambda) / sum_theta * (u_pow * c * params.nu_alpha * sum_theta_pow + budget);
    return WidthBound{lhs >= rhs, bound};
}

double theta_cs(std::int64_t t, const CsParams& params) {
    if (t < 1) throw std::domain_error("theta_cs: t must be >= 1");
    params.validate();
    const double c = tight_coefficient(params.alpha);
    const double den = params.alpha * c * params.nu_alpha *
                       (1.0 + std::pow(params.u, -params.alpha)) * static_cast<double>(t);
    return std::pow(std::log(2.0 / params.delta) / den, 1.0 / (1.0 + params.alpha));
}

double theta_ci(std::int64_t t, const CsParams& params) {
    if (t < 1) throw std::domain_error("theta_ci: t must be >= 1");
    params.validate();
    const double c = tight_coefficient(params.alpha);
    const double num = std::pow(params.u, params.alpha) * std::log(2.0 / params.delta);
    const double den = params.alpha * static_cast<double>(t) * c * params.nu_alpha;
    return std::pow(num / den, 1.0 / (1.0 + params.alpha));
}

double theta_wr(std::int64_t t, const CsParams& params) {
    if (t < 1) throw std::domain_error("theta_wr: t must be >= 1");
    params.validate();
    const double num = (1.0 + params.alpha) * std::log(2.0 / params.delta);
    return 0.5 * std::pow(num / (static_cast<double>(t) * params.nu_alpha), 1.0 / (1.0 + params.alpha));
}

double supermartingale_factor(const InfluenceSpec& spec, const CsParams& params, double theta,
                              double x, double mu) {
    require_same_alpha(spec.alpha, params.alpha);
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::domain_error("supermartingale_factor: theta must be positive and finite");
    }
    const double drift = pow_abs(theta, 1.0 + spec.alpha) * spec.c_alpha * params.nu_alpha;
    return std::exp(psi(spec, theta * (x - mu)) - drift);
}

}  // namespace catoni
