#include "catoni/stitching.hpp"

#include <cmath>
#include <stdexcept>

namespace catoni {

namespace {

constexpr double kEuler = 2.718281828459045235;

double delta_k(double delta, int k) {
    const double kk = static_cast<double>(k) + 2.0;
    return delta / (kk * kk);
}

InfluenceSpec variant_spec(StitchVariant variant, double alpha) {
    return variant == StitchVariant::Improved ? InfluenceSpec::tight(alpha)
                                              : InfluenceSpec::chen_wr(alpha);
}

}  // namespace

double stitch_l(const CsParams& params, StitchVariant variant) {
    params.validate();
    if (variant == StitchVariant::Improved) {
        return (1.0 + std::pow(params.u, -params.alpha)) * tight_coefficient(params.alpha) *
               params.nu_alpha;
    }
    return 5.0 * params.nu_alpha / (1.0 + params.alpha);
}

double epoch_theta(int k, const CsParams& params, StitchVariant variant) {
    if (k < 1) throw std::domain_error("epoch_theta: k must be >= 1");
    const double l = stitch_l(params, variant);
    const double num = 2.0 * std::log(2.0 / delta_k(params.delta, k));
    const double den = params.alpha * l * std::exp(static_cast<double>(k) + 1.0);
    return std::pow(num / den, 1.0 / (1.0 + params.alpha));
}

StitchEpoch epoch_of(std::int64_t t, const CsParams& params, StitchVariant variant) {
    if (t < 1) throw std::domain_error("epoch_of: t must be >= 1");
    const double td = static_cast<double>(t);
    // floor(log t), nudged so the exact comparisons t in [e^k, e^{k+1}) decide;
    // t = 1, 2 (below e) are folded into epoch 1.
    int k = t <= 2 ? 1 : static_cast<int>(std::floor(std::log(td)));
    if (k < 1) k = 1;
    while (k > 1 && td < std::exp(static_cast<double>(k))) --k;
    while (td >= std::exp(static_cast<double>(k) + 1.0)) ++k;
    return StitchEpoch{k, std::exp(static_cast<double>(k)), delta_k(params.delta, k),
                       epoch_theta(k, params, variant), variant};
}

ConfidenceInterval stitched_interval(const CsState& state, std::int64_t t, const CsParams& params,
                                     StitchVariant variant) {
    if (t < 1) throw std::domain_error("stitched_interval: t must be >= 1");
    if (t != state.size()) {
        throw std::invalid_argument("stitched_interval: t must equal the number of samples");
    }
    // The state must have been appended with the epoch schedule.
    int cached_k = 0;
    double cached_theta = 0.0;
    for (std::int64_t i = 1; i <= t; ++i) {
        const int k = epoch_of(i, params, variant).k;
        if (k != cached_k) {
            cached_k = k;
            cached_theta = epoch_theta(k, params, variant);
        }
        const double stored = state.samples()[static_cast<std::size_t>(i - 1)].theta;
        if (std::abs(stored - cached_theta) > 1e-12) {
            throw std::invalid_argument("stitched_interval: stored scales differ from the schedule");
        }
    }
    CsParams epoch_params = params;
    epoch_params.delta = epoch_of(t, params, variant).delta_k;
    return interval(state, variant_spec(variant, params.alpha), epoch_params);
}

double stitched_bound_constant(const CsParams& params) {
    params.validate();
    const double a = params.alpha;
    const double shape =
        a == 1.0 ? 1.0 : std::pow(1.0 - a, (1.0 - a) / (2.0 * (1.0 + a)));
    return std::pow(kEuler * params.nu_alpha, 1.0 / (1.0 + a)) * std::pow(2.0, a / (1.0 + a)) *
           shape * std::sqrt(1.0 + a);
}

double stitched_bound_constant_wr(const CsParams& params) {
    params.validate();
    const double a = params.alpha;
    return std::pow(5.0 * kEuler * params.nu_alpha, 1.0 / (1.0 + a)) *
           std::pow(2.0 / a, a / (1.0 + a)) * std::pow(1.0 + a, (2.0 * a + 1.0) / (1.0 + a));
}

double stitched_bound_rate(double t, double delta, double alpha) {
    if (!(t >= 1.0)) throw std::domain_error("stitched_bound_rate: t must be >= 1");
    const double num = 2.0 * std::log(std::log(t) + 2.0) + std::log(2.0 / delta);
    return std::pow(num / t, alpha / (1.0 + alpha));
}

double stitched_width_coefficient(const CsParams& params, StitchVariant variant) {
    if (variant == StitchVariant::Improved) {
        return 2.0 * (1.0 + params.lambda) *
               std::pow(1.0 + std::pow(params.u, -params.alpha), 1.0 / (1.0 + params.alpha)) *
               stitched_bound_constant(params);
    }
    return 2.0 * stitched_bound_constant_wr(params);
}

StitchedBound stitched_width_bound(std::int64_t t, const CsParams& params, StitchVariant variant) {
    const int k = epoch_of(t, params, variant).k;
    const double a = params.alpha;
    const double c = variant_spec(variant, a).c_alpha;
    // Explicit sample-size sufficiency condition; constants are spelled out,
    // so it doubles as a checkable stand-in for "t large enough".
    const double prefix = 2.0 * std::pow(c, 1.0 / a) / (1.0 - params.u) *
                          std::pow(1.0 + params.lambda, 1.0 + 1.0 / a) /
                          std::pow(params.lambda, 1.0 / a);
    const double inv_e = 1.0 / kEuler;
    const double needed =
        prefix * ((inv_e + 1.0) * std::log(1.0 / params.delta) +
                  (2.0 * inv_e + 1.0) * std::log(static_cast<double>(k) + 2.0) +
                  (inv_e + 2.0) * std::log(2.0));
    const double bound = stitched_width_coefficient(params, variant) *
                         stitched_bound_rate(static_cast<double>(t), params.delta, a);
    return StitchedBound{static_cast<double>(t) >= needed, bound};
}

bool schedule_inequality_holds(int k, std::int64_t t, const CsParams& params,
                               StitchVariant variant) {
    if (k < 1) throw std::domain_error("schedule_inequality_holds: k must be >= 1");
    const double a = params.alpha;
    const double l = stitch_l(params, variant);
    const double theta = epoch_theta(k, params, variant);
    const double td = static_cast<double>(t);
    const double lhs =
        (l * td * pow_abs(theta, 1.0 + a) + 2.0 * std::log(2.0 / delta_k(params.delta, k))) /
        (td * theta);
    const double rhs = (1.0 + a) * std::pow(2.0 / a, a / (1.0 + a)) *
                       std::pow(l * kEuler, 1.0 / (1.0 + a)) *
                       stitched_bound_rate(td, params.delta, a);
    return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace catoni
