#include "catoni/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "catoni/quadrature.hpp"

namespace catoni {

namespace {

constexpr double kParetoShape = 1.8;
constexpr double kParetoShift = 2.25;  // 9/4; support of the centered variable is [-5/4, inf)
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

double t2_density(double x) {
    // standard t_2 normalizer 1/(2 sqrt 2)
    return 0.35355339059327373 * std::pow(1.0 + 0.5 * x * x, -1.5);
}

}  // namespace

StreamRng::StreamRng(SeedSpec seed) noexcept {
    state_ = mix64(seed.master_seed + kGamma) ^ mix64(seed.stream_id + 0xD1B54A32D192ED03ULL);
    seed_ = state_;
}

std::uint64_t StreamRng::next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
}

double StreamRng::uniform01() noexcept {
    // midpoints of 2^53 equal cells: strictly inside (0, 1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double inverse_cdf(DistKind kind, double u) {
    if (!(u > 0.0) || u > 1.0) throw std::domain_error("inverse_cdf: u must lie in (0, 1]");
    switch (kind) {
        case DistKind::CenteredPareto18:
            return std::pow(u, -1.0 / kParetoShape) - kParetoShift;
        case DistKind::StudentT2:
            return (2.0 * u - 1.0) / std::sqrt(2.0 * u * (1.0 - u));
    }
    throw std::domain_error("inverse_cdf: unknown distribution");
}

double sample_one(DistKind kind, StreamRng& rng) {
    return inverse_cdf(kind, rng.uniform01());
}

std::vector<double> sample(DistKind kind, SeedSpec seed, std::int64_t n) {
    if (n < 1) throw std::domain_error("sample: n must be >= 1");
    StreamRng rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = sample_one(kind, rng);
    return xs;
}

double density(DistKind kind, double x) {
    switch (kind) {
        case DistKind::CenteredPareto18:
            if (x < -1.25) return 0.0;
            return kParetoShape * std::pow(x + kParetoShift, -kParetoShape - 1.0);
        case DistKind::StudentT2:
            return t2_density(x);
    }
    throw std::domain_error("density: unknown distribution");
}

double cdf(DistKind kind, double x) {
    switch (kind) {
        case DistKind::CenteredPareto18:
            if (x < -1.25) return 0.0;
            return 1.0 - std::pow(x + kParetoShift, -kParetoShape);
        case DistKind::StudentT2:
            return 0.5 * (1.0 + x / std::sqrt(x * x + 2.0));
    }
    throw std::domain_error("cdf: unknown distribution");
}

namespace {

// Both tails are mapped to (0, 1] by x = x0/v with v = w^m; m is chosen so
// the leading power of w has exponent in [1, 1 + q], and the asymptotic
// power of x is pulled out analytically so the mapped integrand never forms
// inf * 0 even when w^m underflows. No truncation anywhere.
int tail_smoothing_order(double q) {
    return static_cast<int>(std::ceil(2.0 / q));
}

double pareto_central_moment(double p) {
    if (!(p > 1.0) || !(p < kParetoShape)) {
        throw std::domain_error("central_moment: Pareto(1.8) requires p in (1, 1.8)");
    }
    constexpr double tol = 1e-10;  // absolute, per panel
    // y = x + 9/4 is Pareto(1.8, 1); split at the mean y = 9/4.
    const auto rho = [](double y) { return kParetoShape * std::pow(y, -kParetoShape - 1.0); };
    const double left = adaptive_simpson(
        [&](double y) { return std::pow(kParetoShift - y, p) * rho(y); }, 1.0, kParetoShift, tol);
    // right side in z = y - 9/4: z^p rho(z + 9/4), decays like z^{p - 2.8}
    const double z0 = 4.0 * kParetoShift;
    const double right_head = adaptive_simpson(
        [&](double z) { return std::pow(z, p) * rho(z + kParetoShift); }, 0.0, z0, tol);
    const double q = kParetoShape - p;
    const int m = tail_smoothing_order(q);
    const double eta = static_cast<double>(m) * q - 1.0;
    const double lead = kParetoShape * std::pow(z0, -q) * static_cast<double>(m);
    const double right_tail = adaptive_simpson(
        [&](double w) {
            if (w <= 0.0) return 0.0;
            return lead * std::pow(w, eta) *
                   std::pow(1.0 + kParetoShift * std::pow(w, m) / z0, -kParetoShape - 1.0);
        },
        0.0, 1.0, tol);
    return left + right_head + right_tail;
}

double t2_central_moment(double p) {
    if (!(p > 1.0) || !(p < 2.0)) {
        throw std::domain_error("central_moment: t_2 requires p in (1, 2)");
    }
    constexpr double tol = 1e-10;  // absolute, per panel
    const double x0 = 8.0;
    const double head = adaptive_simpson(
        [&](double x) { return std::pow(x, p) * t2_density(x); }, 0.0, x0, tol);
    const double q = 2.0 - p;
    const int m = tail_smoothing_order(q);
    const double eta = static_cast<double>(m) * q - 1.0;
    // 1/(2 sqrt 2) * 2^{3/2} = 1
    const double lead = std::pow(x0, p + 1.0) * static_cast<double>(m);
    const double tail = adaptive_simpson(
        [&](double w) {
            if (w <= 0.0) return 0.0;
            const double vv = std::pow(w, 2 * m);
            return lead * std::pow(w, eta) * std::pow(2.0 * vv + x0 * x0, -1.5);
        },
        0.0, 1.0, tol);
    return 2.0 * (head + tail);  // symmetric about 0
}

}  // namespace

double central_moment(DistKind kind, double p) {
    switch (kind) {
        case DistKind::CenteredPareto18:
            return pareto_central_moment(p);
        case DistKind::StudentT2:
            return t2_central_moment(p);
    }
    throw std::domain_error("central_moment: unknown distribution");
}

}  // namespace catoni
