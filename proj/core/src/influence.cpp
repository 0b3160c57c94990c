#include "catoni/influence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace catoni {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha)) {
        throw std::domain_error("alpha must lie in (0, 1]");
    }
}

}  // namespace

double pow_abs(double x, double p) noexcept {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    if (p == 1.5) return ax * std::sqrt(ax);
    if (p == 2.0) return ax * ax;
    return std::exp(p * std::log(ax));
}

double tight_coefficient(double alpha) {
    require_alpha(alpha);
    const double first = std::pow(alpha / (1.0 + alpha), 0.5 * (1.0 + alpha));
    if (alpha == 1.0) return first;  // ((1-a)/a)^0 = 1
    return first * std::pow((1.0 - alpha) / alpha, 0.5 * (1.0 - alpha));
}

double chen_coefficient(double alpha) {
    require_alpha(alpha);
    return 1.0 / (1.0 + alpha);
}

InfluenceSpec InfluenceSpec::tight(double alpha) {
    return InfluenceSpec{Variant::TightCatoni, alpha, tight_coefficient(alpha)};
}

InfluenceSpec InfluenceSpec::chen_wr(double alpha) {
    return InfluenceSpec{Variant::ChenWR, alpha, chen_coefficient(alpha)};
}

double envelope_upper(double alpha, double c, double x) {
    const double arg = x + c * pow_abs(x, 1.0 + alpha);
    if (arg <= -1.0) return -std::numeric_limits<double>::infinity();
    return std::log1p(arg);
}

double envelope_lower(double alpha, double c, double x) {
    const double arg = -x + c * pow_abs(x, 1.0 + alpha);
    if (arg <= -1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(arg);
}

double psi(const InfluenceSpec& spec, double x) {
    if (!std::isfinite(x)) throw std::domain_error("psi: input must be finite");
    // Upper wall on x >= 0, lower wall on x < 0: both vanish at 0 and both
    // branches are strictly increasing, so the selection is nondecreasing
    // and odd. log1p keeps the small-|x| regime accurate.
    const double tail = spec.c_alpha * pow_abs(x, 1.0 + spec.alpha);
    if (x >= 0.0) return std::log1p(x + tail);
    return -std::log1p(-x + tail);
}

SandwichMargin sandwich_margin(const InfluenceSpec& spec, double x) {
    if (!std::isfinite(x)) throw std::domain_error("sandwich_margin: input must be finite");
    const double value = psi(spec, x);
    return SandwichMargin{value - envelope_lower(spec.alpha, spec.c_alpha, x),
                          envelope_upper(spec.alpha, spec.c_alpha, x) - value};
}

}  // namespace catoni
