#pragma once

#include <utility>

namespace catoni {

/// |x|^p with the 0^p = 0 guard (p > 0). Evaluated through exp(p*log|x|)
/// so the base is never negative; exact fast paths for p = 1.5 and p = 2.
double pow_abs(double x, double p) noexcept;

enum class Variant {
    TightCatoni,  ///< smallest admissible envelope coefficient
    ChenWR        ///< 1/(1+alpha), the coefficient of the baseline CS
};

/// Smallest coefficient c for which a nondecreasing influence function fits
/// inside the envelope  -log(1 - x + c|x|^{1+a}) <= psi(x) <= log(1 + x + c|x|^{1+a}).
/// Equals 1/2 at alpha = 1 (the (1-a)/a factor carries the 0^0 = 1 convention).
double tight_coefficient(double alpha);

/// Coefficient 1/(1+alpha) of the baseline influence function. Always at
/// least tight_coefficient(alpha), with equality only at alpha = 1.
double chen_coefficient(double alpha);

/// An influence-function choice: the envelope variant, its tail exponent
/// alpha in (0,1], and the envelope coefficient implied by the variant.
/// Construct through tight() or chen_wr(); both validate alpha.
struct InfluenceSpec {
    Variant variant;
    double alpha;
    double c_alpha;

    static InfluenceSpec tight(double alpha);
    static InfluenceSpec chen_wr(double alpha);
};

/// Envelope walls for an arbitrary coefficient c (used by tests probing the
/// admissibility boundary). Returns +-infinity where the log argument is
/// nonpositive, i.e. where the envelope is empty.
double envelope_upper(double alpha, double c, double x);
double envelope_lower(double alpha, double c, double x);

/// Canonical influence function: equals the upper envelope wall for x >= 0
/// and the lower wall for x < 0. Odd, nondecreasing, finite for finite x.
/// Throws std::domain_error on non-finite input.
double psi(const InfluenceSpec& spec, double x);

struct SandwichMargin {
    double lower_slack;  ///< psi(x) - lower wall, >= 0 up to roundoff
    double upper_slack;  ///< upper wall - psi(x), >= 0 up to roundoff
};

/// Distance of psi(x) from both envelope walls.
SandwichMargin sandwich_margin(const InfluenceSpec& spec, double x);

}  // namespace catoni
