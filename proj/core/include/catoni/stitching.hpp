#pragma once

#include <cstdint>

#include "catoni/confseq.hpp"

namespace catoni {

enum class StitchVariant { Improved, WR };

/// One block of the stitched construction: epoch k covers t in [e^k, e^{k+1})
/// with its own error budget delta_k = delta/(k+2)^2 and constant scale
/// theta_k. Times t in {1, 2} (below e) are folded into epoch 1.
struct StitchEpoch {
    int k;
    double t_start;   ///< e^k
    double delta_k;   ///< delta / (k+2)^2
    double theta_k;   ///< constant scale used throughout the epoch
    StitchVariant variant;
};

/// Moment-term coefficient of the variant's threshold:
/// (1 + u^{-alpha}) c_alpha nu_alpha for Improved, 5 nu_alpha/(1+alpha) for WR.
double stitch_l(const CsParams& params, StitchVariant variant);

/// Constant scale of epoch k: (2 log(2/delta_k) / (alpha L e^{k+1}))^{1/(1+alpha)}.
double epoch_theta(int k, const CsParams& params, StitchVariant variant);

/// Epoch containing time t (t >= 1).
StitchEpoch epoch_of(std::int64_t t, const CsParams& params, StitchVariant variant);

/// Interval at time t for a state appended with the epoch schedule
/// theta_i = epoch_theta(epoch_of(i)), evaluated at the current epoch's
/// error level delta_k. Verifies the stored scales against the schedule and
/// throws std::invalid_argument if any differs by more than 1e-12.
ConfidenceInterval stitched_interval(const CsState& state, std::int64_t t, const CsParams& params,
                                     StitchVariant variant);

/// Closed-form constant of the stitched width bound (depends on alpha and
/// nu_alpha only; the (1-alpha) factor carries the 0^0 = 1 convention).
double stitched_bound_constant(const CsParams& params);
double stitched_bound_constant_wr(const CsParams& params);

/// Shrinkage factor ((2 log(log t + 2) + log(2/delta)) / t)^{alpha/(1+alpha)}.
double stitched_bound_rate(double t, double delta, double alpha);

/// Full coefficient multiplying the rate in the stitched width bound.
double stitched_width_coefficient(const CsParams& params, StitchVariant variant);

struct StitchedBound {
    bool applies;  ///< the explicit sample-size sufficiency condition holds at t
    double bound;
};

/// Stitched width bound at time t. `bound` is always computed; it is a
/// 1 - delta/4 guarantee only where `applies` is true.
StitchedBound stitched_width_bound(std::int64_t t, const CsParams& params, StitchVariant variant);

/// Numeric check of the per-epoch width chain
///   (L t theta_k^{1+a} + 2 log(2/delta_k)) / (t theta_k)
///     <= (1+a) (2/a)^{a/(1+a)} (L e)^{1/(1+a)} B(t, delta)
/// for t in [e^k, e^{k+1}). Exists as a regression trap for transcription
/// errors in the schedule constants; it must always return true.
bool schedule_inequality_holds(int k, std::int64_t t, const CsParams& params,
                               StitchVariant variant = StitchVariant::Improved);

}  // namespace catoni
