#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "catoni/influence.hpp"

namespace catoni {

/// Parameters of the confidence sequence and its width bound.
///   alpha:     tail exponent in (0,1]; a (1+alpha)-th central moment exists
///   nu_alpha:  known upper bound on that central moment
///   delta:     error level of the sequence
///   lambda, u: scaling parameters of the width bound, 0 < lambda < 1/alpha,
///              0 < u < 1; defaults lambda = alpha (1/2 at alpha = 1) and
///              u = 4^{-1/alpha}
///   beta:      confidence level of the width bound itself
struct CsParams {
    double alpha;
    double nu_alpha;
    double delta;
    double lambda;
    double u;
    double beta = 0.05;

    /// Fills lambda/u with their defaults and validates.
    static CsParams defaults(double alpha, double nu_alpha, double delta);

    /// Throws std::domain_error on any violated range.
    void validate() const;
};

struct Sample {
    double theta;
    double x;
};

/// Running sample log: the (theta_i, x_i) pairs plus cached power sums.
/// A value type; copy freely. No internal synchronization — concurrent reads
/// are fine, concurrent mutation is the caller's bug.
class CsState {
public:
    explicit CsState(double alpha);

    /// Records one observation with its scale. Throws std::domain_error on
    /// theta <= 0 or non-finite input.
    void append(double x, double theta);

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(samples_.size()); }
    double alpha() const noexcept { return alpha_; }
    double sum_theta() const noexcept { return sum_theta_; }
    double sum_theta_pow() const noexcept { return sum_theta_pow_; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }

private:
    double alpha_;
    double sum_theta_ = 0.0;
    double sum_theta_pow_ = 0.0;  // sum of theta_i^{1+alpha}
    std::vector<Sample> samples_;
};

struct ConfidenceInterval {
    double lower;
    double upper;
    std::int64_t t;

    double width() const noexcept { return upper - lower; }
};

/// Aggregated influence at candidate mean m: sum_i psi(theta_i (x_i - m)).
/// Strictly decreasing and continuous in m.
double influence_sum(const CsState& state, const InfluenceSpec& spec, double m);

/// Budget for |influence_sum|: c_alpha nu_alpha sum theta_i^{1+alpha} + log(2/delta).
double threshold(const CsState& state, const InfluenceSpec& spec, const CsParams& params);

/// Root of influence_sum(m) = 0 — the robust point estimate of the mean.
double m_estimate(const CsState& state, const InfluenceSpec& spec);

/// The set {m : |influence_sum(m)| <= threshold}, which is a closed interval
/// by monotonicity. Endpoints are found by bracketed bisection; the returned
/// endpoints satisfy |influence_sum(endpoint) -+ threshold| <= 1e-9 (1 + threshold).
/// An optional warm start reuses a nearby interval as bracket seeds.
/// Throws std::domain_error on an empty state and std::runtime_error if
/// bracket expansion exceeds 200 doublings (cannot happen for finite data).
ConfidenceInterval interval(const CsState& state, const InfluenceSpec& spec,
                            const CsParams& params, const ConfidenceInterval* warm = nullptr);

struct WidthBound {
    bool feasible;  ///< the sufficiency condition on the theta sums holds
    double bound;   ///< valid 1-beta width guarantee only when feasible
};

/// Deterministic width bound for a fixed, nonrandom theta sequence. The
/// caller is responsible for passing thetas that were not chosen from the
/// data; the guarantee does not survive data-dependent scales.
WidthBound width_bound(const CsParams& params, std::span<const double> thetas);

/// Scale tuning matched to the running-width bound; the experiments' default.
double theta_cs(std::int64_t t, const CsParams& params);

/// Scale tuning that minimizes the fixed-sample-size CI width bound.
double theta_ci(std::int64_t t, const CsParams& params);

/// Scale tuning of the baseline (WR) confidence sequence.
double theta_wr(std::int64_t t, const CsParams& params);

/// One-step factor exp(psi(theta (x - mu)) - theta^{1+alpha} c_alpha nu_alpha)
/// of the plus-branch supermartingale; the minus branch negates the psi term.
/// Its conditional expectation is at most 1 whenever the moment bound holds.
double supermartingale_factor(const InfluenceSpec& spec, const CsParams& params, double theta,
                              double x, double mu);

}  // namespace catoni
