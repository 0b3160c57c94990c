#pragma once

#include <cstdint>
#include <vector>

namespace catoni {

enum class DistKind {
    CenteredPareto18,  ///< Pareto(shape 1.8, scale 1) shifted to mean 0; infinite variance
    StudentT2          ///< Student's t with 2 degrees of freedom; infinite variance
};

/// Identifies one reproducible random stream. Equal pairs give bit-identical
/// streams; distinct pairs give streams that are independent for all
/// practical purposes (initial counters collide with probability ~ 2^-64).
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

/// Counter-based 64-bit generator (SplitMix64 core). Each stream owns its
/// own counter, so replications can run in parallel and still merge
/// reproducibly.
class StreamRng {
public:
    explicit StreamRng(SeedSpec seed) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform draw strictly inside (0, 1).
    double uniform01() noexcept;

    std::uint64_t stream_seed() const noexcept { return seed_; }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
};

/// Maps a uniform draw u in (0, 1] to a sample by inversion.
/// CenteredPareto18: u^{-1/1.8} - 9/4 (u = 1 hits the support endpoint -5/4).
/// StudentT2: the closed-form t_2 quantile (2u-1)/sqrt(2u(1-u)).
double inverse_cdf(DistKind kind, double u);

double sample_one(DistKind kind, StreamRng& rng);

/// n i.i.d. draws from the stream identified by seed.
std::vector<double> sample(DistKind kind, SeedSpec seed, std::int64_t n);

double density(DistKind kind, double x);
double cdf(DistKind kind, double x);

/// Central absolute moment E|X - mu|^p by adaptive quadrature (both
/// distributions have mean 0). The tail is mapped to a finite interval and
/// smoothed by a power substitution, so there is no truncation error beyond
/// the quadrature budget. Throws std::domain_error when the moment does not
/// exist (p >= 1.8 for the Pareto case, p >= 2 for t_2) or p <= 1.
double central_moment(DistKind kind, double p);

}  // namespace catoni
