#pragma once

#include <cstdint>
#include <vector>

#include "hfbi/event_log.hpp"
#include "hfbi/exec.hpp"
#include "hfbi/rng.hpp"

namespace hfbi {

// Exponent search range and convergence tolerance for the discrete
// power-law maximum-likelihood fit p(q) = q^-gamma / zeta(gamma, x_min).
inline constexpr double kGammaLo = 1.01;
inline constexpr double kGammaHi = 6.0;
inline constexpr double kGammaTol = 1e-6;

struct PowerLawFit {
    double gamma = 0.0;
    std::int64_t x_min = 1;
    double ks_stat = 0.0;
    double p_value = 0.0;
    std::int64_t n_tail = 0;   // observations >= x_min
    std::int64_t n_total = 0;  // observations in the input
    std::uint64_t seed = 0;
    int n_boot = 0;
};

struct TwoSampleKs {
    double d = 0.0;
    double p_value = 0.0;
    std::int64_t n_a = 0;
    std::int64_t n_b = 0;
};

struct CcdfPoint {
    std::int64_t x = 0;
    double fraction = 0.0;  // P(Q >= x), empirical
};

struct LorenzPoint {
    double population_share = 0.0;  // bottom fraction of users
    double activity_share = 0.0;    // fraction of attendances they hold
};

struct GofOptions {
    int n_boot = 1000;
    std::uint64_t seed = kDefaultSeed;
    Exec exec = Exec::Parallel;
};

struct SelectXminOptions {
    double p_threshold = 0.1;
    int n_boot = 1000;
    std::uint64_t seed = kDefaultSeed;
    std::int64_t min_tail = 10;  // smallest usable tail
    Exec exec = Exec::Parallel;
};

// Empirical complementary CDF over the distinct values of `sample`.
std::vector<CcdfPoint> ccdf(const FrequencySequence& sample);

// ML exponent for the tail sample >= x_min. Throws FitError when fewer than
// two observations survive or all surviving values are equal.
double mle_gamma(const FrequencySequence& sample, std::int64_t x_min);

// Kolmogorov-Smirnov distance between the tail empirical CDF and the fitted
// discrete power law (sup over all integers >= x_min).
double ks_distance(const FrequencySequence& sample, double gamma, std::int64_t x_min);

// Parametric bootstrap goodness-of-fit p-value: fraction of synthetic
// samples (same tail size, gamma refitted each time) whose KS distance
// reaches the observed one.
double gof_p_value(const FrequencySequence& sample, double gamma, std::int64_t x_min,
                   const GofOptions& opts = {});

// Smallest x_min whose tail passes the bootstrap test, with its fit.
// Throws FitError when no candidate passes.
PowerLawFit select_xmin(const FrequencySequence& sample, const SelectXminOptions& opts = {});

// Two-sample KS test (asymptotic p-value).
TwoSampleKs two_sample_ks(const FrequencySequence& a, const FrequencySequence& b);

// Fraction of attendances held by the top `fraction` most active users.
double top_share(const FrequencySequence& sample, double fraction);

// Cumulative population/activity shares, users sorted ascending by count.
std::vector<LorenzPoint> lorenz_curve(const FrequencySequence& sample);

// Limiting distribution of the Kolmogorov statistic, Q(lambda) =
// 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

// Exact sampler for the discrete power law on integers >= x_min.
// Alias table over the bulk of the mass plus an exact inverse-CDF walk for
// the far tail, so no part of the distribution is truncated.
class PowerLawSampler {
public:
    PowerLawSampler(double gamma, std::int64_t x_min);

    std::int64_t operator()(Rng& rng) const;
    void fill(std::vector<std::int64_t>& out, std::int64_t n, Rng& rng) const;

    double gamma() const { return gamma_; }
    std::int64_t x_min() const { return x_min_; }

private:
    std::int64_t sample_tail(Rng& rng) const;  // values above the table

    double gamma_ = 0.0;
    std::int64_t x_min_ = 1;
    double zeta_full_ = 0.0;
    double table_mass_ = 0.0;             // probability covered by the table
    std::vector<double> alias_prob_;
    std::vector<std::int32_t> alias_idx_;
};

}  // namespace hfbi
