#include "hfbi/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hfbi/errors.hpp"
#include "hfbi/zeta.hpp"

namespace hfbi {

namespace {

// Values >= x_min, rejecting non-positive counts outright.
std::vector<std::int64_t> tail_of(const FrequencySequence& sample, std::int64_t x_min) {
    std::vector<std::int64_t> tail;
    tail.reserve(sample.size());
    for (auto v : sample) {
        if (v < 1) throw ValidationError("power-law sample values must be >= 1");
        if (v >= x_min) tail.push_back(v);
    }
    return tail;
}

// Golden-section minimum of the negative log-likelihood
//   g(gamma) = n * ln zeta(gamma, x_min) + gamma * sum(ln q_i)
// over [kGammaLo, kGammaHi]. g is convex, so the bracket shrinks cleanly;
// degenerate samples push the minimum to the upper boundary and the
// boundary value is returned.
double mle_core(double sum_logq, std::int64_t n, std::int64_t x_min) {
    auto neg_ll = [&](double g) {
        return static_cast<double>(n) * std::log(hurwitz_zeta(g, static_cast<double>(x_min))) +
               g * sum_logq;
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0;
    double a = kGammaLo, b = kGammaHi;
    double h = b - a;
    double c = a + invphi2 * h, d = a + invphi * h;
    double fc = neg_ll(c), fd = neg_ll(d);
    while (h > kGammaTol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            h = b - a;
            c = a + invphi2 * h;
            fc = neg_ll(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            h = b - a;
            d = a + invphi * h;
            fd = neg_ll(d);
        }
    }
    return 0.5 * (a + b);
}

// KS distance for a pre-filtered tail (every value >= x_min >= 1).
// The model CDF is F(q) = 1 - zeta(gamma, q+1) / zeta(gamma, x_min) and the
// sup runs over all integers >= x_min: within each flat stretch of the
// empirical CDF the deviation peaks at the stretch's endpoints, so only the
// observed values and their predecessors need evaluating.
double ks_tail(std::vector<std::int64_t> tail, double gamma, std::int64_t x_min) {
    std::sort(tail.begin(), tail.end());
    const double n = static_cast<double>(tail.size());

    std::vector<std::int64_t> vals;
    std::vector<std::int64_t> cum;  // count of observations <= vals[k]
    for (std::size_t i = 0; i < tail.size();) {
        std::size_t j = i;
        while (j < tail.size() && tail[j] == tail[i]) ++j;
        vals.push_back(tail[i]);
        cum.push_back(static_cast<std::int64_t>(j));
        i = j;
    }

    // zeta(gamma, a) is needed at a in {x_min} U {v} U {v+1} for observed
    // values v. When the value range is compact it is cheaper to compute one
    // tail estimate and walk down with zeta(g,a) = a^-g + zeta(g,a+1);
    // otherwise each point gets its own evaluation. The choice depends only
    // on the input sizes, so results are reproducible.
    const std::int64_t range = vals.back() - x_min;
    const std::int64_t sparse_cost = 37 * (2 * static_cast<std::int64_t>(vals.size()) + 1);
    const bool dense = range <= std::min<std::int64_t>(sparse_cost, std::int64_t{1} << 20);

    std::vector<double> zs;
    if (dense) {
        zs.resize(static_cast<std::size_t>(range) + 2);
        zs.back() = hurwitz_zeta(gamma, static_cast<double>(vals.back() + 1));
        for (std::int64_t a = vals.back(); a >= x_min; --a)
            zs[static_cast<std::size_t>(a - x_min)] =
                std::pow(static_cast<double>(a), -gamma) +
                zs[static_cast<std::size_t>(a - x_min) + 1];
    }
    auto zeta_at = [&](std::int64_t a) {
        return dense ? zs[static_cast<std::size_t>(a - x_min)]
                     : hurwitz_zeta(gamma, static_cast<double>(a));
    };
    const double z0 = zeta_at(x_min);
    auto model_cdf = [&](std::int64_t q) { return 1.0 - zeta_at(q + 1) / z0; };

    double d = 0.0;
    if (vals.front() > x_min) d = model_cdf(vals.front() - 1);  // empirical CDF still 0 there
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const double emp = static_cast<double>(cum[k]) / n;
        d = std::max(d, std::abs(emp - model_cdf(vals[k])));
        const double before_next =
            (k + 1 < vals.size()) ? model_cdf(vals[k + 1] - 1) : 1.0;
        d = std::max(d, std::abs(emp - before_next));
    }
    return d;
}

struct BootstrapOutcome {
    double p = 0.0;
    double d_obs = 0.0;
    bool aborted = false;
};

// Parametric bootstrap: synthetic tails drawn from the fitted law, gamma
// refitted per replicate (x_min held), p = fraction of replicates whose KS
// distance reaches the observed one. Replicate r always uses the seed
// derived from (seed, r) and counts are merged by integer addition, so the
// serial and parallel paths agree exactly. When abort_threshold >= 0 the
// loop stops (in fixed 64-replicate chunks) once even an all-hit remainder
// could not lift p above the threshold; runs that can still pass always
// complete all n_boot replicates, so returned p-values are exact.
BootstrapOutcome bootstrap_gof(const std::vector<std::int64_t>& tail, double gamma,
                               std::int64_t x_min, int n_boot, std::uint64_t seed, Exec exec,
                               double abort_threshold) {
    BootstrapOutcome out;
    out.d_obs = ks_tail(tail, gamma, x_min);
    const PowerLawSampler sampler(gamma, x_min);
    const auto n_tail = static_cast<std::int64_t>(tail.size());

    auto replicate_hits = [&](int r) -> int {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        std::vector<std::int64_t> synth;
        sampler.fill(synth, n_tail, rng);
        double sum_log = 0.0;
        std::int64_t lo = synth.front(), hi = synth.front();
        for (auto v : synth) {
            sum_log += std::log(static_cast<double>(v));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double g = (lo == hi) ? kGammaHi : mle_core(sum_log, n_tail, x_min);
        return ks_tail(std::move(synth), g, x_min) >= out.d_obs ? 1 : 0;
    };

    constexpr int kChunk = 64;
    int count = 0;
    for (int base = 0; base < n_boot; base += kChunk) {
        const int stop = std::min(n_boot, base + kChunk);
        int local = 0;
        if (exec == Exec::Parallel) {
#pragma omp parallel for reduction(+ : local) schedule(dynamic)
            for (int r = base; r < stop; ++r) local += replicate_hits(r);
        } else {
            for (int r = base; r < stop; ++r) local += replicate_hits(r);
        }
        count += local;
        if (abort_threshold >= 0.0) {
            const double best_possible =
                static_cast<double>(count + (n_boot - stop)) / n_boot;
            if (best_possible <= abort_threshold) {
                out.p = static_cast<double>(count) / n_boot;
                out.aborted = true;
                return out;
            }
        }
    }
    out.p = static_cast<double>(count) / n_boot;
    return out;
}

}  // namespace

std::vector<CcdfPoint> ccdf(const FrequencySequence& sample) {
    if (sample.empty()) throw ValidationError("ccdf: empty sample");
    auto sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 1) throw ValidationError("ccdf: values must be >= 1");
    const double n = static_cast<double>(sorted.size());
    std::vector<CcdfPoint> out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
        i = j;
    }
    return out;
}

double mle_gamma(const FrequencySequence& sample, std::int64_t x_min) {
    if (x_min < 1) throw ValidationError("mle_gamma: x_min must be >= 1");
    const auto tail = tail_of(sample, x_min);
    if (tail.size() < 2) throw FitError("mle_gamma: fewer than two observations >= x_min");
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (*lo == *hi) throw FitError("mle_gamma: all tail observations equal; exponent unbounded");
    double sum_log = 0.0;
    for (auto v : tail) sum_log += std::log(static_cast<double>(v));
    return mle_core(sum_log, static_cast<std::int64_t>(tail.size()), x_min);
}

double ks_distance(const FrequencySequence& sample, double gamma, std::int64_t x_min) {
    if (x_min < 1) throw ValidationError("ks_distance: x_min must be >= 1");
    if (!(gamma > 1.0)) throw ValidationError("ks_distance: gamma must be > 1");
    auto tail = tail_of(sample, x_min);
    if (tail.empty()) throw FitError("ks_distance: no observations >= x_min");
    return ks_tail(std::move(tail), gamma, x_min);
}

double gof_p_value(const FrequencySequence& sample, double gamma, std::int64_t x_min,
                   const GofOptions& opts) {
    if (x_min < 1) throw ValidationError("gof_p_value: x_min must be >= 1");
    if (!(gamma > 1.0)) throw ValidationError("gof_p_value: gamma must be > 1");
    if (opts.n_boot < 100) throw ValidationError("gof_p_value: n_boot must be >= 100");
    auto tail = tail_of(sample, x_min);
    if (tail.size() < 2) throw FitError("gof_p_value: fewer than two observations >= x_min");
    return bootstrap_gof(tail, gamma, x_min, opts.n_boot, opts.seed, opts.exec, -1.0).p;
}

PowerLawFit select_xmin(const FrequencySequence& sample, const SelectXminOptions& opts) {
    if (sample.empty()) throw FitError("select_xmin: empty sample");
    if (opts.min_tail < 2) throw ValidationError("select_xmin: min_tail must be >= 2");
    if (opts.n_boot < 100) throw ValidationError("select_xmin: n_boot must be >= 100");
    if (!(opts.p_threshold > 0.0 && opts.p_threshold < 1.0))
        throw ValidationError("select_xmin: p_threshold must be in (0, 1)");

    for (std::int64_t x_min = 1;; ++x_min) {
        auto tail = tail_of(sample, x_min);
        if (static_cast<std::int64_t>(tail.size()) < opts.min_tail) break;
        const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
        if (*lo == *hi) continue;  // exponent unbounded on a constant tail

        double sum_log = 0.0;
        for (auto v : tail) sum_log += std::log(static_cast<double>(v));
        const double gamma = mle_core(sum_log, static_cast<std::int64_t>(tail.size()), x_min);

        const auto boot =
            bootstrap_gof(tail, gamma, x_min, opts.n_boot,
                          derive_seed(opts.seed, static_cast<std::uint64_t>(x_min)), opts.exec,
                          opts.p_threshold);
        if (!boot.aborted && boot.p > opts.p_threshold) {
            PowerLawFit fit;
            fit.gamma = gamma;
            fit.x_min = x_min;
            fit.ks_stat = boot.d_obs;
            fit.p_value = boot.p;
            fit.n_tail = static_cast<std::int64_t>(tail.size());
            fit.n_total = static_cast<std::int64_t>(sample.size());
            fit.seed = opts.seed;
            fit.n_boot = opts.n_boot;
            return fit;
        }
    }
    throw FitError("select_xmin: no truncation point passes the goodness-of-fit threshold");
}

TwoSampleKs two_sample_ks(const FrequencySequence& a, const FrequencySequence& b) {
    if (a.empty() || b.empty()) throw ValidationError("two_sample_ks: empty sample");
    auto sa = a;
    auto sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const std::int64_t v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    TwoSampleKs out;
    out.d = d;
    out.n_a = static_cast<std::int64_t>(sa.size());
    out.n_b = static_cast<std::int64_t>(sb.size());
    const double ne = na * nb / (na + nb);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    out.p_value = kolmogorov_q(lambda);
    return out;
}

double top_share(const FrequencySequence& sample, double fraction) {
    if (sample.empty()) throw ValidationError("top_share: empty sample");
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw ValidationError("top_share: fraction must be in [0, 1]");
    auto sorted = sample;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto n = static_cast<std::int64_t>(sorted.size());
    // nearest-integer head size; 20% of 9 users means 2 users
    const auto k = std::clamp<std::int64_t>(
        std::llround(fraction * static_cast<double>(n)), 0, n);
    double total = 0.0, head = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        total += static_cast<double>(sorted[static_cast<std::size_t>(i)]);
        if (i < k) head += static_cast<double>(sorted[static_cast<std::size_t>(i)]);
    }
    if (total <= 0.0) throw ValidationError("top_share: total activity is zero");
    return head / total;
}

std::vector<LorenzPoint> lorenz_curve(const FrequencySequence& sample) {
    if (sample.empty()) throw ValidationError("lorenz_curve: empty sample");
    auto sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double total = 0.0;
    for (auto v : sorted) total += static_cast<double>(v);
    if (total <= 0.0) throw ValidationError("lorenz_curve: total activity is zero");

    std::vector<LorenzPoint> out;
    out.reserve(sorted.size() + 1);
    out.push_back({0.0, 0.0});
    double acc = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        acc += static_cast<double>(sorted[i]);
        out.push_back({static_cast<double>(i + 1) / n, acc / total});
    }
    return out;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    const double a2 = -2.0 * lambda * lambda;
    double fac = 2.0, sum = 0.0, prev_term = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = fac * std::exp(a2 * static_cast<double>(j) * j);
        sum += term;
        const double mag = std::abs(term);
        if (mag <= 1e-6 * prev_term || mag <= 1e-12 * std::abs(sum))
            return std::clamp(sum, 0.0, 1.0);
        fac = -fac;
        prev_term = mag;
    }
    return 1.0;  // series effectively 1 for very small lambda
}

PowerLawSampler::PowerLawSampler(double gamma, std::int64_t x_min)
    : gamma_(gamma), x_min_(x_min) {
    if (!(gamma > 1.0)) throw ValidationError("PowerLawSampler: gamma must be > 1");
    if (x_min < 1) throw ValidationError("PowerLawSampler: x_min must be >= 1");
    zeta_full_ = hurwitz_zeta(gamma, static_cast<double>(x_min));

    // Table over x_min .. x_min+T-1; stops early once the remaining mass is
    // negligible, otherwise at 65536 entries. Everything past the table is
    // sampled exactly through the zeta-based inverse CDF, so the cap costs
    // speed on rare draws, never correctness.
    constexpr int kMaxTable = 65536;
    std::vector<double> weight;
    weight.reserve(1024);
    double covered = 0.0;
    for (int t = 0; t < kMaxTable; ++t) {
        const double w = std::pow(static_cast<double>(x_min + t), -gamma);
        weight.push_back(w);
        covered += w / zeta_full_;
        if (1.0 - covered < 1e-9) break;
    }
    const auto table_n = static_cast<std::int64_t>(weight.size());
    const double zeta_past =
        hurwitz_zeta(gamma, static_cast<double>(x_min + table_n));
    table_mass_ = 1.0 - zeta_past / zeta_full_;

    // Vose alias construction over the table weights.
    double sum_w = 0.0;
    for (double w : weight) sum_w += w;
    std::vector<double> scaled(weight.size());
    for (std::size_t i = 0; i < weight.size(); ++i)
        scaled[i] = weight[i] * static_cast<double>(weight.size()) / sum_w;

    alias_prob_.assign(weight.size(), 1.0);
    alias_idx_.resize(weight.size());
    for (std::size_t i = 0; i < weight.size(); ++i)
        alias_idx_[i] = static_cast<std::int32_t>(i);

    std::vector<std::int32_t> small, large;
    for (std::size_t i = 0; i < scaled.size(); ++i)
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::int32_t>(i));
    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        const auto l = large.back();
        small.pop_back();
        large.pop_back();
        alias_prob_[static_cast<std::size_t>(s)] = scaled[static_cast<std::size_t>(s)];
        alias_idx_[static_cast<std::size_t>(s)] = l;
        scaled[static_cast<std::size_t>(l)] -= 1.0 - scaled[static_cast<std::size_t>(s)];
        (scaled[static_cast<std::size_t>(l)] < 1.0 ? small : large).push_back(l);
    }
    // leftovers (either stack) keep prob 1 and self-alias
}

std::int64_t PowerLawSampler::operator()(Rng& rng) const {
    if (rng.uniform01() < table_mass_) {
        const auto i = static_cast<std::size_t>(
            rng.uniform_below(static_cast<std::uint64_t>(alias_prob_.size())));
        const bool keep = rng.uniform01() < alias_prob_[i];
        return x_min_ + static_cast<std::int64_t>(keep ? i
                                                       : static_cast<std::size_t>(alias_idx_[i]));
    }
    return sample_tail(rng);
}

void PowerLawSampler::fill(std::vector<std::int64_t>& out, std::int64_t n, Rng& rng) const {
    if (n < 0) throw ValidationError("PowerLawSampler::fill: n must be >= 0");
    out.resize(static_cast<std::size_t>(n));
    for (auto& v : out) v = (*this)(rng);
}

std::int64_t PowerLawSampler::sample_tail(Rng& rng) const {
    const auto x_hi = x_min_ + static_cast<std::int64_t>(alias_prob_.size());
    const double zeta_hi = zeta_full_ * (1.0 - table_mass_);
    // Conditional CCDF beyond the table is zeta(g, q) / zeta(g, x_hi); draw
    // w in (0, 1] and return the smallest q with zeta(g, q+1) < w * zeta_hi.
    const double target = (1.0 - rng.uniform01()) * zeta_hi;
    auto past = [&](std::int64_t q) {
        return hurwitz_zeta(gamma_, static_cast<double>(q + 1)) < target;
    };

    // Bracket by doubling, then binary search. The 2^62 cap is unreachable
    // in practice (the target mass would have to be below ~ CCDF(2^62)).
    constexpr std::int64_t kCap = std::int64_t{1} << 62;
    std::int64_t lo = x_hi, hi = x_hi, span = 1;
    while (!past(hi)) {
        lo = hi + 1;
        if (span >= kCap - x_hi) {
            hi = kCap;
            if (!past(hi)) return kCap;
            break;
        }
        span *= 2;
        hi = x_hi + span;
    }
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (past(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace hfbi
