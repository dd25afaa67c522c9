#pragma once

// Sampling cross-check for the symbolic probabilities. Each index n gets its
// own generator derived from (seed, n), so results do not depend on the order
// or parallelism in which indices are visited.

#include "roughlab/sequence.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace roughlab {

/// Seed used when neither --seed nor ROUGHLAB_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct SampleConfig {
    std::uint64_t seed = 0;
    std::uint64_t samples_per_index = 10000;
    std::vector<Nat> index_budget;
    int confidence_sigma = 3;
};

namespace detail {

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, Nat n) { return std::mt19937_64(splitmix64(seed ^ splitmix64(n))); }

/// floor(c * 2^64), saturated; u < threshold  <=>  u / 2^64 < c up to 2^-64.
inline std::uint64_t scaled_threshold(const Rational& c) {
    if (c >= 1) return std::numeric_limits<std::uint64_t>::max();
    if (c <= 0) return 0;
    Integer num = boost::multiprecision::numerator(c) << 64;
    Integer q = num / boost::multiprecision::denominator(c);
    return static_cast<std::uint64_t>(q);
}

}  // namespace detail

struct Estimate {
    Nat n = 0;
    std::uint64_t hits = 0, samples = 0;
    double sigma = 0;               // binomial standard error, from the exact value when known
    std::optional<Rational> exact;  // symbolic reference when available

    Rational value() const { return Rational(Integer(hits)) / Rational(Integer(samples)); }
    double value_d() const { return static_cast<double>(hits) / static_cast<double>(samples); }

    /// Within confidence_sigma * sigma of the exact value; nullopt without a reference.
    std::optional<bool> pass(int k) const {
        if (!exact) return std::nullopt;
        double diff = std::abs(value_d() - detail::to_double(*exact));
        // a degenerate reference (sigma 0) must be hit exactly
        if (sigma == 0) return value() == *exact;
        return diff <= k * sigma;
    }
};

/// Inverse-CDF sampler over the cells of a finite joint law (sorted as given).
class CellSampler {
public:
    explicit CellSampler(const std::vector<Rational>& probs) {
        Rational cum = 0;
        for (const auto& p : probs) {
            cum += p;
            cuts_.push_back(detail::scaled_threshold(cum));
        }
        if (!cuts_.empty()) cuts_.back() = std::numeric_limits<std::uint64_t>::max();
    }

    std::size_t draw(std::mt19937_64& g) const {
        auto i = static_cast<std::size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), g()) - cuts_.begin());
        return std::min(i, cuts_.size() - 1);
    }

private:
    std::vector<std::uint64_t> cuts_;
};

/// Empirical P(d(X_n, Y) > r + eps) from the declared coupling at n.
inline Estimate estimate_exceedance(const PiecewiseSequence& s, const Target& t, const Rational& r, const Rational& eps, Nat n,
                                    const SampleConfig& cfg, bool with_exact = true) {
    if (cfg.samples_per_index == 0) throw std::invalid_argument("samples per index must be positive");
    auto c = coupling_at(s, t, n);
    const auto& space = c.x().space();
    Rational thr = r + eps;
    std::vector<Rational> probs;
    std::vector<bool> exceeds;
    for (const auto& cell : c.table()) {
        probs.push_back(cell.prob);
        exceeds.push_back(space.distance(cell.x, cell.y) > thr);
    }
    CellSampler sampler(probs);
    auto g = detail::substream(cfg.seed, n);
    Estimate e;
    e.n = n;
    e.samples = cfg.samples_per_index;
    for (std::uint64_t k = 0; k < cfg.samples_per_index; ++k)
        if (exceeds[sampler.draw(g)]) ++e.hits;
    double p = e.value_d();
    if (with_exact) {
        e.exact = distance_prob_at(s, t, n, Rel::Greater, thr);
        p = detail::to_double(*e.exact);
    }
    e.sigma = std::sqrt(p * (1 - p) / static_cast<double>(cfg.samples_per_index));
    return e;
}

inline std::vector<Estimate> estimate_exceedance_over(const PiecewiseSequence& s, const Target& t, const Rational& r,
                                                      const Rational& eps, const SampleConfig& cfg) {
    std::vector<Estimate> out;
    for (Nat n : cfg.index_budget) out.push_back(estimate_exceedance(s, t, r, eps, n, cfg));
    return out;
}

/// |A ∩ [1, N]| / N, counted exactly.
inline Rational estimate_density(const IndexSet& A, Nat N) {
    if (N == 0) throw std::invalid_argument("N must be at least 1");
    Nat count = 0;
    for (Nat x = 1; x <= N; ++x)
        if (A.contains(x)) ++count;
    return Rational(Integer(count)) / Rational(Integer(N));
}

inline std::string estimates_csv(const std::vector<Estimate>& rows, int k) {
    std::ostringstream os;
    os << "n,estimate,sigma,exact,pass\n";
    for (const auto& e : rows) {
        auto ok = e.pass(k);
        os << e.n << ',' << e.value_d() << ',' << e.sigma << ',' << (e.exact ? to_string(*e.exact) : "") << ','
           << (ok ? (*ok ? "true" : "false") : "") << '\n';
    }
    return os.str();
}

}  // namespace roughlab
