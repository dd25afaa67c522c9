#pragma once

// Natural density of index sets and three-valued membership in a catalog of
// ideals on N. Verdicts carry JSON certificates that tests replay
// independently.

#include "roughlab/index_set.hpp"

#include "json.hpp"

#include <functional>

namespace roughlab {

struct DensityResult {
    enum class Kind { Exact, Interval, Unknown };
    Kind kind = Kind::Unknown;
    Rational lower = 0;
    Rational upper = 1;

    static DensityResult exact(Rational v) { return {Kind::Exact, v, v}; }
    static DensityResult interval(Rational lo, Rational hi) {
        if (lo == hi) return exact(lo);
        return {Kind::Interval, std::move(lo), std::move(hi)};
    }
    static DensityResult unknown() { return {}; }

    bool is_exact() const { return kind == Kind::Exact; }
    const Rational& value() const { return lower; }
    friend bool operator==(const DensityResult&, const DensityResult&) = default;
};

namespace detail {

inline Rational nat_q(Nat n) { return Rational(Integer(n)); }

inline DensityResult structural_density(const IndexSet& s) {
    using K = IndexSet::Kind;
    const auto& x = s.node();
    switch (x.kind) {
    case K::Finite:
    case K::Powers:
    case K::PolyImage: return DensityResult::exact(0);
    case K::Full: return DensityResult::exact(1);
    case K::ArithProg: return DensityResult::exact(Rational(1) / nat_q(x.a));
    case K::DyadicValuation: return DensityResult::exact(Rational(1) / nat_q(Nat{2} << x.a));
    case K::TailSolution: return DensityResult::exact(x.eventually_in ? 1 : 0);
    default: break;
    }
    auto l = structural_density(s.lhs());
    if (x.kind == K::Complement) {
        if (l.kind == DensityResult::Kind::Unknown) return l;
        return DensityResult::interval(1 - l.upper, 1 - l.lower);
    }
    auto r = structural_density(s.rhs());
    if (x.kind == K::Difference) r = DensityResult::interval(1 - r.upper, 1 - r.lower);
    if (x.kind == K::Union)
        return DensityResult::interval(std::max(l.lower, r.lower), std::min<Rational>(1, l.upper + r.upper));
    return DensityResult::interval(std::max<Rational>(0, l.lower + r.lower - 1), std::min(l.upper, r.upper));
}

}  // namespace detail

/// Exact whenever the set is eventually periodic up to sparse leaves with a
/// manageable period; otherwise rigorous interval bounds.
inline DensityResult natural_density(const IndexSet& s) {
    if (auto f = PeriodicForm::of(s)) return DensityResult::exact(Rational(Integer(f->base_count()), Integer(f->period())));
    return detail::structural_density(s);
}

// ---------------------------------------------------------------------------

using Submeasure = std::function<Rational(const std::vector<Nat>&)>;

/// phi(A) = sum of w(n) over A.
inline Submeasure weighted_submeasure(std::function<Rational(Nat)> w) {
    return [w = std::move(w)](const std::vector<Nat>& a) {
        Rational s = 0;
        for (Nat n : a) s += w(n);
        return s;
    };
}

inline Submeasure harmonic_submeasure() {
    return weighted_submeasure([](Nat n) { return Rational(1) / detail::nat_q(n); });
}

class Ideal {
public:
    enum class Kind { Fin, Density, Summable, ExhTruncated };

    static Ideal fin() { return Ideal(Kind::Fin); }
    static Ideal density() { return Ideal(Kind::Density); }
    /// Weights 1/n.
    static Ideal summable() { return Ideal(Kind::Summable); }
    static Ideal exh(Submeasure phi, Nat depth = 256, unsigned rungs = 12, Rational tolerance = Rational(1, 1000),
                     std::string name = "exh") {
        Ideal i(Kind::ExhTruncated);
        i.phi_ = std::move(phi);
        i.depth_ = depth;
        i.rungs_ = rungs;
        i.tolerance_ = std::move(tolerance);
        i.name_ = std::move(name);
        return i;
    }

    Kind kind() const noexcept { return kind_; }
    const Submeasure& phi() const { return phi_; }
    Nat depth() const noexcept { return depth_; }
    unsigned rungs() const noexcept { return rungs_; }
    const Rational& tolerance() const noexcept { return tolerance_; }

    std::string name() const {
        switch (kind_) {
        case Kind::Fin: return "fin";
        case Kind::Density: return "density";
        case Kind::Summable: return "summable";
        case Kind::ExhTruncated: return name_;
        }
        return "?";
    }

private:
    explicit Ideal(Kind k) : kind_(k) {}
    Kind kind_;
    Submeasure phi_;
    Nat depth_ = 0;
    unsigned rungs_ = 0;
    Rational tolerance_ = 0;
    std::string name_;
};

struct MembershipVerdict {
    enum class Answer { In, NotIn, Unknown };
    Answer answer = Answer::Unknown;
    nlohmann::json certificate;
    /// Set for Exh answers derived from a finite truncation ladder.
    bool truncation_based = false;

    bool in() const { return answer == Answer::In; }
    bool not_in() const { return answer == Answer::NotIn; }
    bool unknown() const { return answer == Answer::Unknown; }
};

inline std::string to_string(MembershipVerdict::Answer a) {
    switch (a) {
    case MembershipVerdict::Answer::In: return "in";
    case MembershipVerdict::Answer::NotIn: return "not_in";
    case MembershipVerdict::Answer::Unknown: return "unknown";
    }
    return "?";
}

namespace detail {

using nlohmann::json;
using A = MembershipVerdict::Answer;

inline MembershipVerdict verdict(A a, json cert) { return {a, std::move(cert), false}; }

inline json sparse_cover_certificate(const PeriodicForm& f) {
    json leaves = json::array();
    Rational bound = 0;
    for (const auto& l : f.sparse_leaves()) {
        if (l.kind == IndexSet::Kind::Powers) {
            // sum_{m>=1} 1/(c b^m) = 1/(c(b-1))
            Rational s = Rational(1) / (nat_q(l.p2) * (nat_q(l.p1) - 1));
            bound += s;
            leaves.push_back({{"leaf", "powers"}, {"base", l.p1}, {"scale", l.p2}, {"geometric_sum", to_string(s)}});
        } else {
            // sum_{m>=1} 1/(c m^k) <= (1/c)(1 + 1/(k-1))
            Rational s = (1 + Rational(1) / (nat_q(l.p2) - 1)) / nat_q(l.p1);
            bound += s;
            leaves.push_back({{"leaf", "poly"}, {"scale", l.p1}, {"degree", l.p2}, {"p_series_bound", to_string(s)}});
        }
    }
    return {{"kind", "sparse-cover"},
            {"period", f.period()},
            {"stable_from", f.stable_from()},
            {"leaves", leaves},
            {"tail_sum_bound", to_string(bound)}};
}

inline json residue_certificate(const PeriodicForm& f, const char* kind) {
    Nat r = *f.first_base_residue();
    return {{"kind", kind}, {"modulus", f.period()}, {"residue", r}, {"from", f.stable_from()}};
}

inline MembershipVerdict fin_member(const IndexSet& s) {
    auto f = PeriodicForm::of(s);
    if (!f) return verdict(A::Unknown, {{"kind", "period-too-large"}});
    if (f->base_count() > 0) return verdict(A::NotIn, residue_certificate(*f, "infinite-residue-class"));
    if (!f->sparse_can_contribute())
        return verdict(A::In, {{"kind", "finite"}, {"bound", f->stable_from()}});
    if (f->sparse_leaves().size() == 1) {
        const auto& l = f->sparse_leaves()[0];
        json c = {{"period", f->period()}, {"stable_from", f->stable_from()},
                  {"leaf", l.kind == IndexSet::Kind::Powers ? "powers" : "poly"}, {"p1", l.p1}, {"p2", l.p2}};
        if (f->single_sparse_leaf_infinite()) {
            c["kind"] = "infinite-sparse-cycle";
            return verdict(A::NotIn, c);
        }
        c["kind"] = "finite";
        c["bound"] = f->stable_from();
        return verdict(A::In, c);
    }
    return verdict(A::Unknown, {{"kind", "several-sparse-leaves"}});
}

inline MembershipVerdict summable_member(const IndexSet& s) {
    auto f = PeriodicForm::of(s);
    if (!f) return verdict(A::Unknown, {{"kind", "period-too-large"}});
    if (f->base_count() > 0) return verdict(A::NotIn, residue_certificate(*f, "harmonic-divergence"));
    return verdict(A::In, sparse_cover_certificate(*f));
}

inline MembershipVerdict density_member(const IndexSet& s) {
    auto d = natural_density(s);
    if (d.is_exact()) {
        json c = {{"kind", "density"}, {"value", to_string(d.value())}};
        return verdict(d.value() == 0 ? A::In : A::NotIn, c);
    }
    if (d.kind == DensityResult::Kind::Interval) {
        json c = {{"kind", "density-interval"}, {"lower", to_string(d.lower)}, {"upper", to_string(d.upper)}};
        if (d.upper == 0) return verdict(A::In, c);
        if (d.lower > 0) return verdict(A::NotIn, c);
        return verdict(A::Unknown, c);
    }
    return verdict(A::Unknown, {{"kind", "no-density"}});
}

inline MembershipVerdict exh_member(const Ideal& I, const IndexSet& s) {
    json ladder = json::array();
    std::vector<Rational> values;
    for (unsigned i = 0; i < I.rungs(); ++i) {
        Nat t = Nat{1} << i;
        std::vector<Nat> window;
        for (Nat n = t + 1; n <= t + I.depth(); ++n)
            if (s.contains(n)) window.push_back(n);
        values.push_back(I.phi()(window));
        ladder.push_back({{"t", t}, {"phi", to_string(values.back())}});
    }
    bool monotone = std::is_sorted(values.rbegin(), values.rend());
    bool small = !values.empty() && values.back() <= I.tolerance();
    json c = {{"kind", "truncation-ladder"}, {"depth", I.depth()}, {"tolerance", to_string(I.tolerance())},
              {"ladder", ladder}};
    if (monotone && small) return {A::In, c, true};
    return verdict(A::Unknown, c);
}

}  // namespace detail

inline MembershipVerdict ideal_member(const Ideal& I, const IndexSet& s) {
    switch (I.kind()) {
    case Ideal::Kind::Fin: return detail::fin_member(s);
    case Ideal::Kind::Density: return detail::density_member(s);
    case Ideal::Kind::Summable: return detail::summable_member(s);
    case Ideal::Kind::ExhTruncated: return detail::exh_member(I, s);
    }
    return {};
}

/// Membership of s in the dual filter {A : N \ A in I}.
inline MembershipVerdict dual_filter_member(const Ideal& I, const IndexSet& s) { return ideal_member(I, ~s); }

// ---------------------------------------------------------------------------

struct NoDensityData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Piece densities scale * ratio^j for j >= 1.
struct GeometricDensities {
    Rational scale;
    Rational ratio;
};

inline GeometricDensities dyadic_family_densities() { return {1, Rational(1, 2)}; }

/// Upper bound on the upper density of the union of pieces j > J:
/// Interval(0, sum_{j>J} scale * ratio^j).
inline DensityResult tail_union_upper_density(const std::optional<GeometricDensities>& family, Nat J) {
    if (!family) throw NoDensityData("family pieces carry no exact density");
    const auto& [a, q] = *family;
    if (q <= 0 || q >= 1 || a < 0) throw NoDensityData("family densities are not a convergent geometric series");
    Rational tail = a * roughlab::pow(q, static_cast<std::int64_t>(J) + 1) / (1 - q);
    return {DensityResult::Kind::Interval, 0, tail};
}

}  // namespace roughlab
