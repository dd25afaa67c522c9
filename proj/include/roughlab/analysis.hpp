#pragma once

// Decision procedures over a PiecewiseSequence: rough I-convergence in
// probability, limit points and the two kinds of cluster points, plus the
// finite probes built on them (sandwich, diameter, I-a.s. equivalence,
// closedness, proximity-grid monotonicity).
//
// Everything is organised by regions: each fixed piece, the family members
// A_j for j < J0, and the family tail (all A_j with j >= J0), where J0 is the
// index past which every (atom, target atom) pair sits on a fixed side of r.

#include "roughlab/ideal.hpp"
#include "roughlab/kyfan.hpp"
#include "roughlab/sequence.hpp"

namespace roughlab {

using nlohmann::json;

enum class Answer { Yes, No, Unknown };

inline std::string to_string(Answer a) {
    switch (a) {
    case Answer::Yes: return "Yes";
    case Answer::No: return "No";
    case Answer::Unknown: return "Unknown";
    }
    return "?";
}

struct Verdict {
    Answer answer = Answer::Unknown;
    json certificate = json::object();
    json witness;  // null unless answer is No and a witness exists

    json to_json() const {
        json j{{"answer", to_string(answer)}, {"certificate", certificate}};
        if (!witness.is_null()) j["witness"] = witness;
        return j;
    }
};

struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisNotEstablished : AnalysisError {
    using AnalysisError::AnalysisError;
};
struct UnverifiedMember : AnalysisError {
    using AnalysisError::AnalysisError;
};
struct NotIdealAlmostSure : AnalysisError {
    using AnalysisError::AnalysisError;
};
struct NotConvergentFamily : AnalysisError {
    using AnalysisError::AnalysisError;
};

/// Family members past this index are not enumerated (dyadic periods blow up).
inline constexpr Nat kMaxFamilyIndex = 20;

// ---------------------------------------------------------------------------
// Regions

/// Family atom values kept as functions of j; masses stay functions of n.
inline PieceView family_symbolic_view(const PiecewiseSequence& s, const Target& t) {
    const auto& f = *s.family();
    std::vector<ExpRational> values;
    for (const auto& a : f.atoms) values.push_back(a.value);
    return detail::atom_view(f.atoms, values, t, t.coupling.family_table, "family");
}

struct Region {
    enum class Kind { Piece, Member, Tail };
    Kind kind = Kind::Piece;
    std::size_t piece = 0;
    Nat j = 0;       // member index, or the first index of the tail
    IndexSet set;    // the region itself (for the tail: union of its members)
    PieceView view;  // for the tail: the view of member j

    std::string label() const {
        switch (kind) {
        case Kind::Piece: return "piece " + std::to_string(piece);
        case Kind::Member: return "family j=" + std::to_string(j);
        case Kind::Tail: return "family j>=" + std::to_string(j);
        }
        return "?";
    }
};

struct RegionStatus {
    Region region;
    MembershipVerdict membership;         // of region.set
    std::optional<MembershipVerdict> member;  // tail only: membership of A_j at the tail's first j
    MassProfile profile;

    /// Membership relevant for "some NotIn piece" rules: a single member for the tail.
    const MembershipVerdict& witness_membership() const { return member ? *member : membership; }

    json to_json() const {
        json j{{"region", region.label()},
               {"set", region.set.to_string()},
               {"membership", to_string(membership.answer)},
               {"membership_certificate", membership.certificate},
               {"c_plus", to_string(profile.c_plus)}};
        if (member) j["member_membership"] = to_string(member->answer);
        return j;
    }
};

struct FamilyShape {
    Nat J0 = 1;
    bool capped = false;     // J0 exceeded kMaxFamilyIndex
    Rational c_plus_inf;     // limiting mass with lim_j distance <= r
    bool tail_members_not_in = false;  // every A_j with j >= J0 is outside I
    json certificate;
};

struct RegionAnalysis {
    std::vector<RegionStatus> regions;
    std::optional<FamilyShape> family;
};

namespace detail {

/// Each A_j is the residue class 2^(j-1) mod 2^j minus U. When U is in I and
/// I is one of fin/density/summable, every such class lies outside I.
inline bool residue_classes_outside(const Ideal& I) {
    return I.kind() == Ideal::Kind::Fin || I.kind() == Ideal::Kind::Density || I.kind() == Ideal::Kind::Summable;
}

}  // namespace detail

inline RegionAnalysis analyse_regions(const PiecewiseSequence& s, const Target& t, const Rational& r, const Ideal& I) {
    RegionAnalysis out;
    for (std::size_t i = 0; i < s.pieces().size(); ++i) {
        Region reg{Region::Kind::Piece, i, 0, s.pieces()[i].region, piece_view(s, t, i)};
        auto m = ideal_member(I, reg.set);
        auto prof = limiting_mass_profile(reg.view, r);
        out.regions.push_back({std::move(reg), std::move(m), std::nullopt, std::move(prof)});
    }
    if (!s.family()) return out;

    FamilyShape fs;
    auto sym = family_symbolic_view(s, t);
    fs.J0 = std::max<Nat>(1, distance_prob_fn(sym, Rel::LessEq, r).from);
    if (fs.J0 > kMaxFamilyIndex) {
        fs.J0 = kMaxFamilyIndex;
        fs.capped = true;
    }
    fs.c_plus_inf = limiting_mass_profile(sym, r).c_plus;
    auto u = s.pieces().empty() ? MembershipVerdict{MembershipVerdict::Answer::In, {{"kind", "empty"}}, false}
                                : ideal_member(I, s.fixed_union());
    fs.tail_members_not_in = !fs.capped && u.in() && detail::residue_classes_outside(I);
    fs.certificate = {{"J0", fs.J0},
                      {"capped", fs.capped},
                      {"c_plus_inf", to_string(fs.c_plus_inf)},
                      {"fixed_union_membership", to_string(u.answer)},
                      {"tail_members_not_in", fs.tail_members_not_in}};

    for (Nat j = 1; j < fs.J0; ++j) {
        Region reg{Region::Kind::Member, 0, j, s.family_region(j), family_view(s, t, j)};
        auto m = ideal_member(I, reg.set);
        auto prof = limiting_mass_profile(reg.view, r);
        out.regions.push_back({std::move(reg), std::move(m), std::nullopt, std::move(prof)});
    }
    Region tail{Region::Kind::Tail, 0, fs.J0, s.family_tail_region(fs.J0), family_view(s, t, fs.J0)};
    auto m = ideal_member(I, tail.set);
    auto mem = ideal_member(I, s.family_region(fs.J0));
    auto prof = limiting_mass_profile(tail.view, r);
    out.regions.push_back({std::move(tail), std::move(m), std::move(mem), std::move(prof)});
    out.family = std::move(fs);
    return out;
}

// ---------------------------------------------------------------------------
// Level sets {n : P(d(X_n, Y) rel thr) > level}

namespace detail {

/// {n in region : P_n > level} with P_n = sp.fn(n) for n >= sp.from and the
/// direct value below that.
template <class Direct>
IndexSet solve_level(const IndexSet& region, const SymbolicProb& sp, const Rational& level, Direct direct) {
    auto T = threshold_solution(sp.fn, Cmp::Greater, level);
    const auto& node = T.node();
    Nat n0 = std::max(node.n0, sp.from);
    std::vector<Nat> below;
    for (Nat n = 1; n < n0; ++n) {
        if (!region.contains(n)) continue;
        bool in = n < sp.from ? direct(n) > level : T.contains(n);
        if (in) below.push_back(n);
    }
    return region & IndexSet::tail_solution(node.eventually_in, n0, std::move(below));
}

}  // namespace detail

inline IndexSet level_set(const PiecewiseSequence& s, const Target& t, Rel rel, const Rational& thr, const Rational& level) {
    auto direct = [&](Nat n) { return distance_prob_at(s, t, n, rel, thr); };
    std::optional<IndexSet> out;
    auto add = [&](IndexSet part) { out = out ? (*out | part) : std::move(part); };
    for (std::size_t i = 0; i < s.pieces().size(); ++i) {
        const auto& region = s.pieces()[i].region;
        add(detail::solve_level(region, distance_prob_fn(piece_view(s, t, i), rel, thr), level, direct));
    }
    if (s.family()) {
        auto spj = distance_prob_fn(family_symbolic_view(s, t), rel, thr);
        Nat J = std::min(std::max<Nat>(spj.from, 1), kMaxFamilyIndex);
        for (Nat j = 1; j < J; ++j) {
            auto sp = distance_prob_fn(family_view(s, t, j), rel, thr);
            sp.from = 1;
            add(detail::solve_level(s.family_region(j), sp, level, direct));
        }
        if (spj.from > kMaxFamilyIndex) throw AnalysisError("family classification at threshold " + to_string(thr) + " settles only at j = " +
                                std::to_string(spj.from) + " (limit " + std::to_string(kMaxFamilyIndex) + ")");
        spj.from = 1;
        add(detail::solve_level(s.family_tail_region(J), spj, level, direct));
    }
    return out ? *out : IndexSet::empty();
}

/// The level set traced on one region; the tail is represented by its first member.
inline IndexSet region_level_set(const PiecewiseSequence& s, const Target& t, const Region& reg, Rel rel, const Rational& thr,
                                 const Rational& level) {
    auto direct = [&](Nat n) { return distance_prob_at(s, t, n, rel, thr); };
    if (reg.kind == Region::Kind::Piece)
        return detail::solve_level(reg.set, distance_prob_fn(reg.view, rel, thr), level, direct);
    auto sp = distance_prob_fn(family_view(s, t, reg.j), rel, thr);
    sp.from = 1;
    return detail::solve_level(s.family_region(reg.j), sp, level, direct);
}

/// {n : P(d > r + eps) > delta}
inline IndexSet exception_set(const PiecewiseSequence& s, const Target& t, const Rational& r, const Rational& eps,
                              const Rational& delta) {
    return level_set(s, t, Rel::Greater, r + eps, delta);
}

/// {n : P(d < r + eps) > level}
inline IndexSet proximity_set(const PiecewiseSequence& s, const Target& t, const Rational& r, const Rational& eps,
                              const Rational& level) {
    return level_set(s, t, Rel::Less, r + eps, level);
}

// ---------------------------------------------------------------------------
// Rough I-convergence in probability

inline Verdict check_rough_limit(const PiecewiseSequence& s, const Target& t, const Rational& r, const Ideal& I) {
    if (r < 0) throw std::invalid_argument("roughness must be nonnegative");
    auto ra = analyse_regions(s, t, r, I);
    Verdict v;
    v.certificate = {{"r", to_string(r)}, {"ideal", I.name()}, {"regions", json::array()}};
    if (ra.family) v.certificate["family"] = ra.family->certificate;
    std::vector<std::string> blockers;

    for (const auto& st : ra.regions) {
        v.certificate["regions"].push_back(st.to_json());
        if (st.profile.c_plus == 1 || st.membership.in()) continue;
        const auto& m = st.witness_membership();
        if (!m.not_in()) {
            blockers.push_back(st.region.label() + ": membership unknown with c_plus = " + to_string(st.profile.c_plus));
            continue;
        }
        Rational gap = st.profile.min_gap().value_or(1);
        Rational eps = std::min(gap, Rational(1)) / 4;
        Rational limit = st.profile.exceedance_limit();
        Rational delta = limit / 2;
        // the whole set may be out of reach (late family crossings); its trace
        // on the witness region suffices since ideals are hereditary
        std::optional<MembershipVerdict> replay;
        try {
            replay = ideal_member(I, exception_set(s, t, r, eps, delta));
        } catch (const AnalysisError&) {
        }
        bool restricted = false;
        if (!replay || !replay->not_in()) {
            replay = ideal_member(I, region_level_set(s, t, st.region, Rel::Greater, r + eps, delta));
            restricted = true;
        }
        v.answer = Answer::No;
        v.witness = {{"epsilon", to_string(eps)},
                     {"delta", to_string(delta)},
                     {"region", st.region.label()},
                     {"exceedance_limit", to_string(limit)},
                     {"not_in_certificate", m.certificate},
                     {"replay", {{"answer", to_string(replay->answer)}, {"restricted_to_region", restricted},
                                 {"certificate", replay->certificate}}}};
        return v;
    }
    if (!blockers.empty()) {
        v.answer = Answer::Unknown;
        v.certificate["blocking"] = blockers;
        return v;
    }
    v.answer = Answer::Yes;
    return v;
}

// ---------------------------------------------------------------------------
// Limit points and cluster points

struct ClusterReport {
    Verdict limit_point, strong_cluster, weak_cluster;
    std::optional<Rational> delta_star_sup;

    json to_json() const {
        json j{{"limit_point", limit_point.to_json()},
               {"strong_cluster", strong_cluster.to_json()},
               {"weak_cluster", weak_cluster.to_json()}};
        j["delta_star_sup"] = delta_star_sup ? json(to_string(*delta_star_sup)) : json(nullptr);
        return j;
    }
};

namespace detail {

/// Smallest positive gap between r and a limiting distance above r, over the
/// given regions and the family's j-limits; 1 when there is none.
inline Rational common_gap(const RegionAnalysis& ra, const PiecewiseSequence& s, const Target& t, const Rational& r) {
    Rational g = 1;
    for (const auto& st : ra.regions)
        if (auto x = st.profile.min_gap()) g = std::min(g, *x);
    if (ra.family)
        if (auto x = limiting_mass_profile(family_symbolic_view(s, t), r).min_gap()) g = std::min(g, *x);
    return g;
}

template <class Build>
MembershipVerdict replay_membership(const Ideal& I, Build build) {
    try {
        return ideal_member(I, build());
    } catch (const AnalysisError& e) {
        return {MembershipVerdict::Answer::Unknown, {{"kind", "not-constructed"}, {"reason", e.what()}}, false};
    }
}

}  // namespace detail

inline ClusterReport classify_cluster(const PiecewiseSequence& s, const Target& t, const Rational& r, const Ideal& I) {
    if (r < 0) throw std::invalid_argument("roughness must be nonnegative");
    auto ra = analyse_regions(s, t, r, I);
    const auto& fam = ra.family;
    json regions = json::array();
    for (const auto& st : ra.regions) regions.push_back(st.to_json());
    json base{{"r", to_string(r)}, {"ideal", I.name()}, {"regions", regions}};
    if (fam) base["family"] = fam->certificate;

    bool family_limit_usable = fam && fam->tail_members_not_in;
    Rational eps = detail::common_gap(ra, s, t, r) / 4;
    ClusterReport rep;

    // strong: some NotIn region whose limiting mass within r is everything
    {
        Verdict v;
        v.certificate = base;
        std::vector<std::string> yes, blockers;
        for (const auto& st : ra.regions) {
            if (st.profile.c_plus != 1) continue;
            const auto& m = st.witness_membership();
            if (m.not_in()) yes.push_back(st.region.label());
            else if (m.unknown()) blockers.push_back(st.region.label());
        }
        if (fam && fam->c_plus_inf == 1) {
            if (family_limit_usable) yes.push_back("family members j -> infinity");
            else blockers.push_back("family limit (tail membership not established)");
        }
        if (!yes.empty()) {
            v.answer = Answer::Yes;
            v.certificate["via"] = yes;
        } else if (!blockers.empty()) {
            v.answer = Answer::Unknown;
            v.certificate["blocking"] = blockers;
        } else {
            Rational M = 0;
            for (const auto& st : ra.regions)
                if (!st.witness_membership().in()) M = std::max(M, st.profile.c_plus);
            if (fam) M = std::max(M, fam->c_plus_inf);
            Rational delta = (1 - M) / 2;
            auto replay = detail::replay_membership(I, [&] { return proximity_set(s, t, r, eps, 1 - delta); });
            v.answer = Answer::No;
            v.witness = {{"epsilon", to_string(eps)},
                         {"delta", to_string(delta)},
                         {"max_c_plus", to_string(M)},
                         {"replay", {{"answer", to_string(replay.answer)}, {"certificate", replay.certificate}}}};
        }
        rep.strong_cluster = std::move(v);
    }

    // weak: M = largest c_plus over NotIn regions
    {
        Verdict v;
        v.certificate = base;
        Rational M = 0;
        std::string via;
        bool blocked = false;
        for (const auto& st : ra.regions) {
            const auto& m = st.witness_membership();
            if (m.not_in() && st.profile.c_plus > M) {
                M = st.profile.c_plus;
                via = st.region.label();
            }
            if (m.unknown() && st.profile.c_plus > 0) blocked = true;
        }
        if (fam && fam->c_plus_inf > 0) {
            if (family_limit_usable && fam->c_plus_inf > M) {
                M = fam->c_plus_inf;
                via = "family members j -> infinity";
            } else if (!family_limit_usable) {
                blocked = true;
            }
        }
        if (M > 0) {
            v.answer = Answer::Yes;
            v.certificate["via"] = via;
            rep.delta_star_sup = M;
        } else if (blocked) {
            v.answer = Answer::Unknown;
        } else {
            Rational dstar(1, 100);
            auto replay = detail::replay_membership(I, [&] { return proximity_set(s, t, r, eps, dstar); });
            v.answer = Answer::No;
            v.witness = {{"epsilon", to_string(eps)},
                         {"delta_star_probe", to_string(dstar)},
                         {"replay", {{"answer", to_string(replay.answer)}, {"certificate", replay.certificate}}}};
        }
        rep.weak_cluster = std::move(v);
    }

    // limit point: single-piece sufficiency, vanishing-tail-density necessity
    {
        Verdict v;
        v.certificate = base;
        std::vector<std::string> yes, blockers;
        for (const auto& st : ra.regions) {
            if (st.profile.c_plus != 1) continue;
            const auto& m = st.witness_membership();
            if (m.not_in()) yes.push_back(st.region.label());
            else if (m.unknown()) blockers.push_back(st.region.label());
        }
        if (!yes.empty()) {
            v.answer = Answer::Yes;
            v.certificate["rule"] = "single-piece";
            v.certificate["via"] = yes;
        } else if (!blockers.empty()) {
            v.answer = Answer::Unknown;
            v.certificate["blocking"] = blockers;
        } else if (!fam) {
            // any A along which X_n -> Y meets every region in a finite or I-small set
            v.answer = Answer::No;
            v.certificate["rule"] = "finite-assembly";
        } else if (I.kind() == Ideal::Kind::Density && !fam->capped) {
            auto bound = tail_union_upper_density(dyadic_family_densities(), fam->J0);
            v.answer = Answer::No;
            v.certificate["rule"] = "vanishing-tail-density";
            v.certificate["tail_upper_density_bound"] = {{"J", fam->J0}, {"upper", to_string(bound.upper)},
                                                         {"decay", "2^-J for every J >= J0"}};
        } else {
            v.answer = Answer::Unknown;
            v.certificate["blocking"] = "family assembly outside the implemented rules";
        }
        rep.limit_point = std::move(v);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ky Fan route: I-convergence in probability without roughness

/// Ky Fan distance of the limiting distance law of one region; escaping
/// mass sits at 2 (beyond the cap of 1).
inline Rational limiting_kyfan(const MassProfile& p) {
    std::vector<Atom> atoms;
    for (const auto& x : p.pairs)
        if (x.mass > 0) atoms.push_back({x.infinite ? Rational(2) : x.dist, x.mass});
    return kyfan_of_law(make_dist(ValueSpace::real_line(), std::move(atoms))).rho;
}

inline Rational rho_at(const PiecewiseSequence& s, const Target& t, Nat n) { return kyfan_between(coupling_at(s, t, n)).rho; }

/// rho(X_n, Y) -> 0 along I, decided region by region from the limiting
/// distance laws.
inline Verdict metric_verdict(const PiecewiseSequence& s, const Target& t, const Ideal& I) {
    auto ra = analyse_regions(s, t, 0, I);
    Verdict v;
    v.certificate = {{"ideal", I.name()}, {"regions", json::array()}};
    if (ra.family) v.certificate["family"] = ra.family->certificate;
    bool blocked = false;
    for (const auto& st : ra.regions) {
        Rational lambda = limiting_kyfan(st.profile);
        auto rj = st.to_json();
        rj["limiting_rho"] = to_string(lambda);
        v.certificate["regions"].push_back(rj);
        if (lambda == 0 || st.membership.in()) continue;
        if (st.witness_membership().not_in()) {
            if (v.answer != Answer::No) {
                v.answer = Answer::No;
                v.witness = {{"region", st.region.label()}, {"limiting_rho", to_string(lambda)},
                             {"epsilon", to_string(lambda / 2)}};
            }
        } else {
            blocked = true;
        }
    }
    if (v.answer != Answer::No) v.answer = blocked ? Answer::Unknown : Answer::Yes;
    return v;
}

// ---------------------------------------------------------------------------
// Probes

struct ProbeCandidate {
    std::string name;
    FiniteDist law = degenerate(Rational(0));
    bool same_as_target = false;  // Y is X_* itself (diagonal coupling)
};

struct SandwichRow {
    std::string name;
    Answer theta = Answer::Unknown, lim = Answer::Unknown, ball = Answer::Unknown;
    Rational p_far, rho;
    bool consistent = true;
};

struct SandwichReport {
    Verdict precheck;
    std::vector<SandwichRow> rows;
    bool fatal = false;

    json to_json() const {
        json rs = json::array();
        for (const auto& r : rows)
            rs.push_back({{"candidate", r.name},
                          {"theta_bar", to_string(r.theta)},
                          {"lim", to_string(r.lim)},
                          {"closed_ball", to_string(r.ball)},
                          {"p_distance_ge_r", to_string(r.p_far)},
                          {"rho", to_string(r.rho)},
                          {"consistent", r.consistent}});
        return {{"precheck", precheck.to_json()}, {"rows", rs}, {"fatal", fatal}};
    }
};

/// theta_bar_r(X_*) ⊆ LIM^r ⊆ closed Ky Fan ball, checked on finitely many candidates.
inline SandwichReport sandwich_probe(const PiecewiseSequence& s, const Target& x_star, const Rational& r, const Ideal& I,
                                     const std::vector<ProbeCandidate>& candidates) {
    SandwichReport rep;
    rep.precheck = check_rough_limit(s, x_star, 0, I);
    if (rep.precheck.answer != Answer::Yes)
        throw HypothesisNotEstablished("X_n is not shown to converge to " + x_star.name + " (answer " +
                                       to_string(rep.precheck.answer) + ")");
    for (const auto& c : candidates) {
        SandwichRow row;
        row.name = c.name;
        Coupling xy = c.same_as_target ? diagonal_coupling(x_star.law) : product_coupling(x_star.law, c.law);
        auto dl = distance_law(xy);
        row.p_far = 0;
        for (const auto& a : dl.atoms())
            if (std::get<Rational>(a.value) >= r) row.p_far += a.prob;
        row.rho = kyfan_of_law(dl).rho;
        row.theta = row.p_far == 0 ? Answer::Yes : Answer::No;
        row.ball = row.rho <= r ? Answer::Yes : Answer::No;
        Target y = c.same_as_target ? x_star : Target{c.name, c.law, {}};
        row.lim = check_rough_limit(s, y, r, I).answer;
        if (row.theta == Answer::Yes && row.lim == Answer::No) row.consistent = false;
        if (row.lim == Answer::Yes && row.ball == Answer::No) row.consistent = false;
        rep.fatal = rep.fatal || !row.consistent;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

struct DiameterReport {
    Rational max_rho, bound;
    json pairs = json::array();
    bool fatal = false;

    json to_json() const {
        return {{"max_rho", to_string(max_rho)}, {"bound", to_string(bound)}, {"pairs", pairs}, {"fatal", fatal}};
    }
};

/// Pairwise Ky Fan distances (independent couplings) among verified rough
/// limits never exceed min(1, 2r).
inline DiameterReport diameter_probe(const PiecewiseSequence& s, const Rational& r, const Ideal& I,
                                     const std::vector<Target>& members) {
    for (const auto& m : members) {
        auto v = check_rough_limit(s, m, r, I);
        if (v.answer != Answer::Yes)
            throw UnverifiedMember(m.name + " is not a verified rough limit (answer " + to_string(v.answer) + ")");
    }
    DiameterReport rep;
    rep.bound = std::min(Rational(1), Rational(2 * r));
    rep.max_rho = 0;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            Rational rho = kyfan_between(product_coupling(members[a].law, members[b].law)).rho;
            rep.max_rho = std::max(rep.max_rho, rho);
            rep.pairs.push_back({{"a", members[a].name}, {"b", members[b].name}, {"rho", to_string(rho)}});
        }
    rep.fatal = rep.max_rho > rep.bound;
    return rep;
}

struct EquivalenceReport {
    Verdict lim_x, lim_y;
    ClusterReport cluster_x, cluster_y;
    bool identical = true;
    bool fatal = false;

    json to_json() const {
        return {{"lim", {{"x", lim_x.to_json()}, {"y", lim_y.to_json()}}},
                {"cluster", {{"x", cluster_x.to_json()}, {"y", cluster_y.to_json()}}},
                {"identical", identical},
                {"fatal", fatal}};
    }
};

/// Sequences whose laws differ only on D in I share every verdict.
inline EquivalenceReport ias_equivalence_probe(const PiecewiseSequence& sx, const PiecewiseSequence& sy, const IndexSet& D,
                                               const Ideal& I, const Target& t, const Rational& r, Nat check_upto = 10000) {
    auto m = ideal_member(I, D);
    if (!m.in()) throw NotIdealAlmostSure("difference set " + D.to_string() + " is not shown to be in " + I.name());
    for (Nat n = 1; n <= check_upto; ++n)
        if (!D.contains(n) && sx.law_at(n) != sy.law_at(n))
            throw NotIdealAlmostSure("laws differ at n = " + std::to_string(n) + " outside the declared set");
    EquivalenceReport rep;
    rep.lim_x = check_rough_limit(sx, t, r, I);
    rep.lim_y = check_rough_limit(sy, t, r, I);
    rep.cluster_x = classify_cluster(sx, t, r, I);
    rep.cluster_y = classify_cluster(sy, t, r, I);
    auto same = [](const Verdict& a, const Verdict& b) { return a.answer == b.answer; };
    rep.identical = same(rep.lim_x, rep.lim_y) && same(rep.cluster_x.limit_point, rep.cluster_y.limit_point) &&
                    same(rep.cluster_x.strong_cluster, rep.cluster_y.strong_cluster) &&
                    same(rep.cluster_x.weak_cluster, rep.cluster_y.weak_cluster) &&
                    rep.cluster_x.delta_star_sup == rep.cluster_y.delta_star_sup;
    // Unknown on one side only is a limitation, not a contradiction
    auto clash = [](const Verdict& a, const Verdict& b) {
        return a.answer != b.answer && a.answer != Answer::Unknown && b.answer != Answer::Unknown;
    };
    rep.fatal = clash(rep.lim_x, rep.lim_y) || clash(rep.cluster_x.limit_point, rep.cluster_y.limit_point) ||
                clash(rep.cluster_x.strong_cluster, rep.cluster_y.strong_cluster) ||
                clash(rep.cluster_x.weak_cluster, rep.cluster_y.weak_cluster);
    return rep;
}

struct ClosednessReport {
    std::vector<Rational> rho_to_limit;
    std::vector<Answer> lim, strong, weak;
    std::vector<std::optional<Rational>> delta_star;
    Answer lim_z = Answer::Unknown, strong_z = Answer::Unknown, weak_z = Answer::Unknown;
    bool weak_inf_positive = false;  // heuristic: min delta* >= delta*(Y_1)/2
    json violations = json::array();
    bool fatal = false;

    json to_json() const {
        json members = json::array();
        for (std::size_t k = 0; k < lim.size(); ++k)
            members.push_back({{"k", k + 1},
                               {"rho_to_limit", to_string(rho_to_limit[k])},
                               {"lim", to_string(lim[k])},
                               {"strong_cluster", to_string(strong[k])},
                               {"weak_cluster", to_string(weak[k])},
                               {"delta_star_sup", delta_star[k] ? json(to_string(*delta_star[k])) : json(nullptr)}});
        return {{"members", members},
                {"limit", {{"lim", to_string(lim_z)}, {"strong_cluster", to_string(strong_z)}, {"weak_cluster", to_string(weak_z)}}},
                {"weak_inf_positive_probed", weak_inf_positive},
                {"violations", violations},
                {"fatal", fatal}};
    }
};

/// Ky Fan limits of LIM^r members, strong cluster points and (with delta*
/// bounded away from 0) weak cluster points keep their property.
inline ClosednessReport closedness_probe(const PiecewiseSequence& s, const Rational& r, const Ideal& I,
                                         const std::vector<Target>& family, const Target& z) {
    if (family.empty()) throw NotConvergentFamily("empty family");
    ClosednessReport rep;
    for (const auto& y : family) rep.rho_to_limit.push_back(kyfan_between(product_coupling(y.law, z.law)).rho);
    for (std::size_t k = 1; k < family.size(); ++k)
        if (rep.rho_to_limit[k] > rep.rho_to_limit[k - 1])
            throw NotConvergentFamily("Ky Fan distance to the limit increases at k = " + std::to_string(k + 1));
    if (rep.rho_to_limit.back() != 0 && rep.rho_to_limit.back() >= rep.rho_to_limit.front())
        throw NotConvergentFamily("Ky Fan distance to the limit does not decrease");

    bool all_lim = true, all_strong = true, all_weak = true;
    Rational min_delta = 2;
    for (const auto& y : family) {
        auto l = check_rough_limit(s, y, r, I).answer;
        auto c = classify_cluster(s, y, r, I);
        rep.lim.push_back(l);
        rep.strong.push_back(c.strong_cluster.answer);
        rep.weak.push_back(c.weak_cluster.answer);
        rep.delta_star.push_back(c.delta_star_sup);
        all_lim = all_lim && l == Answer::Yes;
        all_strong = all_strong && c.strong_cluster.answer == Answer::Yes;
        all_weak = all_weak && c.weak_cluster.answer == Answer::Yes;
        if (c.delta_star_sup) min_delta = std::min(min_delta, *c.delta_star_sup);
    }
    rep.lim_z = check_rough_limit(s, z, r, I).answer;
    auto cz = classify_cluster(s, z, r, I);
    rep.strong_z = cz.strong_cluster.answer;
    rep.weak_z = cz.weak_cluster.answer;
    rep.weak_inf_positive = all_weak && rep.delta_star.front() && min_delta >= *rep.delta_star.front() / 2;

    auto expect = [&](bool premise, Answer got, const char* what) {
        if (premise && got == Answer::No) rep.violations.push_back(what);
    };
    expect(all_lim, rep.lim_z, "rough limit set not closed");
    expect(all_strong, rep.strong_z, "strong cluster set not closed");
    expect(rep.weak_inf_positive, rep.weak_z, "weak cluster set not closed under bounded delta*");
    rep.fatal = !rep.violations.empty();
    return rep;
}

struct ProximityGridReport {
    // membership[i][k] for eps_i = i/10, delta_k = k/11, i,k = 1..10
    std::vector<std::vector<MembershipVerdict::Answer>> membership;
    json violations = json::array();

    json to_json() const {
        json g = json::array();
        for (const auto& row : membership) {
            json jr = json::array();
            for (auto a : row) jr.push_back(to_string(a));
            g.push_back(jr);
        }
        return {{"grid", g}, {"violations", violations}};
    }
};

/// Proximity sets {n : P(d < r + eps) > delta} in I stay in I when eps
/// shrinks or delta grows.
inline ProximityGridReport proximity_grid_probe(const PiecewiseSequence& s, const Target& t, const Rational& r, const Ideal& I) {
    ProximityGridReport rep;
    rep.membership.assign(10, std::vector<MembershipVerdict::Answer>(10));
    for (int i = 1; i <= 10; ++i)
        for (int k = 1; k <= 10; ++k)
            rep.membership[i - 1][k - 1] = ideal_member(I, proximity_set(s, t, r, Rational(i, 10), Rational(k, 11))).answer;
    using A = MembershipVerdict::Answer;
    for (int i = 0; i < 10; ++i)
        for (int k = 0; k < 10; ++k) {
            if (rep.membership[i][k] != A::In) continue;
            for (int a = 0; a <= i; ++a)
                for (int b = k; b < 10; ++b)
                    if (rep.membership[a][b] == A::NotIn)
                        rep.violations.push_back({{"in_at", {i + 1, k + 1}}, {"not_in_at", {a + 1, b + 1}}});
        }
    return rep;
}

struct NonEmptinessReport {
    std::vector<std::string> tried;
    std::optional<std::string> found;

    json to_json() const { return {{"tried", tried}, {"found", found ? json(*found) : json(nullptr)}}; }
};

/// For models whose fixed pieces have laws constant in n, the law of each
/// piece, coupled diagonally on that piece and independently elsewhere, is a
/// strong cluster point whenever the piece lies outside I.
inline NonEmptinessReport strong_cluster_nonempty_probe(const PiecewiseSequence& s, const Rational& r, const Ideal& I) {
    if (s.family()) throw AnalysisError("non-emptiness probe needs a model without a family");
    for (const auto& p : s.pieces()) {
        if (p.binomial) throw AnalysisError("non-emptiness probe needs atom pieces");
        for (const auto& a : p.atoms)
            if (!a.value.is_constant() || !a.prob.is_constant())
                throw AnalysisError("non-emptiness probe needs laws constant in n");
    }
    NonEmptinessReport rep;
    for (std::size_t i = 0; i < s.pieces().size(); ++i) {
        const auto& piece = s.pieces()[i];
        std::vector<Atom> atoms;
        for (const auto& a : piece.atoms) atoms.push_back({a.value.constant_value(), a.prob.constant_value()});
        auto law = make_dist(ValueSpace::real_line(), std::move(atoms));
        CouplingSpec cs{CouplingSpec::Kind::Joint, {}, std::nullopt};
        for (std::size_t k = 0; k < s.pieces().size(); ++k) {
            JointTable tab;
            for (const auto& a : s.pieces()[k].atoms) {
                std::vector<ExpRational> row;
                for (const auto& y : law.atoms()) {
                    if (k == i) row.push_back(ExpRational(Point(a.value.constant_value()) == y.value ? a.prob.constant_value() : Rational(0)));
                    else row.push_back(ExpRational(a.prob.constant_value() * y.prob));
                }
                tab.push_back(std::move(row));
            }
            cs.piece_tables.push_back(std::move(tab));
        }
        Target y{"law of piece " + std::to_string(i), law, cs};
        rep.tried.push_back(y.name);
        if (classify_cluster(s, y, r, I).strong_cluster.answer == Answer::Yes) {
            rep.found = y.name;
            break;
        }
    }
    return rep;
}

}  // namespace roughlab
