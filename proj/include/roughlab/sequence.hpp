#pragma once

// Piecewise symbolic sequences {X_n}: finitely many pieces on index sets plus
// an optional dyadic family A_j = {2^(j-1)(2k+1)} minus the fixed pieces.
// Atom values of fixed pieces are functions of n; family atom values are
// functions of j and family probabilities functions of n.

#include "roughlab/asymptotic.hpp"
#include "roughlab/coupling.hpp"

#include <optional>

namespace roughlab {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SymAtom {
    ExpRational value;
    ExpRational prob;
};

struct Piece {
    IndexSet region;
    std::vector<SymAtom> atoms;
    /// Law of a sum of n i.i.d. Bernoulli(p) variables instead of atoms.
    std::optional<Rational> binomial;
};

struct Family {
    std::vector<SymAtom> atoms;  // value in j, prob in n
};

namespace detail {

inline Rational binom_pmf(Nat n, Nat s, const Rational& p) {
    Integer c = 1;
    for (Nat i = 0; i < s; ++i) c = c * Integer(n - i) / Integer(i + 1);
    return Rational(c) * roughlab::pow(p, static_cast<std::int64_t>(s)) *
           roughlab::pow(1 - p, static_cast<std::int64_t>(n - s));
}

/// C(x, s) (p/(1-p))^s (1-p)^x as an exp-polynomial in x; exact for all x >= 0.
inline ExpRational binom_term(Nat s, const Rational& p) {
    ExpRational c(1);
    const auto x = ExpRational::var();
    for (Nat i = 0; i < s; ++i) c = c * (x - ExpRational(Rational(Integer(i)))) / ExpRational(Rational(Integer(i + 1)));
    return c * ExpRational(roughlab::pow(p / (1 - p), static_cast<std::int64_t>(s))) * ExpRational::geometric(1 - p);
}

}  // namespace detail

class PiecewiseSequence {
public:
    static constexpr Nat kCoverageCheck = 10000;

    PiecewiseSequence(std::vector<Piece> pieces, std::optional<Family> family)
        : pieces_(std::move(pieces)), family_(std::move(family)) {
        validate();
    }

    const std::vector<Piece>& pieces() const noexcept { return pieces_; }
    const std::optional<Family>& family() const noexcept { return family_; }

    IndexSet fixed_union() const {
        if (pieces_.empty()) return IndexSet::empty();
        IndexSet u = pieces_[0].region;
        for (std::size_t i = 1; i < pieces_.size(); ++i) u = u | pieces_[i].region;
        return u;
    }

    /// A_j = dyadic(j-1) \ U.
    IndexSet family_region(Nat j) const { return subtract_fixed(IndexSet::dyadic(j - 1)); }
    /// Union of A_j over j >= J: multiples of 2^(J-1), minus the fixed pieces.
    IndexSet family_tail_region(Nat J) const { return subtract_fixed(IndexSet::arith_prog(Nat{1} << (J - 1), 0)); }

    struct Location {
        std::optional<std::size_t> piece;  // else the family
        Nat j = 0;
    };

    Location locate(Nat n) const {
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].region.contains(n)) return {i, 0};
        if (family_) return {std::nullopt, static_cast<Nat>(std::countr_zero(n)) + 1};
        throw ModelError("index " + std::to_string(n) + " is not covered by any piece");
    }

    /// Exact law of X_n; values evaluated at n (or at j for the family).
    FiniteDist law_at(Nat n) const {
        auto loc = locate(n);
        std::vector<Atom> atoms;
        if (loc.piece) {
            const auto& p = pieces_[*loc.piece];
            if (p.binomial) {
                for (Nat s = 0; s <= n; ++s) atoms.push_back({Rational(Integer(s)), detail::binom_pmf(n, s, *p.binomial)});
            } else {
                for (const auto& a : p.atoms) atoms.push_back({a.value.eval(n), a.prob.eval(n)});
            }
        } else {
            for (const auto& a : family_->atoms) atoms.push_back({a.value.eval(loc.j), a.prob.eval(n)});
        }
        return make_dist(ValueSpace::real_line(), std::move(atoms));
    }

    /// Atom values (as points) of X_n in declaration order, matching joint tables.
    std::vector<Rational> atom_values_at(Nat n) const {
        auto loc = locate(n);
        std::vector<Rational> out;
        if (loc.piece) {
            for (const auto& a : pieces_[*loc.piece].atoms) out.push_back(a.value.eval(n));
        } else {
            for (const auto& a : family_->atoms) out.push_back(a.value.eval(loc.j));
        }
        return out;
    }

    /// Smallest n0 with every probability of the piece in [0, 1] for n >= n0.
    static Nat validity_index(const std::vector<SymAtom>& atoms) {
        Nat from = 1;
        for (const auto& a : atoms) {
            auto lo = a.prob.eventual_sign(), hi = (ExpRational(1) - a.prob).eventual_sign();
            if (lo.sign < 0 || hi.sign < 0) throw ModelError("atom probability leaves [0,1] for all large n");
            from = std::max({from, lo.from, hi.from});
        }
        auto valid = [&](Nat n) {
            try {
                for (const auto& a : atoms) {
                    Rational v = a.prob.eval(n);
                    if (v < 0 || v > 1) return false;
                }
                return true;
            } catch (const OutsideValidity&) {
                return false;
            }
        };
        while (from > 1 && valid(from - 1)) --from;
        return from;
    }

    static void check_mass(const std::vector<SymAtom>& atoms, const std::string& where) {
        ExpRational total(0);
        for (const auto& a : atoms) total += a.prob;
        if (!(total == ExpRational(1))) {
            std::string msg = "mass " + total.to_string("n") + " \u2260 1 in " + where;
            throw ModelError(msg);
        }
    }

    /// Checks that apply to one fixed piece in isolation.
    static void check_piece(const Piece& p, const std::string& where) {
        if (p.binomial) {
            if (*p.binomial <= 0 || *p.binomial >= 1) throw ModelError("binomial parameter must lie in (0,1) in " + where);
            return;
        }
        if (p.atoms.empty()) throw ModelError(where + " has no atoms");
        check_mass(p.atoms, where);
        Nat from = validity_index(p.atoms);
        for (Nat n = 1; n < from; ++n)
            if (p.region.contains(n)) throw ModelError(where + " is not a valid law at n = " + std::to_string(n));
    }

private:
    IndexSet subtract_fixed(const IndexSet& s) const { return pieces_.empty() ? s : s - fixed_union(); }

    void validate() {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const auto& p = pieces_[i];
            std::string where = "piece " + std::to_string(i);
            check_piece(p, where);
        }
        if (family_) {
            if (family_->atoms.empty()) throw ModelError("family has no atoms");
            check_mass(family_->atoms, "family");
            Nat from = validity_index(family_->atoms);
            for (Nat n = 1; n < from; ++n)
                if (!fixed_union().contains(n) || pieces_.empty())
                    throw ModelError("family is not a valid law at n = " + std::to_string(n));
        }
        for (Nat n = 1; n <= kCoverageCheck; ++n) {
            int hits = 0;
            for (const auto& p : pieces_) hits += p.region.contains(n);
            if (hits > 1) throw ModelError("pieces overlap at n = " + std::to_string(n));
            if (hits == 0 && !family_) throw ModelError("index " + std::to_string(n) + " is not covered by any piece");
        }
    }

    std::vector<Piece> pieces_;
    std::optional<Family> family_;
};

// ---------------------------------------------------------------------------
// Targets and couplings

/// table[i][k]: joint mass of (atom i of X_n, atom k of Y) as a function of n.
using JointTable = std::vector<std::vector<ExpRational>>;

struct CouplingSpec {
    enum class Kind { Independent, Diagonal, Joint };
    Kind kind = Kind::Independent;
    std::vector<std::optional<JointTable>> piece_tables;  // Joint only
    std::optional<JointTable> family_table;
};

struct Target {
    std::string name;
    FiniteDist law;
    CouplingSpec coupling;
};

/// One (atom of X_n, atom of Y) pair: v(n) - y and its joint mass.
struct DistPair {
    ExpRational diff;
    ExpRational mass;
};

/// Everything needed to analyse d(X_n, Y) on one region, as functions of n.
struct PieceView {
    std::vector<DistPair> pairs;
    std::optional<Rational> binomial;  // binomial piece against target atoms
    std::vector<Atom> target_atoms;
};

namespace detail {

inline ExpRational y_point(const Atom& a) { return ExpRational(std::get<Rational>(a.value)); }

inline PieceView atom_view(const std::vector<SymAtom>& atoms, const std::vector<ExpRational>& values,
                           const Target& t, const std::optional<JointTable>& table, const std::string& where) {
    PieceView v;
    const auto& ys = t.law.atoms();
    switch (t.coupling.kind) {
    case CouplingSpec::Kind::Independent:
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (const auto& y : ys) v.pairs.push_back({values[i] - y_point(y), atoms[i].prob * ExpRational(y.prob)});
        break;
    case CouplingSpec::Kind::Diagonal:
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (!values[i].is_constant() || !atoms[i].prob.is_constant())
                throw ModelError("diagonal coupling needs constant atoms in " + where);
            Point pv = values[i].constant_value();
            if (t.law.prob_of(pv) != atoms[i].prob.constant_value())
                throw ModelError("diagonal coupling: law of " + where + " differs from the target");
            v.pairs.push_back({ExpRational(0), atoms[i].prob});
        }
        break;
    case CouplingSpec::Kind::Joint: {
        if (!table) throw ModelError("no joint table declared for " + where);
        if (table->size() != atoms.size()) throw ModelError("joint table rows do not match atoms in " + where);
        std::vector<ExpRational> col(ys.size(), ExpRational(0));
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if ((*table)[i].size() != ys.size()) throw ModelError("joint table columns do not match target in " + where);
            ExpRational row(0);
            for (std::size_t k = 0; k < ys.size(); ++k) {
                row += (*table)[i][k];
                col[k] += (*table)[i][k];
                v.pairs.push_back({values[i] - y_point(ys[k]), (*table)[i][k]});
            }
            if (!(row == atoms[i].prob)) throw ModelError("joint table row " + std::to_string(i) + " misses its marginal in " + where);
        }
        for (std::size_t k = 0; k < ys.size(); ++k)
            if (!(col[k] == ExpRational(ys[k].prob)))
                throw ModelError("joint table column " + std::to_string(k) + " misses the target marginal in " + where);
        break;
    }
    }
    return v;
}

}  // namespace detail

inline PieceView piece_view(const PiecewiseSequence& s, const Target& t, std::size_t i) {
    const auto& p = s.pieces().at(i);
    std::string where = "piece " + std::to_string(i);
    if (p.binomial) {
        if (t.coupling.kind != CouplingSpec::Kind::Independent && !t.law.is_degenerate())
            throw ModelError("binomial pieces support only independent couplings");
        PieceView v;
        v.binomial = p.binomial;
        v.target_atoms = t.law.atoms();
        return v;
    }
    std::vector<ExpRational> values;
    for (const auto& a : p.atoms) values.push_back(a.value);
    std::optional<JointTable> table;
    if (i < t.coupling.piece_tables.size()) table = t.coupling.piece_tables[i];
    return detail::atom_view(p.atoms, values, t, table, where);
}

/// Family member j: atom values are the constants v(j).
inline PieceView family_view(const PiecewiseSequence& s, const Target& t, Nat j) {
    const auto& f = *s.family();
    std::vector<ExpRational> values;
    for (const auto& a : f.atoms) values.push_back(ExpRational(a.value.eval(j)));
    return detail::atom_view(f.atoms, values, t, t.coupling.family_table, "family member " + std::to_string(j));
}

/// The concrete coupling of X_n with Y.
inline Coupling coupling_at(const PiecewiseSequence& s, const Target& t, Nat n) {
    auto x = s.law_at(n);
    if (t.coupling.kind == CouplingSpec::Kind::Independent || t.law.is_degenerate()) return product_coupling(x, t.law);
    if (t.coupling.kind == CouplingSpec::Kind::Diagonal) return diagonal_coupling(x);
    auto loc = s.locate(n);
    const auto& table = loc.piece ? t.coupling.piece_tables.at(*loc.piece) : t.coupling.family_table;
    if (!table) throw ModelError("no joint table declared");
    auto values = s.atom_values_at(n);
    std::vector<JointAtom> cells;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t k = 0; k < t.law.size(); ++k)
            cells.push_back({values[i], t.law.atoms()[k].value, (*table)[i][k].eval(n)});
    return explicit_coupling(x, t.law, std::move(cells));
}

// ---------------------------------------------------------------------------
// Distance probabilities

enum class Rel { Greater, GreaterEq, Less, LessEq };

inline bool holds(const Rational& d, Rel rel, const Rational& t) {
    switch (rel) {
    case Rel::Greater: return d > t;
    case Rel::GreaterEq: return d >= t;
    case Rel::Less: return d < t;
    case Rel::LessEq: return d <= t;
    }
    return false;
}

/// P(d(X_n, Y) rel t) computed directly from the law at n.
inline Rational distance_prob_at(const PiecewiseSequence& s, const Target& t, Nat n, Rel rel, const Rational& thr) {
    Rational total = 0;
    const auto law = distance_law(coupling_at(s, t, n));
    for (const auto& a : law.atoms())
        if (holds(std::get<Rational>(a.value), rel, thr)) total += a.prob;
    return total;
}

/// fn equals the probability for every n >= from.
struct SymbolicProb {
    ExpRational fn;
    Nat from = 1;
};

/// P(d rel t) on a region, symbolically; each pair's comparison with t is
/// settled past the larger of two eventual-sign indices.
inline SymbolicProb distance_prob_fn(const PieceView& v, Rel rel, const Rational& thr) {
    SymbolicProb out{ExpRational(0), 1};
    if (v.binomial) {
        // |S - y| rel t: P = sum_y P(y) * sum over integer s in the window
        const Rational& p = *v.binomial;
        for (const auto& ya : v.target_atoms) {
            Rational y = std::get<Rational>(ya.value);
            ExpRational w(0);
            Integer lo = roughlab::ceil(y - thr), hi = roughlab::floor(y + thr);
            if (lo < 0) lo = 0;
            for (Integer k = lo; k <= hi; ++k) {
                Rational d = roughlab::abs(Rational(k) - y);
                bool inside_le = d <= thr, inside_lt = d < thr;
                bool take = (rel == Rel::LessEq && inside_le) || (rel == Rel::Less && inside_lt) ||
                            (rel == Rel::Greater && inside_le) || (rel == Rel::GreaterEq && inside_lt);
                if (take) w += detail::binom_term(static_cast<Nat>(k), p);
            }
            if (rel == Rel::Greater || rel == Rel::GreaterEq) w = ExpRational(1) - w;
            out.fn += ExpRational(ya.prob) * w;
        }
        return out;
    }
    for (const auto& pair : v.pairs) {
        auto up = (pair.diff - ExpRational(thr)).eventual_sign();
        auto dn = (pair.diff + ExpRational(thr)).eventual_sign();
        bool greater = up.sign > 0 || dn.sign < 0;
        bool greater_eq = up.sign >= 0 || dn.sign <= 0;
        bool take = false;
        switch (rel) {
        case Rel::Greater: take = greater; break;
        case Rel::GreaterEq: take = greater_eq; break;
        case Rel::Less: take = !greater_eq; break;
        case Rel::LessEq: take = !greater; break;
        }
        if (take) out.fn += pair.mass;
        out.from = std::max({out.from, up.from, dn.from});
    }
    return out;
}

/// P(d(X_n,Y) > r + eps) on a region.
inline SymbolicProb exceedance_fn(const PieceView& v, const Rational& r, const Rational& eps) {
    return distance_prob_fn(v, Rel::Greater, r + eps);
}

// ---------------------------------------------------------------------------
// Limits of distance atoms

struct PairLimit {
    bool infinite = false;
    Rational dist;   // limiting distance when finite
    int approach;    // +1 from above, -1 from below, 0 eventually constant
    Rational mass;   // limiting joint mass
};

inline std::vector<PairLimit> pair_limits(const PieceView& v) {
    std::vector<PairLimit> out;
    if (v.binomial) {
        // all mass escapes: S_n -> infinity in probability for 0 < p < 1
        out.push_back({true, 0, 1, 1});
        return out;
    }
    for (const auto& pair : v.pairs) {
        auto m = limit(pair.mass);
        if (!m.finite()) throw ModelError("joint mass without a finite limit");
        auto l = limit(pair.diff);
        PairLimit pl{!l.finite(), 0, 1, m.value};
        if (l.finite()) {
            pl.dist = roughlab::abs(l.value);
            if (l.value > 0)
                pl.approach = l.approach;
            else if (l.value < 0)
                pl.approach = -l.approach;
            else
                pl.approach = l.approach == 0 ? 0 : 1;
        }
        out.push_back(pl);
    }
    return out;
}

struct MassProfile {
    std::vector<PairLimit> pairs;
    Rational r;
    /// sum of limiting masses with limiting distance <= r
    Rational c_plus;

    /// lim_n P(d < r + eps); boundary pairs count only when approached from below.
    Rational c(const Rational& eps) const {
        Rational t = r + eps, s = 0;
        for (const auto& p : pairs)
            if (!p.infinite && (p.dist < t || (p.dist == t && p.approach < 0))) s += p.mass;
        return s;
    }

    /// Distances where c(eps) can jump, as eps values > 0.
    std::vector<Rational> breakpoints() const {
        std::vector<Rational> b;
        for (const auto& p : pairs)
            if (!p.infinite && p.dist > r) b.push_back(p.dist - r);
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }

    /// lim_n P(d > r + eps) for eps below every breakpoint: 1 - c_plus.
    Rational exceedance_limit() const { return 1 - c_plus; }

    /// Smallest positive gap between r and a limiting distance above r.
    std::optional<Rational> min_gap() const {
        auto b = breakpoints();
        if (b.empty()) return std::nullopt;
        return b.front();
    }
};

inline MassProfile limiting_mass_profile(const PieceView& v, const Rational& r) {
    MassProfile m{pair_limits(v), r, 0};
    for (const auto& p : m.pairs)
        if (!p.infinite && p.dist <= r) m.c_plus += p.mass;
    return m;
}

}  // namespace roughlab
