#pragma once

// Joint laws of two random variables over a common value space, and the law
// of the distance between them.

#include "roughlab/dist.hpp"

#include <map>
#include <vector>

namespace roughlab {

struct JointAtom {
    Point x;
    Point y;
    Rational prob;

    friend bool operator==(const JointAtom& a, const JointAtom& b) {
        return a.x == b.x && a.y == b.y && a.prob == b.prob;
    }
};

class Coupling {
public:
    enum class Kind { Independent, ExplicitJoint };

    Kind kind() const noexcept { return kind_; }
    const FiniteDist& x() const noexcept { return x_; }
    const FiniteDist& y() const noexcept { return y_; }
    const ValueSpace& space() const noexcept { return x_.space(); }
    /// Positive-mass cells, sorted by (x, y).
    const std::vector<JointAtom>& table() const noexcept { return table_; }

private:
    friend Coupling product_coupling(const FiniteDist&, const FiniteDist&);
    friend Coupling explicit_coupling(const FiniteDist&, const FiniteDist&, std::vector<JointAtom>);
    friend Coupling transpose(const Coupling&);

    Coupling(Kind kind, FiniteDist x, FiniteDist y, std::vector<JointAtom> table)
        : kind_(kind), x_(std::move(x)), y_(std::move(y)), table_(std::move(table)) {}

    Kind kind_;
    FiniteDist x_;
    FiniteDist y_;
    std::vector<JointAtom> table_;
};

inline Coupling product_coupling(const FiniteDist& x, const FiniteDist& y) {
    if (x.space() != y.space()) throw DistError(DistErrorKind::SpaceMismatch, "product of laws on different spaces");
    std::vector<JointAtom> table;
    table.reserve(x.size() * y.size());
    for (const auto& a : x.atoms())
        for (const auto& b : y.atoms()) table.push_back({a.value, b.value, a.prob * b.prob});
    return Coupling(Coupling::Kind::Independent, x, y, std::move(table));
}

/// Validates that the table is a probability on pairs whose marginals are
/// exactly x and y.
inline Coupling explicit_coupling(const FiniteDist& x, const FiniteDist& y, std::vector<JointAtom> cells) {
    const auto& space = x.space();
    if (space != y.space()) throw DistError(DistErrorKind::SpaceMismatch, "joint of laws on different spaces");
    Rational total = 0;
    for (const auto& c : cells) {
        if (!space.contains(c.x) || !space.contains(c.y))
            throw DistError(DistErrorKind::PointNotInSpace, "joint cell outside the value space");
        if (c.prob < 0) throw DistError(DistErrorKind::NegativeMass, "negative joint mass " + to_string(c.prob));
        total += c.prob;
    }
    if (total != 1) throw MassNotOneError(total);

    std::stable_sort(cells.begin(), cells.end(), [&](const JointAtom& a, const JointAtom& b) {
        if (a.x != b.x) return space.less(a.x, b.x);
        return space.less(a.y, b.y);
    });
    std::vector<JointAtom> merged;
    for (auto& c : cells) {
        if (!merged.empty() && merged.back().x == c.x && merged.back().y == c.y)
            merged.back().prob += c.prob;
        else
            merged.push_back(std::move(c));
    }
    std::erase_if(merged, [](const JointAtom& c) { return c.prob == 0; });

    std::vector<Atom> mx, my;
    for (const auto& c : merged) {
        mx.push_back({c.x, c.prob});
        my.push_back({c.y, c.prob});
    }
    if (make_dist(space, mx) != x) throw DistError(DistErrorKind::MarginalMismatch, "first marginal differs from X");
    if (make_dist(space, my) != y) throw DistError(DistErrorKind::MarginalMismatch, "second marginal differs from Y");
    return Coupling(Coupling::Kind::ExplicitJoint, x, y, std::move(merged));
}

/// The coupling of X with itself that puts all mass on the diagonal.
inline Coupling diagonal_coupling(const FiniteDist& x) {
    std::vector<JointAtom> cells;
    for (const auto& a : x.atoms()) cells.push_back({a.value, a.value, a.prob});
    return explicit_coupling(x, x, std::move(cells));
}

inline Coupling transpose(const Coupling& c) {
    std::vector<JointAtom> cells;
    for (const auto& j : c.table()) cells.push_back({j.y, j.x, j.prob});
    const auto& space = c.space();
    std::stable_sort(cells.begin(), cells.end(), [&](const JointAtom& a, const JointAtom& b) {
        if (a.x != b.x) return space.less(a.x, b.x);
        return space.less(a.y, b.y);
    });
    return Coupling(c.kind(), c.y(), c.x(), std::move(cells));
}

/// Law of d(X,Y) under the coupling, on the real line.
inline FiniteDist distance_law(const Coupling& c) {
    std::map<Rational, Rational> mass;
    for (const auto& j : c.table()) mass[c.space().distance(j.x, j.y)] += j.prob;
    std::vector<Atom> atoms;
    atoms.reserve(mass.size());
    for (auto& [d, p] : mass) atoms.push_back({d, p});
    return make_dist(ValueSpace::real_line(), std::move(atoms));
}

}  // namespace roughlab
