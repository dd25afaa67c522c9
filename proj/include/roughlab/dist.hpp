#pragma once

// Value spaces and finitely supported probability laws with exact masses.

#include "roughlab/rational.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace roughlab {

enum class DistErrorKind {
    NegativeMass,
    MassNotOne,
    PointNotInSpace,
    SpaceMismatch,
    InvalidSpace,
    MarginalMismatch,
    NegativeSupport,
};

class DistError : public std::runtime_error {
public:
    DistError(DistErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    DistErrorKind kind() const noexcept { return kind_; }

private:
    DistErrorKind kind_;
};

/// Raised by make_dist when the masses do not add up to one.
class MassNotOneError : public DistError {
public:
    explicit MassNotOneError(Rational total)
        : DistError(DistErrorKind::MassNotOne,
                    "total mass " + to_string(total) + " != 1 (deficit " + to_string(Rational(1 - total)) + ")"),
          total_(std::move(total)) {}
    const Rational& total() const noexcept { return total_; }
    Rational deficit() const { return 1 - total_; }

private:
    Rational total_;
};

/// A point of a value space: a rational coordinate on the real line or a
/// label of a finite metric space.
using Point = std::variant<Rational, std::string>;

inline std::string point_to_string(const Point& p) {
    if (auto q = std::get_if<Rational>(&p)) return to_string(*q);
    return std::get<std::string>(p);
}

class ValueSpace {
public:
    enum class Kind { RealLine, FinitePoints };

    static ValueSpace real_line() { return ValueSpace(); }

    /// Validates d(x,x)=0, symmetry, nonnegativity and the triangle inequality.
    static ValueSpace finite_points(std::vector<std::string> labels, std::vector<std::vector<Rational>> table) {
        const std::size_t k = labels.size();
        if (k == 0) throw DistError(DistErrorKind::InvalidSpace, "finite space needs at least one point");
        if (table.size() != k) throw DistError(DistErrorKind::InvalidSpace, "distance table has wrong row count");
        for (const auto& row : table)
            if (row.size() != k) throw DistError(DistErrorKind::InvalidSpace, "distance table is not square");
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                if (labels[i] == labels[j]) throw DistError(DistErrorKind::InvalidSpace, "duplicate label " + labels[i]);
        for (std::size_t i = 0; i < k; ++i) {
            if (table[i][i] != 0) throw DistError(DistErrorKind::InvalidSpace, "d(x,x) != 0 at " + labels[i]);
            for (std::size_t j = 0; j < k; ++j) {
                if (table[i][j] < 0) throw DistError(DistErrorKind::InvalidSpace, "negative distance");
                if (table[i][j] != table[j][i]) throw DistError(DistErrorKind::InvalidSpace, "asymmetric distance table");
                if (i != j && table[i][j] == 0)
                    throw DistError(DistErrorKind::InvalidSpace, "distinct points at distance zero");
            }
        }
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t m = 0; m < k; ++m)
                    if (table[i][m] > table[i][j] + table[j][m])
                        throw DistError(DistErrorKind::InvalidSpace, "triangle inequality fails at (" + labels[i] +
                                                                         "," + labels[j] + "," + labels[m] + ")");
        ValueSpace s;
        s.kind_ = Kind::FinitePoints;
        s.finite_ = std::make_shared<const Finite>(Finite{std::move(labels), std::move(table)});
        return s;
    }

    Kind kind() const noexcept { return kind_; }
    bool is_real_line() const noexcept { return kind_ == Kind::RealLine; }

    const std::vector<std::string>& labels() const { return finite().labels; }
    const std::vector<std::vector<Rational>>& table() const { return finite().table; }

    bool contains(const Point& p) const {
        if (kind_ == Kind::RealLine) return std::holds_alternative<Rational>(p);
        auto s = std::get_if<std::string>(&p);
        return s && index_of(*s) >= 0;
    }

    int index_of(const std::string& label) const {
        const auto& ls = finite().labels;
        auto it = std::find(ls.begin(), ls.end(), label);
        return it == ls.end() ? -1 : static_cast<int>(it - ls.begin());
    }

    Rational distance(const Point& a, const Point& b) const {
        if (!contains(a) || !contains(b))
            throw DistError(DistErrorKind::PointNotInSpace, "point not in value space");
        if (kind_ == Kind::RealLine) return abs(Rational(std::get<Rational>(a) - std::get<Rational>(b)));
        return finite().table[index_of(std::get<std::string>(a))][index_of(std::get<std::string>(b))];
    }

    /// Strict weak order on points used to canonicalise atom lists.
    bool less(const Point& a, const Point& b) const {
        if (kind_ == Kind::RealLine) return std::get<Rational>(a) < std::get<Rational>(b);
        return index_of(std::get<std::string>(a)) < index_of(std::get<std::string>(b));
    }

    friend bool operator==(const ValueSpace& a, const ValueSpace& b) {
        if (a.kind_ != b.kind_) return false;
        if (a.kind_ == Kind::RealLine) return true;
        if (a.finite_ == b.finite_) return true;
        return a.finite_->labels == b.finite_->labels && a.finite_->table == b.finite_->table;
    }
    friend bool operator!=(const ValueSpace& a, const ValueSpace& b) { return !(a == b); }

private:
    struct Finite {
        std::vector<std::string> labels;
        std::vector<std::vector<Rational>> table;
    };

    ValueSpace() = default;

    const Finite& finite() const {
        if (!finite_) throw DistError(DistErrorKind::InvalidSpace, "not a finite point space");
        return *finite_;
    }

    Kind kind_ = Kind::RealLine;
    std::shared_ptr<const Finite> finite_;
};

struct Atom {
    Point value;
    Rational prob;

    friend bool operator==(const Atom& a, const Atom& b) { return a.value == b.value && a.prob == b.prob; }
};

/// Finitely supported law. Atoms are distinct, carry positive mass, are
/// sorted by value, and their masses add up to exactly one.
class FiniteDist {
public:
    const ValueSpace& space() const noexcept { return space_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    Rational prob_of(const Point& p) const {
        for (const auto& a : atoms_)
            if (a.value == p) return a.prob;
        return Rational(0);
    }

    bool is_degenerate() const noexcept { return atoms_.size() == 1; }

    friend bool operator==(const FiniteDist& a, const FiniteDist& b) {
        return a.space_ == b.space_ && a.atoms_ == b.atoms_;
    }
    friend bool operator!=(const FiniteDist& a, const FiniteDist& b) { return !(a == b); }

private:
    friend FiniteDist make_dist(const ValueSpace& space, std::vector<Atom> atoms);
    FiniteDist(ValueSpace space, std::vector<Atom> atoms) : space_(std::move(space)), atoms_(std::move(atoms)) {}

    ValueSpace space_;
    std::vector<Atom> atoms_;
};

/// Builds a canonical law: duplicate values merged, zero-mass atoms dropped,
/// atoms sorted by value.
inline FiniteDist make_dist(const ValueSpace& space, std::vector<Atom> atoms) {
    Rational total = 0;
    for (const auto& a : atoms) {
        if (!space.contains(a.value))
            throw DistError(DistErrorKind::PointNotInSpace, "atom " + point_to_string(a.value) + " not in value space");
        if (a.prob < 0)
            throw DistError(DistErrorKind::NegativeMass,
                            "negative mass " + to_string(a.prob) + " at " + point_to_string(a.value));
        total += a.prob;
    }
    if (total != 1) throw MassNotOneError(total);

    std::stable_sort(atoms.begin(), atoms.end(),
                     [&](const Atom& a, const Atom& b) { return space.less(a.value, b.value); });
    std::vector<Atom> merged;
    for (auto& a : atoms) {
        if (!merged.empty() && merged.back().value == a.value)
            merged.back().prob += a.prob;
        else
            merged.push_back(std::move(a));
    }
    std::erase_if(merged, [](const Atom& a) { return a.prob == 0; });
    return FiniteDist(space, std::move(merged));
}

inline FiniteDist degenerate(const Point& at, const ValueSpace& space = ValueSpace::real_line()) {
    return make_dist(space, {{at, Rational(1)}});
}

inline FiniteDist bernoulli(const Rational& p) {
    return make_dist(ValueSpace::real_line(), {{Rational(0), 1 - p}, {Rational(1), p}});
}

}  // namespace roughlab
