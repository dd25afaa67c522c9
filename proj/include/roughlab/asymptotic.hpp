#pragma once

// Exp-polynomials  sum c * x^e * b^x  (e >= 0 integer, b > 0 rational) and
// their quotients, with exact eventual-sign, limit and threshold analysis.
// Every value and probability function of a sequence model lives here.

#include "roughlab/index_set.hpp"

#include <map>
#include <optional>
#include <string>

namespace roughlab {

struct OutsideValidity : std::domain_error {
    using std::domain_error::domain_error;
};

/// x^exp * base^x
struct ExpKey {
    Rational base;
    unsigned exp = 0;

    /// Growth order: larger base dominates, then larger exponent.
    friend bool operator<(const ExpKey& a, const ExpKey& b) {
        if (a.base != b.base) return a.base < b.base;
        return a.exp < b.exp;
    }
    friend bool operator==(const ExpKey&, const ExpKey&) = default;
};

class ExpPoly {
public:
    using Terms = std::map<ExpKey, Rational>;

    ExpPoly() = default;
    static ExpPoly constant(const Rational& c) { return term(c, 0, 1); }
    static ExpPoly term(const Rational& c, unsigned exp, const Rational& base) {
        if (base <= 0) throw std::invalid_argument("exponential base must be positive");
        ExpPoly p;
        if (c != 0) p.terms_[{base, exp}] = c;
        return p;
    }

    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == ExpKey{1, 0}); }
    Rational constant_value() const { return is_zero() ? Rational(0) : terms_.begin()->second; }

    /// The dominant term; precondition: nonzero.
    std::pair<ExpKey, Rational> dominant() const { return *terms_.rbegin(); }

    Rational eval(Nat x) const {
        Rational s = 0;
        const auto xi = static_cast<std::int64_t>(x);
        for (const auto& [k, c] : terms_) {
            Rational t = c;
            if (k.exp) t *= roughlab::pow(Rational(Integer(x)), static_cast<std::int64_t>(k.exp));
            if (k.base != 1) t *= roughlab::pow(k.base, xi);
            s += t;
        }
        return s;
    }

    ExpPoly& operator+=(const ExpPoly& o) {
        for (const auto& [k, c] : o.terms_) {
            auto& slot = terms_[k];
            slot += c;
            if (slot == 0) terms_.erase(k);
        }
        return *this;
    }
    friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
    friend ExpPoly operator-(const ExpPoly& a) { return a * Rational(-1); }
    friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a += -b; }
    friend ExpPoly operator*(const ExpPoly& a, const Rational& s) {
        ExpPoly r;
        if (s == 0) return r;
        for (const auto& [k, c] : a.terms_) r.terms_[k] = c * s;
        return r;
    }
    friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
        ExpPoly r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) r += term(ca * cb, ka.exp + kb.exp, ka.base * kb.base);
        return r;
    }
    friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

    std::string to_string(const std::string& var) const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [k, c] = *it;
            Rational mag = roughlab::abs(c);
            if (first)
                s += c < 0 ? "-" : "";
            else
                s += c < 0 ? " - " : " + ";
            first = false;
            std::string f;
            if (k.exp) f += k.exp == 1 ? var : var + "^" + std::to_string(k.exp);
            if (k.base != 1) {
                std::string b = is_integer(k.base) ? roughlab::to_string(k.base) : "(" + roughlab::to_string(k.base) + ")";
                f += (f.empty() ? "" : "*") + b + "^" + var;
            }
            if (f.empty())
                s += roughlab::to_string(mag);
            else if (mag == 1)
                s += f;
            else
                s += roughlab::to_string(mag) + "*" + f;
        }
        return s;
    }

private:
    Terms terms_;
};

struct EventualSign {
    int sign = 0;  // -1, 0, +1
    Nat from = 1;  // the sign holds for every x >= from
};

namespace detail {

/// Smallest n >= 1 with pred(n), for pred monotone false -> true.
template <class Pred>
Nat first_true(Pred pred) {
    if (pred(1)) return 1;
    Nat lo = 1, hi = 2;
    while (!pred(hi)) {
        lo = hi;
        if (hi > (Nat{1} << 40)) throw std::overflow_error("crossing index out of range");
        hi *= 2;
    }
    while (hi - lo > 1) {
        Nat mid = lo + (hi - lo) / 2;
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace detail

/// Writes p = c_d x^e_d b_d^x (1 + sum_i r_i) with |r_i(x)| eventually
/// nonincreasing; the sign of c_d holds once sum |r_i| < 1.
inline EventualSign eventual_sign(const ExpPoly& p) {
    if (p.is_zero()) return {0, 1};
    const auto [dk, dc] = p.dominant();
    struct Ratio {
        Rational mag;
        Rational rho;
        std::int64_t a;
    };
    std::vector<Ratio> rs;
    for (const auto& [k, c] : p.terms())
        if (!(k == dk))
            rs.push_back({roughlab::abs(c / dc), k.base / dk.base,
                          static_cast<std::int64_t>(k.exp) - static_cast<std::int64_t>(dk.exp)});
    if (rs.empty()) return {sign(dc), 1};

    Nat M = 1;
    for (const auto& r : rs) {
        if (r.a <= 0) continue;
        // (n+1)^a rho <= n^a
        M = std::max(M, detail::first_true([&](Nat n) {
            Rational nn{Integer(n)};
            return roughlab::pow(nn + 1, r.a) * r.rho <= roughlab::pow(nn, r.a);
        }));
    }
    auto small = [&](Nat n) {
        Rational s = 0;
        Rational nn{Integer(n)};
        for (const auto& r : rs) s += r.mag * roughlab::pow(nn, r.a) * roughlab::pow(r.rho, static_cast<std::int64_t>(n));
        return s < 1;
    };
    Nat N = detail::first_true([&](Nat k) { return small(M + k - 1); }) + M - 1;
    return {sign(dc), N};
}

// ---------------------------------------------------------------------------

class ExpRational {
public:
    ExpRational() : num_(), den_(ExpPoly::constant(1)) {}
    ExpRational(const Rational& c) : num_(ExpPoly::constant(c)), den_(ExpPoly::constant(1)) {}  // NOLINT
    ExpRational(std::int64_t c) : ExpRational(Rational(c)) {}                                  // NOLINT
    ExpRational(ExpPoly num, ExpPoly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw std::domain_error("zero denominator");
        normalize();
    }

    static ExpRational var() { return ExpRational(ExpPoly::term(1, 1, 1), ExpPoly::constant(1)); }
    static ExpRational geometric(const Rational& base) { return ExpRational(ExpPoly::term(1, 0, base), ExpPoly::constant(1)); }

    const ExpPoly& num() const noexcept { return num_; }
    const ExpPoly& den() const noexcept { return den_; }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

    Rational eval(Nat x) const {
        Rational d = den_.eval(x);
        if (d == 0) throw OutsideValidity("denominator vanishes at " + std::to_string(x));
        return num_.eval(x) / d;
    }

    friend ExpRational operator+(const ExpRational& a, const ExpRational& b) {
        if (a.den_ == b.den_) return ExpRational(a.num_ + b.num_, a.den_);
        return ExpRational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend ExpRational operator-(const ExpRational& a) { return ExpRational(-a.num_, a.den_); }
    friend ExpRational operator-(const ExpRational& a, const ExpRational& b) { return a + (-b); }
    friend ExpRational operator*(const ExpRational& a, const ExpRational& b) {
        return ExpRational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend ExpRational operator/(const ExpRational& a, const ExpRational& b) {
        if (b.num_.is_zero()) throw std::domain_error("division by the zero function");
        return ExpRational(a.num_ * b.den_, a.den_ * b.num_);
    }
    ExpRational& operator+=(const ExpRational& o) { return *this = *this + o; }

    /// Functional equality (distinct exp-monomials are linearly independent).
    friend bool operator==(const ExpRational& a, const ExpRational& b) {
        return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
    }

    EventualSign eventual_sign() const {
        auto n = roughlab::eventual_sign(num_), d = roughlab::eventual_sign(den_);
        return {n.sign * d.sign, std::max(n.from, d.from)};
    }

    std::string to_string(const std::string& var) const {
        if (den_.is_constant() && den_.constant_value() == 1) return num_.to_string(var);
        // parentheses only where precedence needs them
        std::string n = num_.to_string(var), d = den_.to_string(var);
        if (num_.terms().size() > 1) n = "(" + n + ")";
        auto [dk, dc] = den_.dominant();
        bool bare = den_.terms().size() == 1 && dc == 1 && (dk.exp == 0 || dk.base == 1);
        return n + "/" + (bare ? d : "(" + d + ")");
    }

private:
    void normalize() {
        auto [dk, dc] = den_.dominant();
        if (den_.terms().size() == 1 && dk.exp == 0) {
            // c * b^x in the denominator folds into the numerator
            ExpPoly n;
            for (const auto& [k, c] : num_.terms()) n += ExpPoly::term(c / dc, k.exp, k.base / dk.base);
            num_ = std::move(n);
            den_ = ExpPoly::constant(1);
            return;
        }
        if (dc != 1) {
            num_ = num_ * (1 / dc);
            den_ = den_ * (1 / dc);
        }
    }

    ExpPoly num_;
    ExpPoly den_;
};

inline ExpRational pow(const ExpRational& f, std::int64_t k) {
    ExpRational r(1), base = k < 0 ? ExpRational(1) / f : f;
    for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i) r = r * base;
    return r;
}

struct Limit {
    enum class Kind { Finite, PosInf, NegInf };
    Kind kind = Kind::Finite;
    Rational value = 0;
    /// Eventual sign of f - value for finite limits: +1 from above, -1 from
    /// below, 0 eventually equal. For infinite limits, +1 / -1.
    int approach = 0;
    Nat from = 1;

    bool finite() const { return kind == Kind::Finite; }
    friend bool operator==(const Limit&, const Limit&) = default;
};

inline Limit limit(const ExpRational& f) {
    if (f.num().is_zero()) return {Limit::Kind::Finite, 0, 0, 1};
    auto [nk, nc] = f.num().dominant();
    auto [dk, dc] = f.den().dominant();
    if (dk < nk) {
        int s = sign(nc) * sign(dc);
        auto es = f.eventual_sign();
        return {s > 0 ? Limit::Kind::PosInf : Limit::Kind::NegInf, 0, s, es.from};
    }
    Rational L = nk == dk ? nc / dc : Rational(0);
    auto es = (f - ExpRational(L)).eventual_sign();
    return {Limit::Kind::Finite, L, es.sign, es.from};
}

enum class Cmp { Greater, GreaterEq };

/// {n >= 1 : p(n) cmp delta}: the tail from the eventual sign of p - delta,
/// an exact scan below it, then the crossing moved back to the minimal index.
/// Indices where p is undefined are treated as non-members.
inline IndexSet threshold_solution(const ExpRational& p, Cmp cmp, const Rational& delta) {
    auto es = (p - ExpRational(delta)).eventual_sign();
    bool tail_in = cmp == Cmp::Greater ? es.sign > 0 : es.sign >= 0;
    auto member = [&](Nat n) {
        try {
            Rational v = p.eval(n);
            return cmp == Cmp::Greater ? v > delta : v >= delta;
        } catch (const OutsideValidity&) {
            return false;
        }
    };
    Nat n0 = es.from;
    while (n0 > 1 && member(n0 - 1) == tail_in) --n0;
    std::vector<Nat> below;
    for (Nat n = 1; n < n0; ++n)
        if (member(n)) below.push_back(n);
    return IndexSet::tail_solution(tail_in, n0, std::move(below));
}

}  // namespace roughlab
