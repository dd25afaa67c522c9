#pragma once

// Ky Fan metric rho(X,Y) = inf{eps > 0 : P(d(X,Y) > eps) <= eps}, computed
// exactly from the law of d(X,Y).

#include "roughlab/coupling.hpp"

namespace roughlab {

struct KyFanResult {
    Rational rho;
    /// P(D > rho). Never exceeds rho: the infimum is attained.
    Rational attained_tail;
};

/// P(D > eps) for a law on the real line.
inline Rational tail_above(const FiniteDist& law, const Rational& eps) {
    Rational t = 0;
    for (const auto& a : law.atoms())
        if (std::get<Rational>(a.value) > eps) t += a.prob;
    return t;
}

/// Scans the intervals [s_i, s_{i+1}) between consecutive support points
/// (preceded by [0, s_1)). The tail is constant T on each interval, so the
/// least feasible eps there is max(s_i, T) provided it stays below s_{i+1}.
inline KyFanResult kyfan_of_law(const FiniteDist& law) {
    if (!law.space().is_real_line()) throw DistError(DistErrorKind::SpaceMismatch, "distance law must live on R");
    std::vector<Rational> support;
    for (const auto& a : law.atoms()) {
        const auto& v = std::get<Rational>(a.value);
        if (v < 0) throw DistError(DistErrorKind::NegativeSupport, "distance law has negative atom " + to_string(v));
        support.push_back(v);
    }

    std::vector<Rational> left{Rational(0)};
    for (const auto& s : support)
        if (s > 0) left.push_back(s);

    Rational tail = 1;  // P(D > left[i]) maintained incrementally
    std::size_t next_atom = 0;
    for (std::size_t i = 0; i < left.size(); ++i) {
        while (next_atom < law.size() && std::get<Rational>(law.atoms()[next_atom].value) <= left[i]) {
            tail -= law.atoms()[next_atom].prob;
            ++next_atom;
        }
        Rational candidate = left[i] < tail ? tail : left[i];
        bool last = i + 1 == left.size();
        if (last || candidate < left[i + 1]) return {candidate, tail};
    }
    return {Rational(0), Rational(0)};  // unreachable: last interval is always feasible
}

inline KyFanResult kyfan_between(const FiniteDist& x, const FiniteDist& y, const Coupling& c) {
    if (c.x() != x || c.y() != y)
        throw DistError(DistErrorKind::MarginalMismatch, "coupling marginals do not match the given laws");
    return kyfan_of_law(distance_law(c));
}

inline KyFanResult kyfan_between(const Coupling& c) { return kyfan_of_law(distance_law(c)); }

}  // namespace roughlab
