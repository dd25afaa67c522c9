#pragma once

// Symbolic subsets of N = {1, 2, ...} closed under Boolean operations.
//
// Every expression is, past a stabilisation index, a function of n mod P
// (P = lcm of the periodic leaves' periods) and of which sparse leaves
// (powers, polynomial images) contain n. Sparse leaves have density zero and
// convergent reciprocal sums, which is what makes density and summability
// decisions exact.

#include "roughlab/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace roughlab {

using Nat = std::uint64_t;

class IndexSet {
public:
    enum class Kind {
        Finite,
        Full,
        ArithProg,
        Powers,
        PolyImage,
        DyadicValuation,
        TailSolution,
        Union,
        Intersection,
        Complement,
        Difference
    };

    struct Node {
        Kind kind;
        std::vector<Nat> list;  // Finite members, or TailSolution members below n0
        Nat a = 0, b = 0;       // ArithProg stride/offset; Powers base/scale; PolyImage scale/degree; Dyadic v in a
        bool eventually_in = false;
        Nat n0 = 1;
        std::shared_ptr<const Node> lhs, rhs;
    };

    static IndexSet finite(std::vector<Nat> xs) {
        std::erase(xs, Nat{0});
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        Node n{Kind::Finite};
        n.list = std::move(xs);
        return IndexSet(std::move(n));
    }
    static IndexSet empty() { return finite({}); }
    static IndexSet full() { return IndexSet(Node{Kind::Full}); }
    /// {a*k + b : k >= 0} restricted to n >= 1.
    static IndexSet arith_prog(Nat a, Nat b) {
        if (a < 1) throw std::invalid_argument("ap stride must be >= 1");
        Node n{Kind::ArithProg};
        n.a = a;
        n.b = b;
        return IndexSet(std::move(n));
    }
    /// {c * b^m : m >= 1}.
    static IndexSet powers(Nat base, Nat scale = 1) {
        if (base < 2 || scale < 1) throw std::invalid_argument("powers needs base >= 2 and scale >= 1");
        Node n{Kind::Powers};
        n.a = base;
        n.b = scale;
        return IndexSet(std::move(n));
    }
    /// {c * m^k : m >= 1}.
    static IndexSet poly_image(Nat scale, Nat degree) {
        if (scale < 1 || degree < 2) throw std::invalid_argument("poly needs scale >= 1 and degree >= 2");
        Node n{Kind::PolyImage};
        n.a = scale;
        n.b = degree;
        return IndexSet(std::move(n));
    }
    /// {2^v (2k+1) : k >= 0}.
    static IndexSet dyadic(Nat v) {
        if (v > 62) throw std::invalid_argument("dyadic valuation too large");
        Node n{Kind::DyadicValuation};
        n.a = v;
        return IndexSet(std::move(n));
    }
    /// n >= n0 is a member iff eventually_in; below n0 exactly the listed members.
    static IndexSet tail_solution(bool eventually_in, Nat n0, std::vector<Nat> below) {
        std::erase_if(below, [&](Nat x) { return x == 0 || x >= n0; });
        std::sort(below.begin(), below.end());
        below.erase(std::unique(below.begin(), below.end()), below.end());
        Node n{Kind::TailSolution};
        n.eventually_in = eventually_in;
        n.n0 = std::max<Nat>(n0, 1);
        n.list = std::move(below);
        return IndexSet(std::move(n));
    }

    friend IndexSet operator|(const IndexSet& x, const IndexSet& y) { return binary(Kind::Union, x, y); }
    friend IndexSet operator&(const IndexSet& x, const IndexSet& y) { return binary(Kind::Intersection, x, y); }
    friend IndexSet operator-(const IndexSet& x, const IndexSet& y) { return binary(Kind::Difference, x, y); }
    friend IndexSet operator~(const IndexSet& x) {
        Node n{Kind::Complement};
        n.lhs = x.node_;
        return IndexSet(std::move(n));
    }

    Kind kind() const noexcept { return node_->kind; }
    const Node& node() const noexcept { return *node_; }
    IndexSet lhs() const { return IndexSet(node_->lhs); }
    IndexSet rhs() const { return IndexSet(node_->rhs); }

    bool contains(Nat n) const { return contains(*node_, n); }

    std::vector<Nat> members_upto(Nat N) const {
        std::vector<Nat> out;
        for (Nat n = 1; n <= N; ++n)
            if (contains(n)) out.push_back(n);
        return out;
    }

    Nat count_upto(Nat N) const {
        Nat c = 0;
        for (Nat n = 1; n <= N; ++n) c += contains(n);
        return c;
    }

    /// Structural equality of expressions (not extensional).
    friend bool operator==(const IndexSet& x, const IndexSet& y) { return same(x.node_.get(), y.node_.get()); }

    std::string to_string() const { return print(*node_); }

private:
    explicit IndexSet(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
    explicit IndexSet(std::shared_ptr<const Node> p) : node_(std::move(p)) {}

    static IndexSet binary(Kind k, const IndexSet& x, const IndexSet& y) {
        Node n{k};
        n.lhs = x.node_;
        n.rhs = y.node_;
        return IndexSet(std::move(n));
    }

    static bool is_power_of(Nat q, Nat b) {
        if (q < b) return false;
        while (q % b == 0) q /= b;
        return q == 1;
    }

    static bool is_kth_power(Nat q, Nat k) {
        auto pow_cmp = [&](Nat m) {  // sign of m^k - q, overflow-safe
            unsigned __int128 acc = 1;
            for (Nat i = 0; i < k; ++i) {
                acc *= m;
                if (acc > q) return 1;
            }
            return acc == q ? 0 : -1;
        };
        Nat lo = 1, hi = q;
        while (lo <= hi) {
            Nat mid = lo + (hi - lo) / 2;
            int c = pow_cmp(mid);
            if (c == 0) return true;
            if (c < 0)
                lo = mid + 1;
            else
                hi = mid - 1;
        }
        return false;
    }

    static bool contains(const Node& x, Nat n) {
        if (n == 0) return false;
        switch (x.kind) {
        case Kind::Finite: return std::binary_search(x.list.begin(), x.list.end(), n);
        case Kind::Full: return true;
        case Kind::ArithProg: return n >= x.b && (n - x.b) % x.a == 0;
        case Kind::Powers: return n % x.b == 0 && is_power_of(n / x.b, x.a);
        case Kind::PolyImage: return n % x.a == 0 && is_kth_power(n / x.a, x.b);
        case Kind::DyadicValuation: return static_cast<Nat>(std::countr_zero(n)) == x.a;
        case Kind::TailSolution:
            return n >= x.n0 ? x.eventually_in : std::binary_search(x.list.begin(), x.list.end(), n);
        case Kind::Union: return contains(*x.lhs, n) || contains(*x.rhs, n);
        case Kind::Intersection: return contains(*x.lhs, n) && contains(*x.rhs, n);
        case Kind::Complement: return !contains(*x.lhs, n);
        case Kind::Difference: return contains(*x.lhs, n) && !contains(*x.rhs, n);
        }
        return false;
    }

    static bool same(const Node* x, const Node* y) {
        if (x == y) return true;
        if (!x || !y || x->kind != y->kind) return false;
        return x->list == y->list && x->a == y->a && x->b == y->b && x->eventually_in == y->eventually_in &&
               x->n0 == y->n0 && same(x->lhs.get(), y->lhs.get()) && same(x->rhs.get(), y->rhs.get());
    }

    static std::string join(const std::vector<Nat>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
        return s;
    }

    static std::string print(const Node& x) {
        using std::to_string;
        switch (x.kind) {
        case Kind::Finite: return "finite{" + join(x.list) + "}";
        case Kind::Full: return "full";
        case Kind::ArithProg: return "ap(" + to_string(x.a) + "," + to_string(x.b) + ")";
        case Kind::Powers:
            return x.b == 1 ? "powers(" + to_string(x.a) + ")" : "powers(" + to_string(x.a) + "," + to_string(x.b) + ")";
        case Kind::PolyImage: return "poly(" + to_string(x.a) + "," + to_string(x.b) + ")";
        case Kind::DyadicValuation: return "dyadic(" + to_string(x.a) + ")";
        case Kind::TailSolution:
            return std::string("tail(") + (x.eventually_in ? "in" : "out") + "," + to_string(x.n0) + ",{" +
                   join(x.list) + "})";
        case Kind::Union: return "(" + print(*x.lhs) + " | " + print(*x.rhs) + ")";
        case Kind::Intersection: return "(" + print(*x.lhs) + " & " + print(*x.rhs) + ")";
        case Kind::Complement: return "~" + print(*x.lhs);
        case Kind::Difference: return "(" + print(*x.lhs) + " \\ " + print(*x.rhs) + ")";
        }
        return "?";
    }

    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Eventual-periodicity normal form

/// Past `stable_from`, n is in the set iff eval(n mod period, sparse bits of n).
class PeriodicForm {
public:
    static constexpr Nat kMaxPeriod = Nat{1} << 20;

    struct SparseLeaf {
        IndexSet::Kind kind;  // Powers or PolyImage
        Nat p1, p2;           // (base, scale) or (scale, degree)
        friend bool operator<(const SparseLeaf& x, const SparseLeaf& y) {
            return std::tie(x.kind, x.p1, x.p2) < std::tie(y.kind, y.p1, y.p2);
        }
        friend bool operator==(const SparseLeaf&, const SparseLeaf&) = default;
    };

    /// nullopt when the period would exceed kMaxPeriod.
    static std::optional<PeriodicForm> of(const IndexSet& s) {
        PeriodicForm f;
        f.root_ = s;
        if (!f.scan(s.node())) return std::nullopt;
        return f;
    }

    Nat period() const noexcept { return period_; }
    Nat stable_from() const noexcept { return stable_from_; }
    const std::vector<SparseLeaf>& sparse_leaves() const noexcept { return sparse_; }

    /// Large-n membership for residue r with the given sparse-leaf bits.
    bool eval(Nat r, const std::vector<bool>& bits) const { return eval(root_.node(), r, bits); }

    /// Residues r in [0, period) with eval(r, no sparse bits).
    Nat base_count() const {
        std::vector<bool> none(sparse_.size(), false);
        Nat c = 0;
        for (Nat r = 0; r < period_; ++r) c += eval(r, none);
        return c;
    }

    std::optional<Nat> first_base_residue() const {
        std::vector<bool> none(sparse_.size(), false);
        for (Nat r = 0; r < period_; ++r)
            if (eval(r, none)) return r;
        return std::nullopt;
    }

    /// True when some pattern with a sparse bit set evaluates to true for a
    /// residue where the base pattern is false, i.e. sparse leaves can add members.
    bool sparse_can_contribute() const {
        const std::size_t k = sparse_.size();
        if (k == 0) return false;
        if (k > 12) return true;
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
            std::vector<bool> bits(k);
            for (std::size_t i = 0; i < k; ++i) bits[i] = (mask >> i) & 1;
            for (Nat r = 0; r < period_; ++r)
                if (eval(r, bits)) return true;
        }
        return false;
    }

    /// With exactly one sparse leaf: whether infinitely many of its elements
    /// satisfy eval(n mod P, {true}). Decided on the residue cycle of the leaf.
    bool single_sparse_leaf_infinite() const {
        const auto& leaf = sparse_.at(0);
        std::vector<bool> on{true};
        const Nat P = period_;
        if (leaf.kind == IndexSet::Kind::Powers) {
            // c*b^m mod P is eventually periodic in m; collect its cycle.
            std::map<Nat, Nat> seen;
            std::vector<Nat> states;
            Nat s = leaf.p1 % P;
            for (Nat m = 1;; ++m) {
                if (auto it = seen.find(s); it != seen.end()) {
                    for (Nat i = it->second; i < states.size(); ++i)
                        if (eval(mulmod(leaf.p2 % P, states[i], P), on)) return true;
                    return false;
                }
                seen[s] = states.size();
                states.push_back(s);
                s = mulmod(s, leaf.p1 % P, P);
            }
        }
        for (Nat m = 0; m < P; ++m) {
            Nat v = leaf.p1 % P;
            for (Nat i = 0; i < leaf.p2; ++i) v = mulmod(v, m, P);
            if (eval(v, on)) return true;
        }
        return false;
    }

private:
    static Nat mulmod(Nat x, Nat y, Nat m) {
        return static_cast<Nat>((static_cast<unsigned __int128>(x) * y) % m);
    }

    bool absorb_period(Nat p) {
        Nat g = std::gcd(period_, p);
        unsigned __int128 l = static_cast<unsigned __int128>(period_ / g) * p;
        if (l > kMaxPeriod) return false;
        period_ = static_cast<Nat>(l);
        return true;
    }

    bool scan(const IndexSet::Node& x) {
        using K = IndexSet::Kind;
        switch (x.kind) {
        case K::Finite:
            if (!x.list.empty()) stable_from_ = std::max(stable_from_, x.list.back() + 1);
            return true;
        case K::Full: return true;
        case K::ArithProg:
            stable_from_ = std::max(stable_from_, x.b);
            return absorb_period(x.a);
        case K::DyadicValuation: return absorb_period(Nat{2} << x.a);
        case K::TailSolution:
            stable_from_ = std::max(stable_from_, x.n0);
            return true;
        case K::Powers:
        case K::PolyImage: {
            SparseLeaf leaf{x.kind, x.a, x.b};
            if (std::find(sparse_.begin(), sparse_.end(), leaf) == sparse_.end()) sparse_.push_back(leaf);
            return true;
        }
        case K::Complement: return scan(*x.lhs);
        default: return scan(*x.lhs) && scan(*x.rhs);
        }
    }

    bool eval(const IndexSet::Node& x, Nat r, const std::vector<bool>& bits) const {
        using K = IndexSet::Kind;
        switch (x.kind) {
        case K::Finite: return false;
        case K::Full: return true;
        case K::ArithProg: return r % x.a == x.b % x.a;
        case K::DyadicValuation: {
            Nat m = Nat{2} << x.a;
            return r % m == (Nat{1} << x.a);
        }
        case K::TailSolution: return x.eventually_in;
        case K::Powers:
        case K::PolyImage: {
            SparseLeaf leaf{x.kind, x.a, x.b};
            auto it = std::find(sparse_.begin(), sparse_.end(), leaf);
            return bits[it - sparse_.begin()];
        }
        case K::Union: return eval(*x.lhs, r, bits) || eval(*x.rhs, r, bits);
        case K::Intersection: return eval(*x.lhs, r, bits) && eval(*x.rhs, r, bits);
        case K::Complement: return !eval(*x.lhs, r, bits);
        case K::Difference: return eval(*x.lhs, r, bits) && !eval(*x.rhs, r, bits);
        }
        return false;
    }

    IndexSet root_ = IndexSet::full();
    Nat period_ = 1;
    Nat stable_from_ = 1;
    std::vector<SparseLeaf> sparse_;
};

}  // namespace roughlab
