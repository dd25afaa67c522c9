#pragma once

// Text format for models (.rcl files).
//
//   ideal density
//   sequence {
//     piece powers(2) {
//       atom value -5 prob 1/2
//       atom value 5 prob 1/2
//     }
//     piece ~powers(2) {
//       atom value 0 prob 1 - 1/n
//       atom value 1 prob 1/n
//     }
//   }
//   target Y {
//     atom value 1/4 prob 1
//   }
//   coupling independent
//   query limit r 1/4
//
// Statements may come in any order; each but `query` at most once.
// Rationals only. Pieces use n; family values use j, family probs use n.

#include "roughlab/ideal.hpp"
#include "roughlab/sequence.hpp"

#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

namespace roughlab::dsl {

struct Span {
    int line = 1, col = 1, end_line = 1, end_col = 1;
};

struct Diagnostic {
    enum class Kind { Syntax, Semantic };
    Kind kind;
    Span span;
    std::string message;
    std::vector<std::string> expected;  // syntax errors only

    std::string format() const {
        std::ostringstream o;
        o << span.line << ":" << span.col << ": " << (kind == Kind::Syntax ? "syntax" : "semantic") << " error: " << message;
        if (!expected.empty()) {
            o << " (expected ";
            for (std::size_t i = 0; i < expected.size(); ++i) o << (i ? ", " : "") << expected[i];
            o << ")";
        }
        return o.str();
    }
};

struct DslError : std::runtime_error {
    std::vector<Diagnostic> diagnostics;
    explicit DslError(std::vector<Diagnostic> d) : std::runtime_error(summary(d)), diagnostics(std::move(d)) {}

private:
    static std::string summary(const std::vector<Diagnostic>& d) {
        std::string s;
        for (const auto& x : d) s += (s.empty() ? "" : "\n") + x.format();
        return s;
    }
};

// ---------------------------------------------------------------------------
// Document

enum class IdealKind { Fin, Density, Summable, ExhHarmonic };

inline const char* ideal_keyword(IdealKind k) {
    switch (k) {
    case IdealKind::Fin: return "fin";
    case IdealKind::Density: return "density";
    case IdealKind::Summable: return "summable";
    case IdealKind::ExhHarmonic: return "exh harmonic";
    }
    return "?";
}

inline Ideal make_ideal(IdealKind k) {
    switch (k) {
    case IdealKind::Fin: return Ideal::fin();
    case IdealKind::Density: return Ideal::density();
    case IdealKind::Summable: return Ideal::summable();
    case IdealKind::ExhHarmonic: return Ideal::exh(harmonic_submeasure(), 256, 12, Rational(1, 1000), "exh harmonic");
    }
    throw std::logic_error("ideal kind");
}

struct Candidate {
    CouplingSpec::Kind coupling = CouplingSpec::Kind::Independent;  // with the target
    FiniteDist law = degenerate(Rational(0));
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Query {
    enum class Kind { Metric, Limit, Cluster, Diameter, Sandwich };
    Kind kind;
    std::optional<Rational> r;
    std::vector<Rational> eps, delta;
    std::vector<Candidate> candidates;
    Span span;
    friend bool operator==(const Query& a, const Query& b) {
        return std::tie(a.kind, a.r, a.eps, a.delta, a.candidates) == std::tie(b.kind, b.r, b.eps, b.delta, b.candidates);
    }
};

inline const char* query_keyword(Query::Kind k) {
    switch (k) {
    case Query::Kind::Metric: return "metric";
    case Query::Kind::Limit: return "limit";
    case Query::Kind::Cluster: return "cluster";
    case Query::Kind::Diameter: return "diameter";
    case Query::Kind::Sandwich: return "sandwich";
    }
    return "?";
}

struct SpecDocument {
    std::optional<IdealKind> ideal;
    std::vector<Piece> pieces;  // atoms sorted by eventual value
    std::optional<Family> family;
    std::optional<Target> target;  // coupling tables follow the sorted atom orders
    std::vector<Query> queries;

    PiecewiseSequence sequence() const { return PiecewiseSequence(pieces, family); }

    friend bool operator==(const SpecDocument& a, const SpecDocument& b);
};

namespace detail {

inline bool same_atoms(const std::vector<SymAtom>& a, const std::vector<SymAtom>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i].value == b[i].value) || !(a[i].prob == b[i].prob)) return false;
    return true;
}

inline bool same_table(const std::optional<JointTable>& a, const std::optional<JointTable>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    if (a->size() != b->size()) return false;
    for (std::size_t i = 0; i < a->size(); ++i) {
        if ((*a)[i].size() != (*b)[i].size()) return false;
        for (std::size_t k = 0; k < (*a)[i].size(); ++k)
            if (!((*a)[i][k] == (*b)[i][k])) return false;
    }
    return true;
}

}  // namespace detail

inline bool operator==(const SpecDocument& a, const SpecDocument& b) {
    if (a.ideal != b.ideal || a.queries != b.queries || a.pieces.size() != b.pieces.size()) return false;
    for (std::size_t i = 0; i < a.pieces.size(); ++i) {
        const auto &p = a.pieces[i], &q = b.pieces[i];
        if (!(p.region == q.region) || p.binomial != q.binomial || !detail::same_atoms(p.atoms, q.atoms)) return false;
    }
    if (a.family.has_value() != b.family.has_value()) return false;
    if (a.family && !detail::same_atoms(a.family->atoms, b.family->atoms)) return false;
    if (a.target.has_value() != b.target.has_value()) return false;
    if (!a.target) return true;
    const auto &s = *a.target, &t = *b.target;
    if (s.name != t.name || !(s.law == t.law) || s.coupling.kind != t.coupling.kind) return false;
    auto tables = [](const CouplingSpec& c, std::size_t n) {
        auto v = c.piece_tables;
        v.resize(std::max(v.size(), n));
        return v;
    };
    auto ta = tables(s.coupling, a.pieces.size()), tb = tables(t.coupling, a.pieces.size());
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i)
        if (!detail::same_table(ta[i], tb[i])) return false;
    return detail::same_table(s.coupling.family_table, t.coupling.family_table);
}

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

struct Token {
    enum class Kind { Int, Ident, Sym, End };
    Kind kind;
    std::string text;
    Span span;
};

inline std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of input";
    return "'" + t.text + "'";
}

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t m = 0; m < k; ++m, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Span sp{line, col, line, col};
        std::size_t j = i;
        Token::Kind kind;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && (src[j] == '.' || src[j] == 'e' || src[j] == 'E')) {
                sp.end_col = col + static_cast<int>(j - i) + 1;
                throw DslError({{Diagnostic::Kind::Syntax, sp, "floating-point literals are not accepted", {"rational p/q"}}});
            }
            kind = Token::Kind::Int;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            kind = Token::Kind::Ident;
        } else if (std::string_view("{}(),+-*/^~&|\\").find(c) != std::string_view::npos) {
            j = i + 1;
            kind = Token::Kind::Sym;
        } else {
            throw DslError({{Diagnostic::Kind::Syntax, sp, "unexpected character '" + std::string(1, c) + "'", {}}});
        }
        std::string text = src.substr(i, j - i);
        advance(j - i);
        sp.end_line = line;
        sp.end_col = col;
        out.push_back({kind, std::move(text), sp});
    }
    out.push_back({Token::Kind::End, "", {line, col, line, col}});
    return out;
}

// ---------------------------------------------------------------------------
// Parser

struct Expr {
    ExpRational f;
    std::set<std::string> vars;
    Span span;
};

class Parser {
public:
    explicit Parser(const std::string& src) : toks_(lex(src)) {}

    IndexSet index_set_only() {
        auto s = set_expr();
        if (peek().kind != Token::Kind::End) syntax({"end of input"});
        if (!diags_.empty()) throw DslError(diags_);
        return s;
    }

    SpecDocument document() {
        SpecDocument doc;
        std::optional<Span> ideal_at, seq_at, target_at, coupling_at;
        struct RawCoupling {
            CouplingSpec::Kind kind = CouplingSpec::Kind::Independent;
            std::vector<std::pair<std::size_t, std::pair<JointTable, Span>>> pieces;
            std::optional<std::pair<JointTable, Span>> family;
            Span span;
        };
        std::optional<RawCoupling> coupling;
        std::vector<Span> piece_spans;
        std::optional<Span> family_span;
        std::vector<std::vector<std::size_t>> piece_perm;
        std::vector<std::size_t> family_perm, target_perm;
        std::optional<Target> target;

        auto once = [&](std::optional<Span>& slot, const Token& t) {
            if (slot) semantic(t.span, "duplicate '" + t.text + "' statement");
            slot = t.span;
        };

        while (peek().kind != Token::Kind::End) {
            const Token& t = peek();
            if (is_word("ideal")) {
                once(ideal_at, next());
                if (accept_word("fin")) doc.ideal = IdealKind::Fin;
                else if (accept_word("density")) doc.ideal = IdealKind::Density;
                else if (accept_word("summable")) doc.ideal = IdealKind::Summable;
                else if (accept_word("exh")) {
                    expect_word("harmonic");
                    doc.ideal = IdealKind::ExhHarmonic;
                } else {
                    syntax({"'fin'", "'density'", "'summable'", "'exh'"});
                }
            } else if (is_word("sequence")) {
                once(seq_at, next());
                sequence_block(doc, piece_spans, family_span, piece_perm, family_perm);
            } else if (is_word("target")) {
                once(target_at, next());
                target = target_block(target_perm);
            } else if (is_word("coupling")) {
                once(coupling_at, next());
                RawCoupling rc;
                rc.span = t.span;
                if (accept_word("independent")) {
                    rc.kind = CouplingSpec::Kind::Independent;
                } else if (accept_word("diagonal")) {
                    rc.kind = CouplingSpec::Kind::Diagonal;
                } else if (accept_word("joint")) {
                    rc.kind = CouplingSpec::Kind::Joint;
                    expect_sym("{");
                    while (!accept_sym("}")) {
                        if (is_word("piece")) {
                            Span at = next().span;
                            std::size_t idx = static_cast<std::size_t>(nat());
                            rc.pieces.push_back({idx, {table_block(), at}});
                        } else if (is_word("family")) {
                            Span at = next().span;
                            rc.family = std::make_pair(table_block(), at);
                        } else {
                            syntax({"'piece'", "'family'", "'}'"});
                        }
                    }
                } else {
                    syntax({"'independent'", "'diagonal'", "'joint'"});
                }
                coupling = std::move(rc);
            } else if (is_word("query")) {
                next();
                doc.queries.push_back(query(t.span));
            } else {
                syntax({"'ideal'", "'sequence'", "'target'", "'coupling'", "'query'"});
            }
        }

        if (!seq_at) semantic(peek().span, "missing 'sequence' block");

        // coupling tables: validate shapes, permute to sorted atom orders
        if (target) {
            CouplingSpec spec;
            if (coupling) {
                spec.kind = coupling->kind;
                if (coupling->kind == CouplingSpec::Kind::Joint) {
                    spec.piece_tables.resize(doc.pieces.size());
                    for (auto& [idx, tab] : coupling->pieces) {
                        if (idx >= doc.pieces.size()) {
                            semantic(tab.second, "joint table refers to piece " + std::to_string(idx) + ", which does not exist");
                            continue;
                        }
                        if (spec.piece_tables[idx]) semantic(tab.second, "duplicate joint table for piece " + std::to_string(idx));
                        auto p = permute(tab.first, piece_perm[idx], target_perm, tab.second, doc.pieces[idx].atoms.size(),
                                         target->law.size());
                        if (p) spec.piece_tables[idx] = std::move(*p);
                    }
                    if (coupling->family) {
                        if (!doc.family) {
                            semantic(coupling->family->second, "joint table for a family that is not declared");
                        } else {
                            spec.family_table = permute(coupling->family->first, family_perm, target_perm, coupling->family->second,
                                                        doc.family->atoms.size(), target->law.size());
                        }
                    }
                }
            } else if (!target->law.is_degenerate()) {
                semantic(*target_at, "target with random law needs a declared coupling");
            }
            target->coupling = std::move(spec);
            doc.target = std::move(target);
        } else if (coupling) {
            semantic(coupling->span, "coupling declared without a target");
        }

        for (const auto& q : doc.queries) {
            if (q.kind != Query::Kind::Metric && !q.r) semantic(q.span, std::string("query ") + query_keyword(q.kind) + " needs r");
            if (!doc.target && q.kind != Query::Kind::Diameter) semantic(q.span, "query needs a target");
            if ((q.kind == Query::Kind::Limit || q.kind == Query::Kind::Cluster || q.kind == Query::Kind::Sandwich) && !doc.ideal)
                semantic(q.span, "query needs an ideal");
        }

        // model-level checks: per-piece first so the diagnostic lands on the piece
        if (diags_.empty()) {
            bool pieces_ok = true;
            for (std::size_t i = 0; i < doc.pieces.size(); ++i) {
                try {
                    PiecewiseSequence::check_piece(doc.pieces[i], "piece " + std::to_string(i));
                } catch (const ModelError& e) {
                    semantic(piece_spans[i], e.what());
                    pieces_ok = false;
                }
            }
            if (pieces_ok) {
                try {
                    auto s = doc.sequence();
                    if (doc.target) check_coupling(s, *doc.target, piece_spans, family_span);
                } catch (const ModelError& e) {
                    semantic(*seq_at, e.what());
                }
            }
        }
        if (!diags_.empty()) throw DslError(diags_);
        return doc;
    }

private:
    // --- token helpers
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool is_word(std::string_view w) const { return peek().kind == Token::Kind::Ident && peek().text == w; }
    bool is_sym(std::string_view s) const { return peek().kind == Token::Kind::Sym && peek().text == s; }
    bool accept_word(std::string_view w) {
        if (!is_word(w)) return false;
        next();
        return true;
    }
    bool accept_sym(std::string_view s) {
        if (!is_sym(s)) return false;
        next();
        return true;
    }
    [[noreturn]] void syntax(std::vector<std::string> expected) {
        auto d = diags_;
        d.push_back({Diagnostic::Kind::Syntax, peek().span, "unexpected " + describe(peek()), std::move(expected)});
        throw DslError(std::move(d));
    }
    void expect_word(std::string_view w) {
        if (!accept_word(w)) syntax({"'" + std::string(w) + "'"});
    }
    void expect_sym(std::string_view s) {
        if (!accept_sym(s)) syntax({"'" + std::string(s) + "'"});
    }
    void semantic(const Span& sp, std::string msg) { diags_.push_back({Diagnostic::Kind::Semantic, sp, std::move(msg), {}}); }

    Integer integer() {
        if (peek().kind != Token::Kind::Int) syntax({"integer"});
        return Integer(next().text);
    }
    Nat nat() {
        Span sp = peek().span;
        Integer v = integer();
        if (v > Integer(std::numeric_limits<Nat>::max() >> 1)) {
            semantic(sp, "integer too large");
            return 0;
        }
        return static_cast<Nat>(v);
    }
    /// p or p/q, unsigned.
    Rational literal() {
        Span sp = peek().span;
        Integer p = integer();
        if (accept_sym("/")) {
            Integer q = integer();
            if (q == 0) {
                semantic(sp, "zero denominator");
                return Rational(0);
            }
            return Rational(p, q);
        }
        return Rational(p);
    }
    Rational signed_literal() { return accept_sym("-") ? -literal() : literal(); }

    // --- index sets
    IndexSet set_expr() {
        IndexSet s = set_and();
        for (;;) {
            if (accept_sym("|")) s = s | set_and();
            else if (accept_sym("\\")) s = s - set_and();
            else return s;
        }
    }
    IndexSet set_and() {
        IndexSet s = set_unary();
        while (accept_sym("&")) s = s & set_unary();
        return s;
    }
    IndexSet set_unary() {
        if (accept_sym("~")) return ~set_unary();
        return set_atom();
    }
    std::vector<Nat> nat_list() {
        expect_sym("{");
        std::vector<Nat> xs;
        if (accept_sym("}")) return xs;
        do xs.push_back(nat());
        while (accept_sym(","));
        expect_sym("}");
        return xs;
    }
    IndexSet set_atom() {
        Span sp = peek().span;
        auto guarded = [&](auto make) {
            try {
                return make();
            } catch (const std::invalid_argument& e) {
                semantic(sp, e.what());
                return IndexSet::empty();
            }
        };
        if (accept_sym("(")) {
            IndexSet s = set_expr();
            expect_sym(")");
            return s;
        }
        if (accept_word("full")) return IndexSet::full();
        if (accept_word("finite")) return IndexSet::finite(nat_list());
        if (accept_word("ap") || accept_word("poly")) {
            bool ap = toks_[pos_ - 1].text == "ap";
            expect_sym("(");
            Nat a = nat();
            expect_sym(",");
            Nat b = nat();
            expect_sym(")");
            return guarded([&] { return ap ? IndexSet::arith_prog(a, b) : IndexSet::poly_image(a, b); });
        }
        if (accept_word("powers")) {
            expect_sym("(");
            Nat b = nat(), c = 1;
            if (accept_sym(",")) c = nat();
            expect_sym(")");
            return guarded([&] { return IndexSet::powers(b, c); });
        }
        if (accept_word("dyadic")) {
            expect_sym("(");
            Nat v = nat();
            expect_sym(")");
            return guarded([&] { return IndexSet::dyadic(v); });
        }
        if (accept_word("tail")) {
            expect_sym("(");
            bool in;
            if (accept_word("in")) in = true;
            else if (accept_word("out")) in = false;
            else syntax({"'in'", "'out'"});
            expect_sym(",");
            Nat n0 = nat();
            expect_sym(",");
            auto below = nat_list();
            expect_sym(")");
            return IndexSet::tail_solution(in, n0, below);
        }
        syntax({"'('", "'~'", "'full'", "'finite'", "'ap'", "'powers'", "'poly'", "'dyadic'", "'tail'"});
    }

    // --- expressions over n / j
    Expr expr(const std::set<std::string>& allowed) {
        Span start = peek().span;
        Expr e = sum();
        e.span = start;
        e.span.end_line = toks_[pos_ - 1].span.end_line;
        e.span.end_col = toks_[pos_ - 1].span.end_col;
        for (const auto& v : e.vars)
            if (!allowed.count(v)) {
                std::string ok;
                for (const auto& a : allowed) ok += (ok.empty() ? "" : ", ") + a;
                semantic(e.span, "grammar violation: '" + v + "' is not allowed here" +
                                     (ok.empty() ? " (constants only)" : " (allowed: " + ok + ")"));
            }
        if (e.vars.size() > 1) semantic(e.span, "grammar violation: n and j cannot be mixed in one expression");
        return e;
    }
    static Expr combine(Expr a, const Expr& b, ExpRational f) {
        a.vars.insert(b.vars.begin(), b.vars.end());
        a.f = std::move(f);
        return a;
    }
    Expr sum() {
        Expr e = product();
        for (;;) {
            if (accept_sym("+")) {
                Expr r = product();
                e = combine(std::move(e), r, e.f + r.f);
            } else if (accept_sym("-")) {
                Expr r = product();
                e = combine(std::move(e), r, e.f - r.f);
            } else {
                return e;
            }
        }
    }
    Expr product() {
        Expr e = unary();
        for (;;) {
            if (accept_sym("*")) {
                Expr r = unary();
                e = combine(std::move(e), r, e.f * r.f);
            } else if (is_sym("/")) {
                Span sp = next().span;
                Expr r = unary();
                if (r.f == ExpRational(0)) {
                    semantic(sp, "division by zero");
                    continue;
                }
                e = combine(std::move(e), r, e.f / r.f);
            } else {
                return e;
            }
        }
    }
    Expr unary() {
        if (accept_sym("-")) {
            Expr e = unary();
            e.f = -e.f;
            return e;
        }
        return power();
    }
    Expr power() {
        Expr base = primary();
        if (!is_sym("^")) return base;
        Span sp = next().span;
        if (peek().kind == Token::Kind::Ident && (peek().text == "n" || peek().text == "j")) {
            std::string v = next().text;
            base.vars.insert(v);
            if (!base.f.is_constant() || base.f.constant_value() <= 0) {
                semantic(sp, "grammar violation: only a positive rational constant may be raised to " + v);
                return base;
            }
            base.f = ExpRational::geometric(base.f.constant_value());
            return base;
        }
        Nat k = nat();
        if (k > 64) {
            semantic(sp, "exponent too large");
            return base;
        }
        base.f = pow(base.f, static_cast<std::int64_t>(k));
        return base;
    }
    Expr primary() {
        if (peek().kind == Token::Kind::Int) return {ExpRational(Rational(integer())), {}, {}};
        if (is_word("n") || is_word("j")) return {ExpRational::var(), {next().text}, {}};
        if (accept_sym("(")) {
            Expr e = sum();
            expect_sym(")");
            return e;
        }
        syntax({"integer", "'n'", "'j'", "'('", "'-'"});
    }

    // --- blocks
    std::vector<SymAtom> atom_block(const std::set<std::string>& value_vars, const std::set<std::string>& prob_vars,
                                    std::vector<std::size_t>& perm, const Span& owner) {
        expect_sym("{");
        std::vector<SymAtom> atoms;
        std::vector<Span> spans;
        while (!accept_sym("}")) {
            if (!is_word("atom")) syntax({"'atom'", "'}'"});
            spans.push_back(next().span);
            expect_word("value");
            Expr v = expr(value_vars);
            expect_word("prob");
            Expr p = expr(prob_vars);
            atoms.push_back({v.f, p.f});
        }
        perm.resize(atoms.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return (atoms[a].value - atoms[b].value).eventual_sign().sign < 0;
        });
        for (std::size_t i = 1; i < perm.size(); ++i)
            if (atoms[perm[i]].value == atoms[perm[i - 1]].value) semantic(spans[perm[i]], "duplicate atom value");
        if (atoms.empty()) semantic(owner, "block has no atoms");
        std::vector<SymAtom> sorted;
        for (auto i : perm) sorted.push_back(atoms[i]);
        return sorted;
    }

    void sequence_block(SpecDocument& doc, std::vector<Span>& piece_spans, std::optional<Span>& family_span,
                        std::vector<std::vector<std::size_t>>& piece_perm, std::vector<std::size_t>& family_perm) {
        expect_sym("{");
        while (!accept_sym("}")) {
            if (is_word("piece")) {
                Span at = next().span;
                Piece p{set_expr(), {}, {}};
                std::vector<std::size_t> perm;
                if (accept_word("binomial")) {
                    p.binomial = literal();
                } else {
                    p.atoms = atom_block({"n"}, {"n"}, perm, at);
                }
                doc.pieces.push_back(std::move(p));
                piece_spans.push_back(at);
                piece_perm.push_back(std::move(perm));
            } else if (is_word("family")) {
                Span at = next().span;
                if (doc.family) semantic(at, "only one family is allowed");
                expect_word("dyadic");
                expect_sym("(");
                expect_word("j");
                expect_sym(")");
                doc.family = Family{atom_block({"j"}, {"n"}, family_perm, at)};
                family_span = at;
            } else {
                syntax({"'piece'", "'family'", "'}'"});
            }
        }
    }

    FiniteDist law_block(std::vector<std::size_t>& perm, const Span& at) {
        expect_sym("{");
        std::vector<Atom> atoms;
        std::vector<Span> spans;
        while (!accept_sym("}")) {
            if (!is_word("atom")) syntax({"'atom'", "'}'"});
            spans.push_back(next().span);
            expect_word("value");
            Expr v = expr({});
            expect_word("prob");
            Expr p = expr({});
            if (v.f.is_constant() && p.f.is_constant()) atoms.push_back({v.f.constant_value(), p.f.constant_value()});
        }
        if (atoms.empty()) {
            semantic(at, "law has no atoms");
            return degenerate(Rational(0));
        }
        perm.resize(atoms.size());
        std::iota(perm.begin(), perm.end(), 0);
        auto val = [&](std::size_t i) { return std::get<Rational>(atoms[i].value); };
        std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return val(a) < val(b); });
        for (std::size_t i = 1; i < perm.size(); ++i)
            if (val(perm[i]) == val(perm[i - 1])) semantic(spans[perm[i]], "duplicate atom value");
        try {
            return make_dist(ValueSpace::real_line(), atoms);
        } catch (const MassNotOneError& e) {
            semantic(at, "mass " + to_string(e.total()) + " ≠ 1");
        } catch (const DistError& e) {
            semantic(at, e.what());
        }
        return degenerate(Rational(0));
    }

    Target target_block(std::vector<std::size_t>& perm) {
        if (peek().kind != Token::Kind::Ident) syntax({"target name"});
        const Token& name = next();
        return Target{name.text, law_block(perm, name.span), {}};
    }

    JointTable table_block() {
        expect_sym("{");
        JointTable t;
        while (!accept_sym("}")) {
            expect_word("row");
            std::vector<ExpRational> row;
            do row.push_back(expr({"n"}).f);
            while (accept_sym(","));
            t.push_back(std::move(row));
        }
        return t;
    }

    /// Rows in declaration order -> rows in sorted order; same for columns.
    std::optional<JointTable> permute(const JointTable& t, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                                      const Span& at, std::size_t nrows, std::size_t ncols) {
        if (t.size() != nrows || rows.size() != nrows) {
            semantic(at, "joint table has " + std::to_string(t.size()) + " rows, expected " + std::to_string(nrows));
            return std::nullopt;
        }
        for (const auto& r : t)
            if (r.size() != ncols || cols.size() != ncols) {
                semantic(at, "joint table row has " + std::to_string(r.size()) + " entries, expected " + std::to_string(ncols));
                return std::nullopt;
            }
        JointTable out(nrows, std::vector<ExpRational>(ncols, ExpRational(0)));
        for (std::size_t i = 0; i < nrows; ++i)
            for (std::size_t k = 0; k < ncols; ++k) out[i][k] = t[rows[i]][cols[k]];
        return out;
    }

    void check_coupling(const PiecewiseSequence& s, const Target& t, const std::vector<Span>& piece_spans,
                        const std::optional<Span>& family_span) {
        for (std::size_t i = 0; i < s.pieces().size(); ++i) {
            try {
                piece_view(s, t, i);
            } catch (const ModelError& e) {
                semantic(piece_spans[i], e.what());
            }
        }
        if (s.family()) {
            try {
                for (Nat j = 1; j <= 8; ++j) family_view(s, t, j);
            } catch (const ModelError& e) {
                semantic(*family_span, e.what());
            }
        }
    }

    Query query(const Span& at) {
        Query q;
        q.span = at;
        if (accept_word("metric")) q.kind = Query::Kind::Metric;
        else if (accept_word("limit")) q.kind = Query::Kind::Limit;
        else if (accept_word("cluster")) q.kind = Query::Kind::Cluster;
        else if (accept_word("diameter")) q.kind = Query::Kind::Diameter;
        else if (accept_word("sandwich")) q.kind = Query::Kind::Sandwich;
        else syntax({"'metric'", "'limit'", "'cluster'", "'diameter'", "'sandwich'"});
        if (accept_word("r")) {
            Span sp = peek().span;
            q.r = literal();
            (void)sp;
        }
        auto grid = [&](std::vector<Rational>& g, bool upto_one) {
            Span sp = peek().span;
            do {
                Rational v = literal();
                if (v <= 0 || (upto_one && v >= 1)) semantic(sp, "grid value " + to_string(v) + " out of range");
                g.push_back(v);
            } while (peek().kind == Token::Kind::Int);
        };
        if (accept_word("eps")) grid(q.eps, false);
        if (accept_word("delta")) grid(q.delta, true);
        if (accept_sym("{")) {
            while (!accept_sym("}")) {
                if (!is_word("candidate")) syntax({"'candidate'", "'}'"});
                Span cs = next().span;
                Candidate c;
                if (accept_word("independent")) c.coupling = CouplingSpec::Kind::Independent;
                else if (accept_word("diagonal")) c.coupling = CouplingSpec::Kind::Diagonal;
                else syntax({"'independent'", "'diagonal'"});
                std::vector<std::size_t> perm;
                c.law = law_block(perm, cs);
                q.candidates.push_back(std::move(c));
            }
        }
        return q;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diags_;
};

}  // namespace detail

/// Throws DslError carrying every diagnostic found.
inline SpecDocument parse(const std::string& text) { return detail::Parser(text).document(); }

/// A bare set expression such as "ap(2,1) & ~powers(2)".
inline IndexSet parse_index_set(const std::string& text) { return detail::Parser(text).index_set_only(); }

struct ParseResult {
    std::optional<SpecDocument> doc;
    std::vector<Diagnostic> diagnostics;
};

inline ParseResult try_parse(const std::string& text) {
    try {
        return {parse(text), {}};
    } catch (const DslError& e) {
        return {std::nullopt, e.diagnostics};
    }
}

// ---------------------------------------------------------------------------
// Printer

namespace detail {

inline void print_atoms(std::ostream& o, const std::vector<SymAtom>& atoms, const std::string& var, const std::string& indent) {
    for (const auto& a : atoms)
        o << indent << "atom value " << a.value.to_string(var) << " prob " << a.prob.to_string("n") << "\n";
}

inline void print_law(std::ostream& o, const FiniteDist& law, const std::string& indent) {
    for (const auto& a : law.atoms())
        o << indent << "atom value " << to_string(std::get<Rational>(a.value)) << " prob " << to_string(a.prob) << "\n";
}

inline void print_table(std::ostream& o, const JointTable& t, const std::string& indent) {
    for (const auto& row : t) {
        o << indent << "row ";
        for (std::size_t k = 0; k < row.size(); ++k) o << (k ? ", " : "") << row[k].to_string("n");
        o << "\n";
    }
}

}  // namespace detail

inline std::string print(const SpecDocument& doc) {
    std::ostringstream o;
    if (doc.ideal) o << "ideal " << ideal_keyword(*doc.ideal) << "\n";
    o << "sequence {\n";
    for (const auto& p : doc.pieces) {
        o << "  piece " << p.region.to_string();
        if (p.binomial) {
            o << " binomial " << to_string(*p.binomial) << "\n";
            continue;
        }
        o << " {\n";
        detail::print_atoms(o, p.atoms, "n", "    ");
        o << "  }\n";
    }
    if (doc.family) {
        o << "  family dyadic(j) {\n";
        detail::print_atoms(o, doc.family->atoms, "j", "    ");
        o << "  }\n";
    }
    o << "}\n";
    if (doc.target) {
        const auto& t = *doc.target;
        o << "target " << t.name << " {\n";
        detail::print_law(o, t.law, "  ");
        o << "}\n";
        switch (t.coupling.kind) {
        case CouplingSpec::Kind::Independent: o << "coupling independent\n"; break;
        case CouplingSpec::Kind::Diagonal: o << "coupling diagonal\n"; break;
        case CouplingSpec::Kind::Joint:
            o << "coupling joint {\n";
            for (std::size_t i = 0; i < t.coupling.piece_tables.size(); ++i)
                if (t.coupling.piece_tables[i]) {
                    o << "  piece " << i << " {\n";
                    detail::print_table(o, *t.coupling.piece_tables[i], "    ");
                    o << "  }\n";
                }
            if (t.coupling.family_table) {
                o << "  family {\n";
                detail::print_table(o, *t.coupling.family_table, "    ");
                o << "  }\n";
            }
            o << "}\n";
            break;
        }
    }
    for (const auto& q : doc.queries) {
        o << "query " << query_keyword(q.kind);
        if (q.r) o << " r " << to_string(*q.r);
        if (!q.eps.empty()) {
            o << " eps";
            for (const auto& e : q.eps) o << " " << to_string(e);
        }
        if (!q.delta.empty()) {
            o << " delta";
            for (const auto& d : q.delta) o << " " << to_string(d);
        }
        if (!q.candidates.empty()) {
            o << " {\n";
            for (const auto& c : q.candidates) {
                o << "  candidate " << (c.coupling == CouplingSpec::Kind::Diagonal ? "diagonal" : "independent") << " {\n";
                detail::print_law(o, c.law, "    ");
                o << "  }\n";
            }
            o << "}";
        }
        o << "\n";
    }
    return o.str();
}

}  // namespace roughlab::dsl
