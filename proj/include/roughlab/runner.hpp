#pragma once

// Executes the queries of a parsed document and collects one JSON report.

#include "roughlab/analysis.hpp"
#include "roughlab/dist_json.hpp"
#include "roughlab/dsl.hpp"

namespace roughlab {

struct RunReport {
    json report;
    bool fatal = false;
};

namespace detail {

inline std::string candidate_name(std::size_t k) { return "candidate " + std::to_string(k + 1); }

inline json metric_query(const dsl::SpecDocument& doc, const PiecewiseSequence& s, const Target& t) {
    json out;
    json pts = json::array();
    for (Nat n = 1; n <= 10; ++n) pts.push_back({{"n", n}, {"rho", to_string(rho_at(s, t, n))}});
    out["rho_at"] = pts;
    if (doc.ideal) out["verdict"] = metric_verdict(s, t, dsl::make_ideal(*doc.ideal)).to_json();
    return out;
}

inline json limit_query(const dsl::Query& q, const PiecewiseSequence& s, const Target& t, const Ideal& I) {
    json out = check_rough_limit(s, t, *q.r, I).to_json();
    if (!q.eps.empty()) {
        std::vector<Rational> deltas = q.delta.empty() ? std::vector<Rational>{Rational(1, 2)} : q.delta;
        json grid = json::array();
        for (const auto& e : q.eps)
            for (const auto& d : deltas) {
                auto E = exception_set(s, t, *q.r, e, d);
                grid.push_back({{"epsilon", to_string(e)}, {"delta", to_string(d)}, {"membership", to_string(ideal_member(I, E).answer)}});
            }
        out["exception_sets"] = grid;
    }
    return out;
}

/// Candidates as targets paired with X_n: a diagonal candidate stands for the
/// document's own target.
inline Target candidate_target(const dsl::SpecDocument& doc, const dsl::Candidate& c, std::size_t k) {
    if (c.coupling == CouplingSpec::Kind::Diagonal) {
        if (!doc.target) throw AnalysisError(candidate_name(k) + ": diagonal candidate needs a target");
        if (doc.target->law != c.law) throw AnalysisError(candidate_name(k) + ": diagonal candidate must carry the target's law");
        return *doc.target;
    }
    return {candidate_name(k), c.law, {}};
}

}  // namespace detail

inline RunReport run_document(const dsl::SpecDocument& doc) {
    RunReport rr;
    auto s = doc.sequence();
    json queries = json::array();
    for (const auto& q : doc.queries) {
        json entry{{"query", dsl::query_keyword(q.kind)}, {"line", q.span.line}};
        if (q.r) entry["r"] = to_string(*q.r);
        try {
            switch (q.kind) {
            case dsl::Query::Kind::Metric: entry["result"] = detail::metric_query(doc, s, *doc.target); break;
            case dsl::Query::Kind::Limit:
                entry["result"] = detail::limit_query(q, s, *doc.target, dsl::make_ideal(*doc.ideal));
                break;
            case dsl::Query::Kind::Cluster:
                entry["result"] = classify_cluster(s, *doc.target, *q.r, dsl::make_ideal(*doc.ideal)).to_json();
                break;
            case dsl::Query::Kind::Diameter: {
                std::vector<Target> members;
                for (std::size_t k = 0; k < q.candidates.size(); ++k) members.push_back(detail::candidate_target(doc, q.candidates[k], k));
                auto I = doc.ideal ? dsl::make_ideal(*doc.ideal) : Ideal::fin();
                auto rep = diameter_probe(s, *q.r, I, members);
                entry["result"] = rep.to_json();
                rr.fatal = rr.fatal || rep.fatal;
                break;
            }
            case dsl::Query::Kind::Sandwich: {
                std::vector<ProbeCandidate> cands;
                for (std::size_t k = 0; k < q.candidates.size(); ++k) {
                    const auto& c = q.candidates[k];
                    cands.push_back({detail::candidate_name(k), c.law, c.coupling == CouplingSpec::Kind::Diagonal});
                }
                auto rep = sandwich_probe(s, *doc.target, *q.r, dsl::make_ideal(*doc.ideal), cands);
                entry["result"] = rep.to_json();
                rr.fatal = rr.fatal || rep.fatal;
                break;
            }
            }
        } catch (const AnalysisError& e) {
            // precondition failures are reported per query, not fatal for the run
            entry["error"] = {{"kind", "precondition"}, {"message", e.what()}};
        }
        queries.push_back(std::move(entry));
    }
    rr.report = {{"ideal", doc.ideal ? json(dsl::ideal_keyword(*doc.ideal)) : json(nullptr)},
                 {"target", doc.target ? json(doc.target->name) : json(nullptr)},
                 {"probe_count", doc.queries.size()},
                 {"queries", queries},
                 {"fatal", rr.fatal}};
    return rr;
}

}  // namespace roughlab
