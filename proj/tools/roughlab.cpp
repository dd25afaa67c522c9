// roughlab command-line front end.
//
// Exit codes: 0 fine, 1 fatal inconsistency or failed reproduction, 2 bad
// input (usage, parse or model errors).

#include "roughlab/montecarlo.hpp"
#include "roughlab/registry.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace roughlab;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

dsl::SpecDocument load(const std::string& path) { return dsl::parse(slurp(path)); }

Rational rat(const std::string& s) {
    try {
        return parse_rational(s);
    } catch (const std::exception&) {
        throw InputError("not a rational: '" + s + "'");
    }
}

/// "v:p,v:p,..." or a single value for a point mass.
FiniteDist parse_law(const std::string& text) {
    if (text.find(':') == std::string::npos) return degenerate(rat(text));
    std::vector<Atom> atoms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("law atom '" + item + "' needs value:prob");
        atoms.push_back({rat(item.substr(0, colon)), rat(item.substr(colon + 1))});
    }
    return make_dist(ValueSpace::real_line(), std::move(atoms));
}

/// "x,y:p;x,y:p;..."
std::vector<JointAtom> parse_cells(const std::string& text) {
    std::vector<JointAtom> cells;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto comma = item.find(','), colon = item.find(':');
        if (comma == std::string::npos || colon == std::string::npos || colon < comma)
            throw InputError("joint cell '" + item + "' needs x,y:p");
        cells.push_back({rat(item.substr(0, comma)), rat(item.substr(comma + 1, colon - comma - 1)), rat(item.substr(colon + 1))});
    }
    return cells;
}

Ideal ideal_by_name(const std::string& name) {
    if (name == "fin") return Ideal::fin();
    if (name == "density") return Ideal::density();
    if (name == "summable") return Ideal::summable();
    if (name == "exh") return dsl::make_ideal(dsl::IdealKind::ExhHarmonic);
    throw InputError("unknown ideal '" + name + "' (fin, density, summable, exh)");
}

Ideal doc_ideal(const dsl::SpecDocument& doc, const std::string& override_name) {
    if (!override_name.empty()) return ideal_by_name(override_name);
    if (!doc.ideal) throw InputError("document declares no ideal; pass --ideal");
    return dsl::make_ideal(*doc.ideal);
}

const Target& doc_target(const dsl::SpecDocument& doc) {
    if (!doc.target) throw InputError("document declares no target");
    return *doc.target;
}

std::uint64_t default_seed() {
    if (const char* s = std::getenv("ROUGHLAB_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw InputError(std::string("ROUGHLAB_SEED is not an integer: ") + s);
        }
    }
    return kDefaultSeed;
}

/// "10,20,30" or ranges such as "1-50".
std::vector<Nat> parse_indices(const std::string& text) {
    std::vector<Nat> out;
    std::stringstream ss(text);
    std::string item;
    try {
        while (std::getline(ss, item, ',')) {
            auto dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
            } else {
                Nat a = std::stoull(item.substr(0, dash)), b = std::stoull(item.substr(dash + 1));
                for (Nat x = a; x <= b; ++x) out.push_back(x);
            }
        }
    } catch (const std::logic_error&) {
        throw InputError("bad index list '" + text + "'");
    }
    for (Nat x : out)
        if (x == 0) throw InputError("indices start at 1");
    return out;
}

void print_verdict(const std::string& label, const Verdict& v) {
    std::cout << std::left << std::setw(18) << label << to_string(v.answer) << '\n';
    if (!v.witness.is_null()) {
        std::cout << "  witness:";
        for (const char* k : {"epsilon", "delta", "region", "exceedance_limit"})
            if (v.witness.contains(k)) std::cout << ' ' << k << '=' << v.witness[k].get<std::string>();
        if (v.witness.contains("replay")) std::cout << " replay=" << v.witness["replay"]["answer"].get<std::string>();
        std::cout << '\n';
    }
    if (v.certificate.contains("blocking")) std::cout << "  blocked by: " << v.certificate["blocking"].dump() << '\n';
}

void print_cluster(const ClusterReport& c) {
    print_verdict("limit point", c.limit_point);
    print_verdict("strong cluster", c.strong_cluster);
    print_verdict("weak cluster", c.weak_cluster);
    if (c.delta_star_sup) std::cout << std::left << std::setw(18) << "delta* sup" << to_string(*c.delta_star_sup) << '\n';
}

struct Options {
    bool json = false;
    std::string file, ideal, set, x, y, joint, coupling = "independent", id, indices = "10-59";
    std::string r = "0", eps = "1/2";
    std::vector<std::string> candidates;
    bool self = false, all = false, source = false;
    Nat count = 0;
    std::uint64_t samples = 10000;
    std::optional<std::uint64_t> seed;
};

int cmd_metric(const Options& o) {
    auto x = parse_law(o.x), y = parse_law(o.y);
    Coupling c = !o.joint.empty()          ? explicit_coupling(x, y, parse_cells(o.joint))
                 : o.coupling == "diagonal" ? (x == y ? diagonal_coupling(x) : throw InputError("diagonal coupling needs equal laws"))
                                            : product_coupling(x, y);
    auto k = kyfan_between(x, y, c);
    if (o.json) std::cout << json{{"rho", to_string(k.rho)}, {"attained_tail", to_string(k.attained_tail)}}.dump(2) << '\n';
    else std::cout << "rho = " << to_string(k.rho) << '\n';
    return 0;
}

int cmd_density(const Options& o) {
    auto A = dsl::parse_index_set(o.set);
    auto d = natural_density(A);
    json j{{"set", A.to_string()}};
    j["kind"] = d.kind == DensityResult::Kind::Exact ? "exact" : d.kind == DensityResult::Kind::Interval ? "interval" : "unknown";
    if (d.kind != DensityResult::Kind::Unknown) j["lower"] = to_string(d.lower), j["upper"] = to_string(d.upper);
    if (o.count) j["counting_ratio"] = {{"N", o.count}, {"ratio", to_string(estimate_density(A, o.count))}};
    if (o.json) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "density of " << A.to_string() << ": ";
        if (d.is_exact()) std::cout << to_string(d.value());
        else if (d.kind == DensityResult::Kind::Interval) std::cout << "in [" << to_string(d.lower) << ", " << to_string(d.upper) << "]";
        else std::cout << "unknown";
        std::cout << '\n';
        if (o.count) std::cout << "count ratio up to " << o.count << ": " << j["counting_ratio"]["ratio"].get<std::string>() << '\n';
    }
    return 0;
}

int cmd_ideal_member(const Options& o) {
    auto I = ideal_by_name(o.ideal.empty() ? "density" : o.ideal);
    auto A = dsl::parse_index_set(o.set);
    auto m = ideal_member(I, A);
    json j{{"ideal", I.name()}, {"set", A.to_string()}, {"answer", to_string(m.answer)}, {"certificate", m.certificate},
           {"truncation_based", m.truncation_based}};
    if (o.json) std::cout << j.dump(2) << '\n';
    else std::cout << A.to_string() << " in " << I.name() << ": " << to_string(m.answer) << '\n' << "  " << m.certificate.dump() << '\n';
    return 0;
}

int cmd_check(const Options& o) {
    auto doc = load(o.file);
    auto v = check_rough_limit(doc.sequence(), doc_target(doc), rat(o.r), doc_ideal(doc, o.ideal));
    if (o.json) std::cout << v.to_json().dump(2) << '\n';
    else print_verdict("rough limit", v);
    return 0;
}

int cmd_cluster(const Options& o) {
    auto doc = load(o.file);
    auto c = classify_cluster(doc.sequence(), doc_target(doc), rat(o.r), doc_ideal(doc, o.ideal));
    if (o.json) std::cout << c.to_json().dump(2) << '\n';
    else print_cluster(c);
    return 0;
}

int cmd_sandwich(const Options& o) {
    auto doc = load(o.file);
    std::vector<ProbeCandidate> cands;
    if (o.self) cands.push_back({"target", doc_target(doc).law, true});
    for (std::size_t k = 0; k < o.candidates.size(); ++k) cands.push_back({o.candidates[k], parse_law(o.candidates[k]), false});
    auto rep = sandwich_probe(doc.sequence(), doc_target(doc), rat(o.r), doc_ideal(doc, o.ideal), cands);
    if (o.json) {
        std::cout << rep.to_json().dump(2) << '\n';
    } else {
        std::cout << std::left << std::setw(20) << "candidate" << std::setw(11) << "theta_bar" << std::setw(6) << "LIM"
                  << std::setw(8) << "ball" << "rho\n";
        for (const auto& r : rep.rows)
            std::cout << std::setw(20) << r.name << std::setw(11) << to_string(r.theta) << std::setw(6) << to_string(r.lim)
                      << std::setw(8) << to_string(r.ball) << to_string(r.rho) << (r.consistent ? "" : "  INCONSISTENT") << '\n';
    }
    return rep.fatal ? 1 : 0;
}

int cmd_diameter(const Options& o) {
    auto doc = load(o.file);
    std::vector<Target> members;
    for (const auto& c : o.candidates) members.push_back({c, parse_law(c), {}});
    auto rep = diameter_probe(doc.sequence(), rat(o.r), doc_ideal(doc, o.ideal), members);
    if (o.json) std::cout << rep.to_json().dump(2) << '\n';
    else
        std::cout << "max rho = " << to_string(rep.max_rho) << ", bound min(1, 2r) = " << to_string(rep.bound)
                  << (rep.fatal ? "  INCONSISTENT" : "") << '\n';
    return rep.fatal ? 1 : 0;
}

int cmd_mc_check(const Options& o) {
    auto doc = load(o.file);
    SampleConfig cfg{o.seed ? *o.seed : default_seed(), o.samples, parse_indices(o.indices), 3};
    if (cfg.samples_per_index == 0) throw InputError("--samples must be positive");
    auto rows = estimate_exceedance_over(doc.sequence(), doc_target(doc), rat(o.r), rat(o.eps), cfg);
    std::size_t within = 0;
    for (const auto& e : rows) within += e.pass(cfg.confidence_sigma).value_or(false);
    if (o.json) {
        json out = json::array();
        for (const auto& e : rows)
            out.push_back({{"n", e.n}, {"estimate", e.value_d()}, {"sigma", e.sigma},
                           {"exact", e.exact ? json(to_string(*e.exact)) : json(nullptr)}, {"pass", *e.pass(cfg.confidence_sigma)}});
        std::cout << json{{"seed", cfg.seed}, {"samples", cfg.samples_per_index}, {"rows", out}, {"within", within}}.dump(2) << '\n';
    } else {
        std::cout << estimates_csv(rows, cfg.confidence_sigma);
        std::cerr << within << "/" << rows.size() << " within " << cfg.confidence_sigma << " sigma (seed " << cfg.seed << ")\n";
    }
    return 0;
}

int cmd_reproduce(const Options& o) {
    if (o.source) {
        if (o.id.empty()) throw InputError("--source needs a registry id");
        std::cout << find_entry(o.id).source;
        return 0;
    }
    std::vector<const RegistryEntry*> todo;
    if (o.all || o.id.empty()) {
        for (const auto& e : registry()) todo.push_back(&e);
    } else {
        todo.push_back(&find_entry(o.id));
    }
    std::vector<CheckRow> rows;
    for (const auto* e : todo) {
        auto r = reproduce(*e);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    bool ok = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
    if (o.json) {
        std::cout << json{{"rows", rows_to_json(rows)}, {"all_pass", ok}}.dump(2) << '\n';
    } else {
        for (const auto& r : rows)
            std::cout << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(18) << r.id << std::setw(50) << r.key << " expected "
                      << r.expected << ", got " << r.actual << "  [" << basis_name(r.basis) << "]\n";
    }
    return ok ? 0 : 1;
}

int cmd_run(const Options& o) {
    auto rr = run_document(load(o.file));
    // the report is JSON either way; --json only drops the indentation
    std::cout << (o.json ? rr.report.dump() : rr.report.dump(2)) << '\n';
    return rr.fatal ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"roughlab: rough ideal convergence in probability for symbolic sequences"};
    app.require_subcommand(1);
    Options o;
    app.add_flag("--json", o.json, "machine-readable output");

    auto file_cmd = [&](const char* name, const char* help) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("file", o.file, "sequence document")->required()->check(CLI::ExistingFile);
        c->add_option("--ideal", o.ideal, "override the document's ideal (fin, density, summable, exh)");
        return c;
    };

    auto* metric = app.add_subcommand("metric", "Ky Fan distance between two laws");
    metric->add_option("--x", o.x, "law of X, e.g. 0:1/2,1:1/2 or 3/4")->required();
    metric->add_option("--y", o.y, "law of Y")->required();
    metric->add_option("--coupling", o.coupling, "independent or diagonal")->check(CLI::IsMember({"independent", "diagonal"}));
    metric->add_option("--joint", o.joint, "explicit cells x,y:p;x,y:p");

    auto* density = app.add_subcommand("density", "natural density of an index set");
    density->add_option("set", o.set, "set expression, e.g. 'ap(4,1) | powers(2)'")->required();
    density->add_option("--count", o.count, "also count |A ∩ [1,N]|/N");

    auto* member = app.add_subcommand("ideal-member", "decide A ∈ I");
    member->add_option("set", o.set, "set expression")->required();
    member->add_option("--ideal", o.ideal, "fin, density, summable or exh");

    auto* check = file_cmd("check", "rough I-convergence in probability to the document's target");
    check->add_option("-r,--r", o.r, "roughness degree");
    auto* cluster = file_cmd("cluster", "limit point and cluster point classification");
    cluster->add_option("-r,--r", o.r, "roughness degree");
    auto* sandwich = file_cmd("sandwich", "theta_bar ⊆ LIM ⊆ closed ball probe around the target");
    sandwich->add_option("-r,--r", o.r, "roughness degree");
    sandwich->add_option("--candidate", o.candidates, "candidate law (independent of the target)");
    sandwich->add_flag("--self", o.self, "include the target itself, diagonally coupled");
    auto* diameter = file_cmd("diameter", "diameter bound over verified rough limits");
    diameter->add_option("-r,--r", o.r, "roughness degree");
    diameter->add_option("--member", o.candidates, "member law")->required();

    auto* mc = file_cmd("mc-check", "Monte Carlo cross-check of P(d > r + eps)");
    mc->add_option("-r,--r", o.r, "roughness degree");
    mc->add_option("--eps", o.eps, "epsilon");
    mc->add_option("--seed", o.seed, "seed (default: $ROUGHLAB_SEED or a fixed value)");
    mc->add_option("--samples", o.samples, "samples per index");
    mc->add_option("--indices", o.indices, "indices, e.g. 10,20 or 1-50");

    auto* repro = app.add_subcommand("reproduce", "reproduce the registered worked examples");
    repro->add_option("id", o.id, "registry id");
    repro->add_flag("--all", o.all, "every entry");
    repro->add_flag("--source", o.source, "print the entry's embedded document instead");

    auto* run = app.add_subcommand("run", "execute every query of a document");
    run->add_option("file", o.file, "sequence document")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*metric) return cmd_metric(o);
        if (*density) return cmd_density(o);
        if (*member) return cmd_ideal_member(o);
        if (*check) return cmd_check(o);
        if (*cluster) return cmd_cluster(o);
        if (*sandwich) return cmd_sandwich(o);
        if (*diameter) return cmd_diameter(o);
        if (*mc) return cmd_mc_check(o);
        if (*repro) return cmd_reproduce(o);
        if (*run) return cmd_run(o);
    } catch (const dsl::DslError& e) {
        for (const auto& d : e.diagnostics) std::cerr << (o.file.empty() ? "" : o.file + ":") << d.format() << '\n';
        return 2;
    } catch (const AnalysisError& e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        return 2;
    } catch (const UnknownRegistryId& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
