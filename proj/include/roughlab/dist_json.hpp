#pragma once

// Canonical JSON form of laws and couplings:
//   {"space": "real" | {"points": [...], "dist": [["p/q", ...], ...]},
//    "atoms": [[value, "p/q"], ...]}
// Atoms are sorted by value; rationals are strings "p/q".

#include "roughlab/coupling.hpp"

#include "json.hpp"

namespace roughlab {

using nlohmann::json;

inline json rational_to_json(const Rational& q) { return to_string(q); }

inline Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    throw std::invalid_argument("expected a rational string or integer, got " + j.dump());
}

inline json space_to_json(const ValueSpace& s) {
    if (s.is_real_line()) return "real";
    json table = json::array();
    for (const auto& row : s.table()) {
        json r = json::array();
        for (const auto& d : row) r.push_back(rational_to_json(d));
        table.push_back(r);
    }
    return {{"points", s.labels()}, {"dist", table}};
}

inline ValueSpace space_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "real") return ValueSpace::real_line();
        throw std::invalid_argument("unknown value space " + j.dump());
    }
    std::vector<std::vector<Rational>> table;
    for (const auto& row : j.at("dist")) {
        std::vector<Rational> r;
        for (const auto& d : row) r.push_back(rational_from_json(d));
        table.push_back(std::move(r));
    }
    return ValueSpace::finite_points(j.at("points").get<std::vector<std::string>>(), std::move(table));
}

inline json point_to_json(const Point& p) {
    if (auto q = std::get_if<Rational>(&p)) return rational_to_json(*q);
    return std::get<std::string>(p);
}

inline Point point_from_json(const ValueSpace& s, const json& j) {
    if (s.is_real_line()) return rational_from_json(j);
    return j.get<std::string>();
}

inline json dist_to_json(const FiniteDist& d) {
    json atoms = json::array();
    for (const auto& a : d.atoms()) atoms.push_back(json::array({point_to_json(a.value), rational_to_json(a.prob)}));
    return {{"space", space_to_json(d.space())}, {"atoms", atoms}};
}

inline FiniteDist dist_from_json(const json& j) {
    ValueSpace s = j.contains("space") ? space_from_json(j.at("space")) : ValueSpace::real_line();
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({point_from_json(s, a.at(0)), rational_from_json(a.at(1))});
    return make_dist(s, std::move(atoms));
}

/// {"joint": [[x, y, "p/q"], ...]}; marginals are derived from the table.
inline Coupling coupling_from_json(const FiniteDist& x, const FiniteDist& y, const json& j) {
    if (j.is_string() && j.get<std::string>() == "product") return product_coupling(x, y);
    std::vector<JointAtom> cells;
    for (const auto& c : j.at("joint"))
        cells.push_back({point_from_json(x.space(), c.at(0)), point_from_json(x.space(), c.at(1)),
                         rational_from_json(c.at(2))});
    return explicit_coupling(x, y, std::move(cells));
}

inline json coupling_to_json(const Coupling& c) {
    json cells = json::array();
    for (const auto& t : c.table())
        cells.push_back(json::array({point_to_json(t.x), point_to_json(t.y), rational_to_json(t.prob)}));
    return {{"kind", c.kind() == Coupling::Kind::Independent ? "independent" : "joint"}, {"joint", cells}};
}

}  // namespace roughlab
