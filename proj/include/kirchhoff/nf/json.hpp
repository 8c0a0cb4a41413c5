#pragma once

// JSON form of vector fields. Each term is
//   {"a": 3, "kind": "anti", "j": [[1,1],[1,2]], "h": [[[1,1],[1,2]]], "k": [],
//    "n": 1, "re": "0", "im": "9/64"}
// where the first n entries of h are Omega2 divisors and the rest Omega4.
// Coefficients are exact fractions written as strings.

#include <string>

#include <json.hpp>

#include "fields.hpp"

namespace kirchhoff::nf {

inline nlohmann::json index_to_json(const IndexVector& j) {
    auto out = nlohmann::json::array();
    for (auto& x : j) out.push_back({x.delta, x.a});
    return out;
}

inline IndexVector index_from_json(const nlohmann::json& v) {
    IndexVector j;
    for (auto& e : v) j.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return canonicalize(std::move(j));
}

inline nlohmann::json field_to_json(const FieldBase& f, const std::string& name = "") {
    nlohmann::json out;
    if (!name.empty()) out["name"] = name;
    out["order"] = f.order();
    out["N"] = f.cutoff();
    out["terms"] = nlohmann::json::array();
    for (auto& [k, c] : f.raw()) {
        Shape s = shape_of(k.a, k.m);
        nlohmann::json t;
        t["a"] = k.a;
        t["kind"] = kind_name(s.kind);
        t["j"] = index_to_json(s.j);
        auto h = nlohmann::json::array();
        for (auto& D : k.d.h2) h.push_back(index_to_json(D));
        for (auto& D : k.d.h4) h.push_back(index_to_json(D));
        auto kk = nlohmann::json::array();
        for (auto& D : k.d.k) kk.push_back(index_to_json(D));
        t["h"] = h;
        t["k"] = kk;
        t["n"] = k.d.n();
        t["re"] = c.re.get_str();
        t["im"] = c.im.get_str();
        out["terms"].push_back(std::move(t));
    }
    return out;
}

inline RationalVF field_from_json(const nlohmann::json& in) {
    RationalVF f(in.at("order").get<int>(), in.at("N").get<int>());
    for (auto& t : in.at("terms")) {
        const std::string kind = t.at("kind").get<std::string>();
        if (kind != "diag" && kind != "anti") throw std::invalid_argument("unknown term kind " + kind);
        Desc d;
        const int n = t.at("n").get<int>();
        int i = 0;
        for (auto& D : t.at("h")) (i++ < n ? d.h2 : d.h4).push_back(index_from_json(D));
        if (i < n) throw std::invalid_argument("n exceeds the number of h divisors");
        for (auto& D : t.at("k")) d.k.push_back(index_from_json(D));
        QC c(Rat(t.at("re").get<std::string>()), Rat(t.at("im").get<std::string>()));
        c.re.canonicalize();
        c.im.canonicalize();
        f.add(t.at("a").get<int>(), kind == "diag" ? Kind::diag : Kind::anti, index_from_json(t.at("j")), d, c);
    }
    return f;
}

}  // namespace kirchhoff::nf
