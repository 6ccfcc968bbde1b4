#pragma once

#include <json.hpp>

#include "decomposition.hpp"

namespace fbc {

using nlohmann::json;

inline json to_json(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    return Rational(j.get<std::string>());
}

inline json to_json(const CycNumber& z) {
    json coeffs = json::array();
    for (const auto& c : z.coeffs()) coeffs.push_back(to_json(c));
    return json{{"level", z.level()}, {"coeffs", coeffs}};
}

inline CycNumber cyc_from_json(const json& j) {
    if (j.is_number_integer()) return CycNumber(j.get<long>());
    std::vector<Rational> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(rational_from_json(c));
    return CycNumber::from_poly(j.at("level").get<long>(), std::move(coeffs));
}

inline json to_json(const FiberSpec& f) {
    json j{{"level", f.working_level}};
    if (f.mode == FiberSpec::Mode::finite) {
        j["mode"] = "finite";
        j["N"] = f.N;
    } else {
        j["mode"] = "pi";
        j["pi"] = f.pi;
    }
    return j;
}

inline FiberSpec fiber_from_json(const json& j) {
    if (j.is_number_integer()) return FiberSpec::finite(j.get<long>());
    if (j.at("mode") == "finite") return FiberSpec::finite(j.at("N").get<long>());
    FiberSpec f;
    f.mode = FiberSpec::Mode::pi_infinity;
    f.pi = j.at("pi").get<std::vector<long>>();
    f.working_level = j.at("level").get<long>();
    f.N = f.working_level;
    return f;
}

inline json to_json(const FiberedPair& p) {
    return json{{"n", p.left_order()},
                {"m", p.right_order()},
                {"fiber", to_json(p.fiber())},
                {"U", json::array({json::array({p.a(), p.b()}), json::array({0, p.c()})})},
                {"phi", json::array({p.phi1(), p.phi2()})}};
}

inline FiberedPair pair_from_json(const json& j) {
    auto fiber = fiber_from_json(j.at("fiber"));
    long a = j.at("U").at(0).at(0).get<long>();
    long b = j.at("U").at(0).at(1).get<long>();
    long c = j.at("U").at(1).at(1).get<long>();
    long f1 = j.at("phi").at(0).get<long>();
    long f2 = j.at("phi").at(1).get<long>();
    return FiberedPair(j.at("n").get<long>(), j.at("m").get<long>(), fiber,
                       {{a, b, f1}, {0, c, f2}});
}

inline json to_json(const BisetElement& x) {
    json terms = json::array();
    for (const auto& [p, co] : x.terms())
        terms.push_back(json{{"pair", to_json(p)}, {"coeff", to_json(co)}});
    return json{{"left", x.left_order()},
                {"right", x.right_order()},
                {"fiber", to_json(x.fiber())},
                {"terms", terms}};
}

inline BisetElement element_from_json(const json& j) {
    auto fiber = fiber_from_json(j.at("fiber"));
    BisetElement x(j.at("left").get<long>(), j.at("right").get<long>(), fiber,
                   BisetElement::Ring::cyclotomic);
    for (const auto& t : j.at("terms"))
        x.add(pair_from_json(t.at("pair")), cyc_from_json(t.at("coeff")));
    return x;
}

inline json to_json(const VirtualCharacter& v) {
    json coeffs = json::array();
    for (const auto& c : v.coeffs()) coeffs.push_back(to_json(c));
    return json{{"n", v.group_order()}, {"coeffs", coeffs}};
}

inline VirtualCharacter character_from_json(const json& j) {
    long n = j.at("n").get<long>();
    std::vector<CycNumber> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(cyc_from_json(c));
    return VirtualCharacter::from_coeffs(n, std::move(coeffs));
}

inline json to_json(const DirichletCharacter& d) {
    return json{{"m", d.modulus()}, {"images", d.images()}};
}

inline DirichletCharacter dirichlet_from_json(const json& j) {
    return DirichletCharacter(j.at("m").get<long>(), j.at("images").get<std::vector<long>>());
}

inline json to_json(const PairMZ& p) { return to_json(p.zeta); }

inline PairMZ pairmz_from_json(const json& j) {
    auto d = dirichlet_from_json(j);
    return PairMZ(d.modulus(), d);
}

inline json to_json(const SummandDescriptor& d) {
    json members = json::array();
    for (const auto& mem : d.members) members.push_back(to_json(mem));
    json dims = json::object();
    for (const auto& [n, dim] : d.evaluation_dims) dims[std::to_string(n)] = dim;
    return json{{"kind", d.kind == SummandKind::large ? "large" : "small"},
                {"representative", to_json(d.representative)},
                {"members", members},
                {"evaluation_dims", dims}};
}

}  // namespace fbc
