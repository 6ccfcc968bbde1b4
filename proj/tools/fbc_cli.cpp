// Command line front end: JSON Lines in, JSON Lines out.
#include <CLI11.hpp>
#include <iostream>
#include <random>
#include <string>

#include <fbc/json_io.hpp>
#include <fbc/oracle.hpp>

using namespace fbc;
using nlohmann::json;

namespace {

bool pretty = false;

void emit(const json& j) { std::cout << (pretty ? j.dump(2) : j.dump()) << "\n"; }

[[noreturn]] void fail_input(const std::string& msg) {
    emit(json{{"error", msg}});
    std::exit(1);
}

[[noreturn]] void fail_verify(const std::string& suite, const json& counterexample) {
    emit(json{{"error", "verification failure"},
              {"suite", suite},
              {"counterexample", counterexample}});
    std::exit(2);
}

json read_line() {
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        return json::parse(line);
    }
    fail_input("expected a JSON line on standard input");
}

std::vector<long> parse_pi(const std::string& s) {
    std::vector<long> primes;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        primes.push_back(std::stol(tok));
    }
    if (primes.empty()) fail_input("--pi: expected a comma separated list of primes");
    return primes;
}

Relation make_relation(long fiber_n, const std::string& pi, long bound) {
    if (fiber_n > 0 && !pi.empty()) fail_input("give --fiber or --pi, not both");
    if (fiber_n > 0) {
        if (fiber_n > 1 && prime_power_factors(fiber_n).size() != 1)
            fail_input("composite finite fibers are out of scope for class enumeration; "
                       "use a prime power --fiber or a --pi relation");
        return Relation::fiber_relation(FiberSpec::finite(fiber_n));
    }
    if (!pi.empty()) return Relation::pi_relation(parse_pi(pi));
    (void)bound;
    fail_input("classes/summands need --fiber N or --pi \"p1,p2\"");
}

int cmd_product() {
    auto x = element_from_json(read_line());
    auto y = element_from_json(read_line());
    emit(to_json(mackey_product(x, y)));
    return 0;
}

int cmd_factor() {
    auto p = pair_from_json(read_line());
    auto factors = factorize(p);
    BisetElement prod = factors.front();
    for (size_t i = 1; i < factors.size(); ++i) prod = mackey_product(prod, factors[i]);
    bool round_trip = prod == BisetElement::transitive(p);
    json fs = json::array();
    for (const auto& f : factors) fs.push_back(to_json(f));
    emit(json{{"factors", fs}, {"round_trip", round_trip}});
    if (!round_trip) fail_verify("factor", to_json(p));
    return 0;
}

int cmd_act() {
    auto x = element_from_json(read_line());
    auto chi = character_from_json(read_line());
    emit(to_json(act_generic(x, chi)));
    return 0;
}

int cmd_linearize() {
    auto x = element_from_json(read_line());
    emit(to_json(linearize(x)));
    return 0;
}

int cmd_classes(long fiber_n, const std::string& pi, long bound, bool full) {
    auto rel = make_relation(fiber_n, pi, bound);
    for (const auto& d : enum_classes(bound, rel)) {
        if (full) {
            emit(to_json(d));
        } else {
            json members = json::array();
            for (const auto& mem : d.members) members.push_back(to_json(mem));
            emit(json{{"representative", to_json(d.representative)}, {"members", members}});
        }
    }
    return 0;
}

int cmd_gamma(long order, long k_order, long kappa_gi, long fiber_n) {
    if (fiber_n < 1) fail_input("gamma needs --fiber N");
    CyclicGroup G(order);
    if (k_order < 1 || order % k_order != 0) fail_input("--k-order must divide --order");
    Subgroup K(G, order / k_order);
    FiberSpec A = FiberSpec::finite(fiber_n);
    CyclicHom kappa(k_order, fiber_n, kappa_gi);
    auto gg = gamma_group(G, K, kappa, A);
    json params = json::array();
    for (const auto& [psi_gi, sigma] : gg.params)
        params.push_back(json{{"psi", psi_gi}, {"sigma", sigma}});
    json rho_table = json::object();
    for (const auto& nu : primitive_characters(order)) {
        PairMZ z(order, nu);
        json row = json::array();
        for (const auto& [psi_gi, sigma] : gg.params)
            row.push_back(to_json(
                gamma_module_scalar(z, kappa, CyclicHom(order, fiber_n, psi_gi), sigma, A)));
        rho_table[json(to_json(nu)).dump()] = row;
    }
    emit(json{{"order", gg.elements.size()},
              {"identity", gg.identity_index},
              {"params", params},
              {"table", gg.table},
              {"rho", rho_table}});
    return 0;
}

int cmd_pperm(long p, long bound) {
    if (p < 2) fail_input("pperm needs a prime --p");
    for (const auto& z : p_perm_factors(p, bound)) emit(json{{"m", z.m}, {"zeta", to_json(z)}});
    return 0;
}

int cmd_verify(long cap, long seed) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    auto within_cap = [&](long n, long m, long level) { return n * m * level <= 4096; };
    long bound = std::min<long>(cap, 8);

    // suite 1: Mackey product against the orbit-counting oracle
    for (long N : {2L, 4L}) {
        FiberSpec A = FiberSpec::finite(N);
        std::vector<std::tuple<long, long, long>> shapes;
        for (long n = 1; n <= bound; ++n)
            for (long m = 1; m <= bound; ++m)
                for (long l = 1; l <= bound; ++l)
                    if (within_cap(n, m, N) && within_cap(m, l, N)) shapes.emplace_back(n, m, l);
        std::shuffle(shapes.begin(), shapes.end(), rng);
        for (auto [n, m, l] : shapes)
            for (const auto& u : oracle::all_transitive_pairs(n, m, A))
                for (const auto& v : oracle::all_transitive_pairs(m, l, A)) {
                    auto fast = mackey_product(BisetElement::transitive(u),
                                               BisetElement::transitive(v));
                    if (!(fast == oracle::enumerate_tensor_product(u, v)))
                        fail_verify("mackey_vs_oracle",
                                    json{{"left", to_json(u)}, {"right", to_json(v)}});
                }
    }
    emit(json{{"suite", "mackey_vs_oracle"}, {"status", "pass"}});

    // suite 2: reducedness criterion against exhaustive search
    for (long n = 1; n <= bound; ++n)
        for (long N : {2L, 4L}) {
            FiberSpec A = FiberSpec::finite(N);
            for (const auto& K : subgroups(CyclicGroup(n)))
                for (const auto& kappa : hom_set(K.order(), A)) {
                    auto e = basic_e(K, kappa, A).terms().begin()->first;
                    if (oracle::exhaustive_reducedness(e, A, bound) != is_reduced(K, kappa, A))
                        fail_verify("reducedness", to_json(e));
                }
        }
    emit(json{{"suite", "reducedness"}, {"status", "pass"}});

    // suite 3: generic action against the bimodule trace
    long act_bound = std::min<long>(bound, 6);
    for (long N : {2L, 4L}) {
        FiberSpec A = FiberSpec::finite(N);
        for (long n = 1; n <= act_bound; ++n)
            for (long m = 1; m <= act_bound; ++m)
                for (const auto& u : oracle::all_transitive_pairs(n, m, A))
                    for (long j = 0; j < m; ++j) {
                        auto chi = VirtualCharacter::irreducible(m, j);
                        if (!(act_generic(BisetElement::transitive(u), chi) ==
                              oracle::bimodule_action_trace(u, chi)))
                            fail_verify("act_vs_trace",
                                        json{{"pair", to_json(u)}, {"chi", j}});
                    }
    }
    emit(json{{"suite", "act_vs_trace"}, {"status", "pass"}});

    emit(json{{"status", "pass"}, {"cap", cap}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact fibered biset calculus over cyclic groups"};
    app.require_subcommand(1);
    app.add_flag("--pretty", pretty, "indent JSON output");

    long fiber_n = 0, bound = 8, cap = 6, seed = 0;
    long g_order = 8, g_korder = 4, g_kappa = 1;
    long pp = 2;
    std::string pi;

    auto* product = app.add_subcommand("product", "Mackey product of two elements from stdin");
    auto* factor = app.add_subcommand("factor", "factor a transitive pair from stdin");
    auto* act = app.add_subcommand("act", "apply an element to a character, both from stdin");
    auto* lin = app.add_subcommand("linearize", "linearization of an element from stdin");
    auto* classes = app.add_subcommand("classes", "equivalence classes of primitive pairs");
    auto* summands = app.add_subcommand("summands", "summand descriptors up to the bound");
    auto* gamma = app.add_subcommand("gamma", "stabilizer group table and module scalars");
    auto* pperm = app.add_subcommand("pperm", "p-permutation factor list");
    auto* verify = app.add_subcommand("verify", "run the oracle cross checks");

    for (auto* c : {classes, summands}) {
        c->add_option("--fiber", fiber_n, "finite fiber order N");
        c->add_option("--pi", pi, "comma separated prime set");
        c->add_option("--bound", bound, "modulus bound");
    }
    gamma->add_option("--order", g_order, "group order");
    gamma->add_option("--k-order", g_korder, "subgroup order");
    gamma->add_option("--kappa", g_kappa, "generator image of kappa");
    gamma->add_option("--fiber", fiber_n, "finite fiber order N");
    pperm->add_option("--p", pp, "the prime p");
    pperm->add_option("--bound", bound, "modulus bound");
    verify->add_option("--cap", cap, "order cap for the oracle sweeps");
    verify->add_option("--seed", seed, "shuffle seed for case order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit(json{{"error", e.what()}});
        return 1;
    }

    try {
        if (product->parsed()) return cmd_product();
        if (factor->parsed()) return cmd_factor();
        if (act->parsed()) return cmd_act();
        if (lin->parsed()) return cmd_linearize();
        if (classes->parsed()) return cmd_classes(fiber_n, pi, bound, false);
        if (summands->parsed()) return cmd_classes(fiber_n, pi, bound, true);
        if (gamma->parsed()) return cmd_gamma(g_order, g_korder, g_kappa, fiber_n);
        if (pperm->parsed()) return cmd_pperm(pp, bound);
        if (verify->parsed()) return cmd_verify(cap, seed);
    } catch (const json::exception& e) {
        fail_input(std::string("bad JSON input: ") + e.what());
    } catch (const std::invalid_argument& e) {
        fail_input(e.what());
    } catch (const std::exception& e) {
        fail_input(e.what());
    }
    return 0;
}
