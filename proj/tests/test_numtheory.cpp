#include <catch2/catch_amalgamated.hpp>
#include <fbc/numtheory.hpp>

using namespace fbc;

TEST_CASE("divisors") {
    CHECK(divisors(1) == std::vector<long>{1});
    CHECK(divisors(12) == std::vector<long>{1, 2, 3, 4, 6, 12});
    CHECK(divisors(16) == std::vector<long>{1, 2, 4, 8, 16});
    CHECK(divisors(7) == std::vector<long>{1, 7});
}

TEST_CASE("factorize and prime powers") {
    CHECK(factorize(1).empty());
    CHECK(factorize(360) == std::vector<std::pair<long, int>>{{2, 3}, {3, 2}, {5, 1}});
    CHECK(prime_power_factors(1).empty());
    CHECK(prime_power_factors(12) == std::vector<long>{4, 3});
    CHECK(prime_power_factors(30) == std::vector<long>{2, 3, 5});
    // product of factors = n
    for (long n = 1; n <= 200; ++n) {
        long prod = 1;
        for (long q : prime_power_factors(n)) prod *= q;
        CHECK(prod == n);
    }
}

TEST_CASE("p_part and pi_part") {
    CHECK(p_part(48, 2) == 16);
    CHECK(p_part(48, 3) == 3);
    CHECK(p_part(48, 5) == 1);
    CHECK(pi_part(360, {2, 3}) == 72);
    CHECK(pi_part(360, {}) == 1);
    CHECK(pi_part(7, {7}) == 7);
}

TEST_CASE("euler_phi") {
    long known[][2] = {{1, 1}, {2, 1}, {4, 2}, {8, 4}, {9, 6}, {12, 4}, {16, 8}, {24, 8}};
    for (auto [n, v] : known) CHECK(euler_phi(n) == v);
    // multiplicativity on coprime pairs
    CHECK(euler_phi(8 * 9) == euler_phi(8) * euler_phi(9));
}

TEST_CASE("mobius") {
    CHECK(mobius(1) == 1);
    CHECK(mobius(2) == -1);
    CHECK(mobius(6) == 1);
    CHECK(mobius(4) == 0);
    CHECK(mobius(30) == -1);
    // sum over divisors of n of mu(d) = [n == 1]
    for (long n = 1; n <= 100; ++n) {
        int s = 0;
        for (long d : divisors(n)) s += mobius(d);
        CHECK(s == (n == 1 ? 1 : 0));
    }
}

TEST_CASE("mod_norm") {
    CHECK(mod_norm(-1, 8) == 7);
    CHECK(mod_norm(8, 8) == 0);
    CHECK(mod_norm(17, 5) == 2);
}

TEST_CASE("ext_gcd and inv_mod") {
    for (long a = 1; a <= 50; ++a)
        for (long b = 1; b <= 50; ++b) {
            long x, y;
            long g = ext_gcd(a, b, x, y);
            CHECK(g == std::gcd(a, b));
            CHECK(a * x + b * y == g);
        }
    CHECK(inv_mod(3, 8) == 3);
    CHECK(inv_mod(5, 12) == 5);
    CHECK(inv_mod(7, 16) == 7);
    CHECK_THROWS_AS(inv_mod(4, 8), std::invalid_argument);
    for (long m = 2; m <= 30; ++m)
        for (long a : units_mod(m)) CHECK(mod_norm(a * inv_mod(a, m), m) == 1 % m);
}

TEST_CASE("units_mod") {
    CHECK(units_mod(1) == std::vector<long>{0});
    CHECK(units_mod(8) == std::vector<long>{1, 3, 5, 7});
    for (long m = 1; m <= 40; ++m) CHECK(static_cast<long>(units_mod(m).size()) == euler_phi(m));
}

TEST_CASE("primitive_root") {
    CHECK(primitive_root(3) == 2);
    CHECK(primitive_root(9) == 2);
    CHECK(primitive_root(5) == 2);
    CHECK(primitive_root(7) == 3);
    CHECK(primitive_root(25) == 2);
    // the returned element really has order phi(q)
    for (long q : {3L, 5L, 7L, 9L, 11L, 13L, 25L, 27L, 49L}) {
        long g = primitive_root(q), phi = euler_phi(q);
        long r = 1;
        for (long i = 1; i < phi; ++i) {
            r = r * g % q;
            CHECK(r != 1);
        }
        CHECK(r * g % q == 1);
    }
}

TEST_CASE("crt") {
    CHECK(crt(1, 4, 0, 3) == 9);
    CHECK(crt(0, 4, 1, 3) == 4);
    for (long a = 0; a < 8; ++a)
        for (long b = 0; b < 9; ++b) {
            long x = crt(a, 8, b, 9);
            CHECK(x % 8 == a);
            CHECK(x % 9 == b);
        }
}

TEST_CASE("big integers stay exact") {
    Integer x = 1;
    for (int i = 0; i < 40; ++i) x *= 10;
    Rational r = Rational(x, 3);
    CHECK(r * 3 == x);
}
