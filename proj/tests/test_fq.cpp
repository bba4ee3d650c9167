#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drinfeld/fq.hpp"

using namespace drinfeld;

TEST_CASE("prime field arithmetic mod 3") {
    const FqContext& F = FqContext::get(3, 1);
    CHECK(F.mul(Fq(2), Fq(2)) == Fq(1));
    CHECK(F.add(Fq(2), Fq(2)) == Fq(1));
    CHECK(F.inv(Fq(2)) == Fq(2));
    CHECK_THROWS_AS(F.inv(Fq(0)), domain_error);
}

TEST_CASE("F4 is F2[w]/(w^2+w+1) with the deterministic modulus") {
    const FqContext& F = FqContext::get(2, 2);
    REQUIRE(F.q() == 4);
    CHECK(F.modulus() == std::vector<std::uint32_t>{1, 1});
    // w * (w+1) = 1
    Fq w = F.from_coords({0, 1});
    Fq w1 = F.from_coords({1, 1});
    CHECK(F.mul(w, w1) == F.one());
    // w^4 = w
    CHECK(F.pow(w, 4) == w);
}

TEST_CASE("deterministic least moduli for small fields") {
    CHECK(FqContext::get(2, 3).modulus() == std::vector<std::uint32_t>{1, 1, 0}); // x^3+x+1
    CHECK(FqContext::get(3, 2).modulus() == std::vector<std::uint32_t>{1, 0});    // x^2+1
}

TEST_CASE("frobenius fixes the prime field and is a bijection") {
    for (auto [p, s] : {std::pair{2u, 1u}, {3u, 1u}, {2u, 2u}, {3u, 2u}, {2u, 3u}}) {
        const FqContext& F = FqContext::get(p, s);
        for (std::uint32_t a = 0; a < p; ++a) CHECK(F.frobenius(Fq(a)) == Fq(a));
        std::vector<bool> hit(F.q(), false);
        for (std::uint32_t a = 0; a < F.q(); ++a) {
            Fq img = F.frobenius(Fq(a));
            CHECK(!hit[img.value()]);
            hit[img.value()] = true;
        }
        // x^q = x for all x
        for (std::uint32_t a = 0; a < F.q(); ++a) CHECK(F.frobenius_iter(Fq(a), s) == Fq(a));
    }
}

TEST_CASE("field axioms on random triples") {
    std::mt19937_64 rng(12345);
    for (auto [p, s] : {std::pair{3u, 1u}, {2u, 2u}, {3u, 2u}}) {
        const FqContext& F = FqContext::get(p, s);
        for (int i = 0; i < 200; ++i) {
            Fq a(static_cast<std::uint32_t>(rng() % F.q()));
            Fq b(static_cast<std::uint32_t>(rng() % F.q()));
            Fq c(static_cast<std::uint32_t>(rng() % F.q()));
            CHECK(F.add(F.add(a, b), c) == F.add(a, F.add(b, c)));
            CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
            CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
            if (!a.is_zero()) CHECK(F.mul(a, F.inv(a)) == F.one());
            // frobenius is a ring homomorphism
            CHECK(F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b)));
            CHECK(F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b)));
        }
    }
}

TEST_CASE("out-of-range values are a usage error") {
    const FqContext& F = FqContext::get(3, 1);
    CHECK_THROWS_AS(F.from_value(3), usage_error);
    CHECK_THROWS_AS(F.mul(Fq(5), Fq(1)), usage_error);
}

TEST_CASE("pow handles negative exponents and errors on 0^neg") {
    const FqContext& F = FqContext::get(3, 1);
    CHECK(F.pow(Fq(2), -1) == Fq(2));
    CHECK(F.pow(Fq(0), 0) == Fq(1));
    CHECK_THROWS_AS(F.pow(Fq(0), -2), domain_error);
}
