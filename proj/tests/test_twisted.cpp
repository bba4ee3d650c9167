#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drinfeld/twisted.hpp"

using namespace drinfeld;

namespace {

TwistedSeries random_twisted(const TowerPtr& F, std::mt19937_64& rng, std::int64_t deg,
                             std::int64_t coeff_val = 0) {
    const FqContext& R = F->residue_ctx();
    std::vector<FieldElement> c;
    for (std::int64_t i = 0; i <= deg; ++i) {
        std::vector<Fq> s;
        for (std::int64_t e = coeff_val; e < coeff_val + 8; ++e)
            s.push_back(Fq(static_cast<std::uint32_t>(rng() % R.q())));
        c.push_back(F->from_series(PrecSeries::from_coeffs(R, coeff_val, std::move(s), F->prec())));
    }
    return TwistedSeries(F, std::move(c));
}

FieldElement random_small(const TowerPtr& F, std::mt19937_64& rng, std::int64_t val) {
    const FqContext& R = F->residue_ctx();
    std::vector<Fq> s;
    for (std::int64_t e = val; e < F->prec(); ++e)
        s.push_back(Fq(static_cast<std::uint32_t>(rng() % R.q())));
    if (!s.empty() && s[0].is_zero()) s[0] = R.one();
    return F->from_series(PrecSeries::from_coeffs(R, val, std::move(s), F->prec()));
}

TwistedSeries carlitz_rho_t(const TowerPtr& K) {
    return TwistedSeries(K, {K->uniformizer(), K->one()});
}

} // namespace

TEST_CASE("skew square of t + tau") {
    for (std::uint32_t p : {2u, 3u}) {
        TowerPtr K = TowerField::make_base(p, 1, 20);
        const FqContext& R = K->residue_ctx();
        TwistedSeries f = carlitz_rho_t(K);
        TwistedSeries sq = tw_mul(f, f);
        // t^2 + (t + t^q) tau + tau^2
        REQUIRE(sq.tau_degree() == 2);
        FieldElement t = K->uniformizer();
        CHECK((sq.coeff(0) - t * t).is_zero_to_prec());
        FieldElement tq = K->from_series(PrecSeries::monomial(R, R.one(), R.q()));
        CHECK((sq.coeff(1) - (t + tq)).is_zero_to_prec());
        CHECK((sq.coeff(2) - K->one()).is_zero_to_prec());
    }
}

TEST_CASE("tau commutes with F_q constants and 1 is neutral") {
    TowerPtr K = TowerField::make_base(3, 1, 12);
    TwistedSeries tau = TwistedSeries::tau_power(K, 1);
    for (std::uint32_t a = 0; a < 3; ++a) {
        TwistedSeries c = TwistedSeries::constant(K->from_constant(Fq(a)));
        TwistedSeries lhs = tw_mul(tau, c);
        TwistedSeries rhs = tw_mul(c, tau);
        CHECK(tw_zero_to_prec(tw_sub(lhs, rhs)));
    }
    std::mt19937_64 rng(5);
    TwistedSeries f = random_twisted(K, rng, 3);
    TwistedSeries prod = tw_mul(f, TwistedSeries::one(K));
    CHECK(tw_zero_to_prec(tw_sub(prod, f)));
}

TEST_CASE("associativity and distributivity on random triples") {
    std::mt19937_64 rng(17);
    for (std::uint32_t p : {2u, 3u}) {
        TowerPtr K = TowerField::make_base(p, 1, 16);
        for (int i = 0; i < 8; ++i) {
            TwistedSeries a = random_twisted(K, rng, 2);
            TwistedSeries b = random_twisted(K, rng, 2);
            TwistedSeries c = random_twisted(K, rng, 2);
            auto eqz = [](const TwistedSeries& x) { return tw_zero_to_prec(x); };
            CHECK(eqz(tw_sub(tw_mul(tw_mul(a, b), c), tw_mul(a, tw_mul(b, c)))));
            CHECK(eqz(tw_sub(tw_mul(a, tw_add(b, c)), tw_add(tw_mul(a, b), tw_mul(a, c)))));
            CHECK(eqz(tw_sub(tw_mul(tw_add(a, b), c), tw_add(tw_mul(a, c), tw_mul(b, c)))));
        }
    }
}

TEST_CASE("evaluation: Carlitz action, additivity, composition") {
    TowerPtr K = TowerField::make_base(3, 1, 20);
    TwistedSeries rho_t = carlitz_rho_t(K);
    std::mt19937_64 rng(23);
    FieldElement x = random_small(K, rng, 1);
    // rho_t(x) = t x + x^q
    FieldElement direct = K->uniformizer() * x + x.frobenius_q();
    CHECK((tw_evaluate(rho_t, x) - direct).is_zero_to_prec());
    // additive at 0
    CHECK(tw_evaluate(rho_t, K->zero()).is_zero_to_prec());
    // additivity
    FieldElement y = random_small(K, rng, 1);
    CHECK((tw_evaluate(rho_t, x + y) - tw_evaluate(rho_t, x) - tw_evaluate(rho_t, y))
              .is_zero_to_prec());
    // action homomorphism: (f g)(x) = f(g(x))
    for (int i = 0; i < 6; ++i) {
        TwistedSeries f = random_twisted(K, rng, 2);
        TwistedSeries g = random_twisted(K, rng, 2);
        FieldElement z = random_small(K, rng, 1);
        CHECK((tw_evaluate(tw_mul(f, g), z) - tw_evaluate(f, tw_evaluate(g, z)))
                  .is_zero_to_prec());
    }
}

TEST_CASE("evaluation preconditions") {
    TowerPtr K = TowerField::make_base(3, 1, 12);
    std::mt19937_64 rng(3);
    // truncated integral series refuses a unit argument
    TwistedSeries f = random_twisted(K, rng, 2).truncated(2);
    CHECK_THROWS_AS(tw_evaluate(f, K->one()), domain_error);
    // exact polynomial is fine anywhere
    TwistedSeries g = carlitz_rho_t(K);
    CHECK_NOTHROW(tw_evaluate(g, K->one()));
}

TEST_CASE("inversion") {
    TowerPtr K = TowerField::make_base(3, 1, 24);
    // invert(1) = 1
    TwistedSeries one = TwistedSeries::one(K);
    CHECK(tw_zero_to_prec(tw_sub(tw_invert(one, 5), one)));
    // constant inverse
    TwistedSeries c = TwistedSeries::constant(K->from_int(2));
    CHECK((tw_invert(c, 3).coeff(0) - K->from_int(2)).is_zero_to_prec());
    // f = 1 + t tau round trip both sides
    TwistedSeries f(K, {K->one(), K->uniformizer()});
    TwistedSeries fi = tw_invert(f, 6);
    TwistedSeries lhs = tw_mul(f, fi);
    TwistedSeries rhs = tw_mul(fi, f);
    for (std::int64_t k = 0; k <= 6; ++k) {
        CHECK((lhs.coeff(k) - (k == 0 ? K->one() : K->zero())).is_zero_to_prec());
        CHECK((rhs.coeff(k) - (k == 0 ? K->one() : K->zero())).is_zero_to_prec());
    }
    // non-unit constant coefficient is rejected
    TwistedSeries bad(K, {K->uniformizer(), K->one()});
    CHECK_THROWS_AS(tw_invert(bad, 4), domain_error);
}

TEST_CASE("left division") {
    TowerPtr K = TowerField::make_base(3, 1, 40);
    TwistedSeries g = carlitz_rho_t(K); // plays rho_eta with eta = t
    // P = g -> r = 1
    TwistedSeries r = tw_left_divide(g, g, 3);
    CHECK((r.coeff(0) - K->one()).is_zero_to_prec());
    for (std::int64_t k = 1; k <= 3; ++k) CHECK(r.coeff(k).is_zero_to_prec());
    // round trip h -> (h g) / g on random integral h
    std::mt19937_64 rng(29);
    for (int i = 0; i < 6; ++i) {
        TwistedSeries h = random_twisted(K, rng, 2);
        TwistedSeries hg = tw_mul(h, g);
        TwistedSeries h2 = tw_left_divide(hg, g, 2);
        for (std::int64_t k = 0; k <= 2; ++k)
            CHECK((h2.coeff(k) - h.coeff(k)).is_zero_to_prec());
    }
    // P with the wrong constant-term valuation is not in the left ideal
    TwistedSeries bad(K, {K->one(), K->one()});
    CHECK_THROWS_AS(tw_left_divide(bad, g, 2), domain_error);
}

TEST_CASE("reduction mod p") {
    TowerPtr K = TowerField::make_base(3, 1, 12);
    TwistedSeries rho_t = carlitz_rho_t(K);
    // Carlitz rho_t reduces to tau
    auto red = tw_reduce_mod_p(rho_t);
    REQUIRE(red.size() == 2);
    CHECK(red[0].is_zero());
    CHECK(red[1] == K->residue_ctx().one());
    // rho_{t^2} reduces to tau^2
    auto red2 = tw_reduce_mod_p(tw_mul(rho_t, rho_t));
    REQUIRE(red2.size() == 3);
    CHECK(red2[0].is_zero());
    CHECK(red2[1].is_zero());
    CHECK(red2[2] == K->residue_ctx().one());
    // constants reduce to constants
    auto redc = tw_reduce_mod_p(TwistedSeries::constant(K->from_int(2)));
    REQUIRE(redc.size() == 1);
    CHECK(redc[0] == K->residue_ctx().from_int(2));
    // non-integral input rejected
    TwistedSeries bad(K, {K->uniformizer().inverse()});
    CHECK_THROWS_AS(tw_reduce_mod_p(bad), domain_error);
}

TEST_CASE("integral and logarithm-type flags") {
    TowerPtr K = TowerField::make_base(3, 1, 12);
    TwistedSeries f = carlitz_rho_t(K);
    CHECK(f.is_integral());
    CHECK(f.is_log_type());
    FieldElement tinv = K->uniformizer().inverse();
    TwistedSeries lam(K, {K->one(), tinv});
    CHECK(!lam.is_integral());
    CHECK(lam.is_log_type());
    TwistedSeries bad(K, {tinv});
    CHECK(!bad.is_log_type());
}
