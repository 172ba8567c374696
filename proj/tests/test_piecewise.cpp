#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "takagi/piecewise.hpp"

using namespace takagi;

TEST_CASE("refine: single tent from the root") {
    AllPlusProvider ap;
    GridFunction g0 = GridFunction::root();
    CHECK(g0.values() == std::vector<int32_t>{0, 0});
    GridFunction g1 = GridFunction::refine(g0, ap);
    CHECK(g1.values() == std::vector<int32_t>{0, 1, 0});
    GridFunction g2 = GridFunction::refine(g1, ap);
    CHECK(g2.values() == std::vector<int32_t>{0, 2, 2, 2, 0});
    CHECK(g2.slope(0) == 2);
    CHECK(g2.slope(1) == 0);
    CHECK(g2.slope(3) == -2);
}

TEST_CASE("refine: gray takagi second stage") {
    RademacherProvider gray;
    GridFunction g2 = GridFunction::build(gray, 2);
    CHECK(g2.values() == std::vector<int32_t>{0, 2, 2, 0, 0});
}

TEST_CASE("build matches direct series summation for random providers") {
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        ProviderPtr p;
        if (seed % 3 == 0) p = std::make_shared<SeededModel1Provider>(seed, Rational(2, 5));
        else p = std::make_shared<SeededModel2Provider>(seed, Rational(1, 2));
        unsigned depth = 4 + seed % 7;
        GridFunction gf = GridFunction::build(*p, depth);
        for (uint64_t j = 0; j <= gf.cell_count(); ++j)
            REQUIRE(gf.value(j) == oracles::direct_partial_sum(*p, depth, j));
    }
}

TEST_CASE("grid invariants hold under refinement") {
    SeededModel2Provider p(31415, Rational(1, 2));
    GridFunction gf = GridFunction::root();
    for (unsigned n = 1; n <= 20; ++n) {
        gf = GridFunction::refine(gf, p);
        REQUIRE(gf.value(0) == 0);
        REQUIRE(gf.value(gf.cell_count()) == 0);
        for (uint64_t j = 0; j < gf.cell_count(); ++j) {
            int32_t s = gf.slope(j);
            REQUIRE(std::abs(s) <= static_cast<int32_t>(n));
            REQUIRE((s - static_cast<int32_t>(n)) % 2 == 0);
            if (n % 2 == 0) REQUIRE(gf.value(j) % 2 == 0);
        }
    }
}

TEST_CASE("gray slope laws: s_{n,0} = n and the mod-4 congruence") {
    RademacherProvider gray;
    GridFunction gf = GridFunction::root();
    for (unsigned n = 1; n <= 16; ++n) {
        gf = GridFunction::refine(gf, gray);
        REQUIRE(gf.slope(0) == static_cast<int32_t>(n));
        for (uint64_t j = 0; j < gf.cell_count(); ++j) {
            int64_t want = (static_cast<int64_t>(n) + 2 * static_cast<int64_t>(j)) % 4;
            int64_t got = ((gf.slope(j) % 4) + 4) % 4;
            REQUIRE(got == want);
            if (j > 0) REQUIRE(std::abs(gf.slope(j) - gf.slope(j - 1)) == 2);
        }
    }
}

TEST_CASE("gray functional equation residual |f_m(x) - (x + f_m(2x)/2)| <= 3*2^-m") {
    RademacherProvider gray;
    for (unsigned m = 2; m <= 14; m += 3) {
        GridFunction gf = GridFunction::build(gray, m);
        uint64_t half = gf.cell_count() / 2;
        for (uint64_t j = 0; j <= half; ++j) {
            // scaled by 2^(m+1): f_m(x) -> 2 v[j], x -> 2 j, f_m(2x)/2 -> v[2j]
            int64_t resid = 2 * static_cast<int64_t>(gf.value(j)) -
                            (2 * static_cast<int64_t>(j) + gf.value(2 * j));
            REQUIRE(std::abs(resid) <= 6);
        }
    }
}

TEST_CASE("envelope bounds") {
    AllPlusProvider ap;
    GridFunction g2 = GridFunction::build(ap, 2);
    auto [lo, hi] = g2.envelope(0);
    CHECK(lo == Dyadic(-1, 2));
    CHECK(hi == Dyadic(3, 2));
    GridFunction g0 = GridFunction::root();
    auto [lo0, hi0] = g0.envelope(0);
    CHECK(lo0 == Dyadic(-1, 0));
    CHECK(hi0 == Dyadic(1, 0));
    CHECK_THROWS_AS(g2.envelope(4), std::domain_error);
}

TEST_CASE("envelope width identity |s|*2^-n + 2^(1-n)") {
    SeededModel2Provider p(5, Rational(1, 2));
    GridFunction gf = GridFunction::build(p, 9);
    for (uint64_t j = 0; j < gf.cell_count(); j += 7) {
        auto [lo, hi] = gf.envelope(j);
        Dyadic width = hi - lo;
        Dyadic expect = Dyadic(std::abs(gf.slope(j)) + 2, gf.depth());
        REQUIRE(width == expect);
    }
}

TEST_CASE("eval enclosure at dyadic points") {
    AllPlusProvider ap;
    auto [lo, hi] = eval_enclosure(ap, Dyadic(1, 1), 1);
    CHECK(lo == Dyadic(0, 0));
    CHECK(hi == Dyadic(1, 0));
    auto [lo10, hi10] = eval_enclosure(ap, Dyadic(1, 1), 10);
    CHECK(lo10 <= Dyadic(1, 1));
    CHECK(Dyadic(1, 1) <= hi10);
    // f(0) = 0 for every member of the class
    SeededModel2Provider p(9, Rational(1, 2));
    auto [zlo, zhi] = eval_enclosure(p, Dyadic(0, 0), 8);
    CHECK(zlo == Dyadic(-1, 8));
    CHECK(zhi == Dyadic(1, 8));
    CHECK_THROWS_AS(eval_enclosure(ap, Dyadic(3, 1), 4), std::domain_error);
}

TEST_CASE("partial sums stabilize at dyadic points") {
    RademacherProvider gray;
    Dyadic x(11, 5);  // 11/32
    Dyadic v5 = eval_partial_sum(gray, x, 5);
    for (unsigned m : {6u, 9u, 20u}) CHECK(eval_partial_sum(gray, x, m) == v5);
}

TEST_CASE("gray enclosure near the zero 11/15") {
    // Oracle: sum the defining series at the rational point 11/15 directly;
    // forty exact terms leave at most the 2^-40 tail.
    Rational x_star(11, 15);
    Rational f40(0);
    for (unsigned k = 0; k < 40; ++k) {
        BigInt num = BigInt(11).shifted_left(k);  // 2^k * 11, over denominator 15
        BigInt q, r;
        divmod(num, BigInt(15), q, r);
        Rational phi(std::min(r, BigInt(15) - r), BigInt(15));
        Rational term = phi / Rational(BigInt::pow2(k));
        f40 += q.is_even() ? term : -term;  // r_k(x) = (-1)^floor(2^k x)
    }
    CHECK(abs(f40) < Rational(1, BigInt::pow2(38)));  // f(11/15) = 0

    // round(11 * 2^14 / 15) = 12015, which is exactly the zero
    // x_4 = 1 - 1/4 - 1/64 - 1/1024 - 1/16384 of the Gray Takagi function.
    RademacherProvider gray;
    CHECK((Rational(11, 15) * Rational(16384) - Rational(12015)).to_double() ==
          doctest::Approx(-0.0667).epsilon(0.01));
    auto [lo, hi] = eval_enclosure(gray, Dyadic(12015, 14), 14);
    Dyadic slack(4, 14);
    CHECK(lo <= slack);
    CHECK(-slack <= hi);
}

TEST_CASE("dense refinement past the cap throws") {
    AllPlusProvider ap;
    GridFunction gf = GridFunction::build(ap, 10);
    CHECK(gf.depth() == 10);
    CHECK_THROWS_AS(GridFunction::build(ap, kMaxDenseDepth + 1), std::domain_error);
}
