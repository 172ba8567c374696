#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "takagi/signs.hpp"

using namespace takagi;

TEST_CASE("named provider values") {
    AllPlusProvider ap;
    CHECK(ap.sign(5, 17) == 1);
    RademacherProvider gray;
    CHECK(gray.sign(3, 5) == -1);  // (-1)^5
    RademacherProductProvider t3;
    CHECK(t3.sign(2, 1) == -1);
    AlternatingProvider alt;
    CHECK(alt.sign(3, 0) == -1);
    CHECK(alt.sign(2, 3) == 1);
}

TEST_CASE("sign index out of range is a domain error") {
    AllPlusProvider ap;
    CHECK_THROWS_AS(ap.sign(3, 8), std::domain_error);
    CHECK_NOTHROW(ap.sign(3, 7));
}

TEST_CASE("rademacher product agrees with explicit floor products") {
    RademacherProductProvider t3;
    for (unsigned n = 0; n <= 12; ++n) {
        for (uint64_t j = 0; j < (uint64_t{1} << n); ++j) {
            int prod = 1;
            for (unsigned k = 1; k <= n; ++k) prod *= oracles::rademacher_floor(k, n, j);
            REQUIRE(t3.sign(n, j) == prod);
        }
    }
}

TEST_CASE("providers are deterministic across repeated queries") {
    std::vector<ProviderPtr> providers = {
        std::make_shared<AllPlusProvider>(),
        std::make_shared<AlternatingProvider>(),
        std::make_shared<RademacherProvider>(),
        std::make_shared<RademacherProductProvider>(),
        std::make_shared<ConstantLevelsProvider>(std::vector<Sign>{1, -1, -1, 1}),
        std::make_shared<SeededModel1Provider>(99, Rational(3, 5)),
        std::make_shared<SeededModel2Provider>(99, Rational(3, 5)),
    };
    for (const auto& p : providers) {
        for (unsigned n = 0; n <= 20; ++n) {
            uint64_t cells = uint64_t{1} << n;
            for (uint64_t j = 0; j < cells; ++j)
                REQUIRE(p->sign(n, j) == p->sign(n, j));
        }
    }
}

TEST_CASE("model 1 ignores the cell index") {
    SeededModel1Provider m1(1234, Rational(1, 2));
    for (unsigned n = 0; n < 30; ++n) {
        Sign s = m1.sign(n, 0);
        for (uint64_t j = 1; j < std::min<uint64_t>(64, uint64_t{1} << n); ++j)
            REQUIRE(m1.sign(n, j) == s);
    }
}

TEST_CASE("model 2 signs pass a pairwise chi-square test") {
    SeededModel2Provider m2(424242, Rational(1, 2));
    // 2x2 contingency over adjacent-cell sign pairs at a deep level.
    uint64_t counts[2][2] = {{0, 0}, {0, 0}};
    const unsigned n = 20;
    const uint64_t pairs = 120000;
    for (uint64_t i = 0; i < pairs; ++i) {
        int a = m2.sign(n, 2 * i) > 0 ? 1 : 0;
        int b = m2.sign(n, 2 * i + 1) > 0 ? 1 : 0;
        ++counts[a][b];
    }
    double row[2] = {double(counts[0][0] + counts[0][1]), double(counts[1][0] + counts[1][1])};
    double col[2] = {double(counts[0][0] + counts[1][0]), double(counts[0][1] + counts[1][1])};
    double chi2 = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double expect = row[a] * col[b] / double(pairs);
            double diff = double(counts[a][b]) - expect;
            chi2 += diff * diff / expect;
        }
    CHECK(chi2 < 10.828);  // chi-square_1 quantile at p-value 1e-3
}

TEST_CASE("model 2 empirical frequency matches a biased p") {
    Rational p(3, 4);
    SeededModel2Provider m2(7, p);
    uint64_t plus = 0;
    const uint64_t trials = 200000;
    for (uint64_t j = 0; j < trials; ++j)
        if (m2.sign(24, j) > 0) ++plus;
    double freq = double(plus) / double(trials);
    CHECK(freq == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("explicit tree stores finite depth and defaults below") {
    ExplicitTreeProvider tree(3, 1);
    tree.set(2, 1, -1);
    tree.set(0, 0, -1);
    CHECK(tree.sign(0, 0) == -1);
    CHECK(tree.sign(2, 1) == -1);
    CHECK(tree.sign(2, 2) == 1);
    CHECK(tree.sign(9, 100) == 1);  // below stored depth: default
    CHECK_THROWS_AS(tree.set(3, 0, 1), std::domain_error);
}

TEST_CASE("provider serialization round-trips") {
    std::vector<ProviderPtr> providers = {
        std::make_shared<AllPlusProvider>(),
        std::make_shared<AlternatingProvider>(),
        std::make_shared<RademacherProvider>(),
        std::make_shared<ConstantLevelsProvider>(std::vector<Sign>{1, -1, 1}, -1),
        std::make_shared<SeededModel2Provider>(5150, Rational(2, 3)),
        std::make_shared<LineLiftProvider>(std::make_shared<RademacherProvider>(), 2, -1),
    };
    auto tree = std::make_shared<ExplicitTreeProvider>(4, 1);
    tree->set(3, 5, -1);
    tree->set(1, 0, -1);
    providers.push_back(tree);
    for (const auto& p : providers) {
        ProviderPtr q = parse_provider(p->serialize());
        CHECK(q->serialize() == p->serialize());
        for (unsigned n = 0; n <= 8; ++n)
            for (uint64_t j = 0; j < (uint64_t{1} << n); j += (n < 4 ? 1 : 5))
                REQUIRE(q->sign(n, j) == p->sign(n, j));
    }
}

TEST_CASE("line lift reads inner signs shifted and reduced mod 2^n") {
    auto lift = LineLiftProvider(std::make_shared<RademacherProvider>(), 1, -1);
    CHECK(lift.sign(0, 0) == -1);             // prefix level
    CHECK(lift.sign(1, 0) == 1);              // inner level 0 (all cells)
    CHECK(lift.sign(1, 1) == 1);
    CHECK(lift.sign(3, 5) == -1);             // inner (2, 5 mod 4 = 1) -> -1
    CHECK(lift.sign(3, 4) == 1);              // inner (2, 0) -> +1
}
