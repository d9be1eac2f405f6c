#include "lifespan/exponents.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace lifespan;

namespace {

SystemParams make(int n, std::vector<Rational> p) {
    SystemParams sp;
    sp.k = static_cast<int>(p.size());
    sp.p = std::move(p);
    sp.n = n;
    return sp;
}

}  // namespace

TEST_CASE("alpha closed form: scalar Fujita case") {
    const auto profile = compute_alpha(make(1, {Rational(3)}));
    CHECK(profile.alpha[0] == Rational(1, 2));  // 1/(p-1)
    CHECK(profile.alpha_max == Rational(1, 2));
    CHECK(profile.criticality == Criticality::Critical);  // n/2 = 1/2 exactly
}

TEST_CASE("alpha for k=2, p=(2,3) matches the exact linear solve") {
    const auto profile = compute_alpha(make(1, {Rational(2), Rational(3)}));
    CHECK(profile.alpha[0] == Rational(3, 5));
    CHECK(profile.alpha[1] == Rational(4, 5));
    CHECK(profile.alpha_max == Rational(4, 5));
    CHECK(profile.argmax_index == 1);

    const auto oracle = oracles::alpha_by_bareiss({Rational(2), Rational(3)});
    CHECK(oracle[0] == profile.alpha[0]);
    CHECK(oracle[1] == profile.alpha[1]);
}

TEST_CASE("alpha for k=3, p=(2,2,2) is (1,1,1)") {
    const auto profile = compute_alpha(make(1, {Rational(2), Rational(2), Rational(2)}));
    for (const auto& a : profile.alpha) CHECK(a == Rational(1));
    const auto oracle = oracles::alpha_by_bareiss(profile.alpha.size() == 3
                                                      ? std::vector<Rational>{2, 2, 2}
                                                      : std::vector<Rational>{});
    for (int j = 0; j < 3; ++j) CHECK(oracle[j] == Rational(1));
}

TEST_CASE("all p equal to 1 is rejected as singular") {
    CHECK_THROWS_AS(compute_alpha(make(2, {Rational(1), Rational(1)})), SingularSystem);
}

TEST_CASE("P/Q sequences: k=2 and k=3 references") {
    const auto pq2 = compute_pq(make(1, {Rational(2), Rational(2)}));
    CHECK(pq2.P == std::vector<Rational>{Rational(7), Rational(3)});
    CHECK(pq2.Q == std::vector<Rational>{Rational(3), Rational(1)});

    const auto pq3 = compute_pq(make(1, {Rational(2), Rational(2), Rational(2)}));
    CHECK(pq3.P == std::vector<Rational>{Rational(15), Rational(7), Rational(3)});
    CHECK(pq3.Q == std::vector<Rational>{Rational(7), Rational(3), Rational(1)});
    CHECK(pq3.P[0] - pq3.Q[0] == Rational(8));  // product of the p's

    std::vector<Rational> P, Q;
    oracles::pq_by_sums({Rational(2), Rational(2), Rational(2)}, P, Q);
    CHECK(P == pq3.P);
    CHECK(Q == pq3.Q);
}

TEST_CASE("P/Q rejects k=1") {
    CHECK_THROWS_AS(compute_pq(make(1, {Rational(2)})), DomainError);
}

TEST_CASE("p recovery from the P sequence is exact") {
    const auto params = make(1, {Rational(5, 2), Rational(4, 3), Rational(2)});
    const auto pq = compute_pq(params);
    for (int j = 0; j < 3; ++j) CHECK(pq.p_of(j) == params.p[j]);
}

TEST_CASE("blow-up rate identity holds exactly") {
    SUBCASE("k=2, p=(2,3)") {
        const auto ok = blowup_rate_identity(make(1, {Rational(2), Rational(3)}));
        for (bool b : ok) CHECK(b);
    }
    SUBCASE("k=1, p=2: scalar identity p alpha - 1 = alpha") {
        const auto ok = blowup_rate_identity(make(1, {Rational(2)}));
        CHECK(ok[0]);
    }
    SUBCASE("k=3, p=(2,2,2)") {
        const auto ok = blowup_rate_identity(make(1, {Rational(2), Rational(2), Rational(2)}));
        for (bool b : ok) CHECK(b);
    }
}

TEST_CASE("lifespan exponent") {
    SUBCASE("n=1, k=1, p=2: slope -2") {
        const auto profile = compute_alpha(make(1, {Rational(2)}));
        CHECK(lifespan_exponent(profile) == Rational(-2));
    }
    SUBCASE("n=1, k=2, p=(2,3): slope -10/3") {
        const auto profile = compute_alpha(make(1, {Rational(2), Rational(3)}));
        CHECK(lifespan_exponent(profile) == Rational(-10, 3));
    }
    SUBCASE("critical boundary rejected") {
        const auto profile = compute_alpha(make(2, {Rational(2), Rational(2)}));
        CHECK(profile.alpha_max == Rational(1));  // equals n/2
        CHECK_THROWS_AS(lifespan_exponent(profile), NotSupercritical);
    }
}

TEST_CASE("randomized exact identities (k <= 8)") {
    std::mt19937_64 rng(20240811);
    std::uniform_int_distribution<int> kd(2, 8), nd(1, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = kd(rng);
        const auto params = make(nd(rng), oracles::random_p(rng, k));
        const auto profile = compute_alpha(params);
        const auto pq = compute_pq(params);

        const auto oracle = oracles::alpha_by_bareiss(params.p);
        for (int j = 0; j < k; ++j) CHECK(profile.alpha[j] == oracle[j]);

        std::vector<Rational> P, Q;
        oracles::pq_by_sums(params.p, P, Q);
        CHECK(P == pq.P);
        CHECK(Q == pq.Q);
        for (int j = 0; j + 1 < k; ++j) {
            CHECK(pq.P[j] == params.p[j] * pq.P[j + 1] + 1);
            CHECK(pq.Q[j] == params.p[j] * pq.Q[j + 1] + 1);
        }
        Rational prod = 1;
        for (const auto& pj : params.p) prod *= pj;
        CHECK(pq.P[0] - pq.Q[0] == prod);
        const Rational d = pq.P[0] - pq.Q[0] - 1;
        CHECK(profile.alpha[0] == pq.Q[0] / d);
        CHECK(profile.alpha[1] == pq.P[1] / d);

        for (bool ok : blowup_rate_identity(params)) CHECK(ok);
    }
}

TEST_CASE("cyclic relabeling shifts alpha cyclically") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + int(rng() % 5);
        const auto p = oracles::random_p(rng, k);
        const auto base = compute_alpha(make(1, p)).alpha;
        const int s = 1 + int(rng() % (k - 1));
        std::vector<Rational> shifted(k);
        for (int j = 0; j < k; ++j) shifted[j] = p[(j + s) % k];
        const auto moved = compute_alpha(make(1, shifted)).alpha;
        for (int j = 0; j < k; ++j) CHECK(moved[j] == base[(j + s) % k]);
    }
}

TEST_CASE("scalar criticality flips exactly at p = 1 + 2/n") {
    for (int n = 1; n <= 3; ++n) {
        const Rational fujita = 1 + Rational(2, n);
        CHECK(compute_alpha(make(n, {fujita})).criticality == Criticality::Critical);
        CHECK(compute_alpha(make(n, {fujita + Rational(1, 1000)})).criticality ==
              Criticality::Subcritical);
        CHECK(compute_alpha(make(n, {fujita - Rational(1, 1000)})).criticality ==
              Criticality::Supercritical);
    }
}

TEST_CASE("decay vectors: case 2 entries stay below n/2 and satisfy the tail bound") {
    std::mt19937_64 rng(99);
    int found = 0;
    while (found < 25) {
        const int k = 2 + int(rng() % 3);
        const int n = 1 + int(rng() % 3);
        const auto params = make(n, oracles::random_p(rng, k));
        const auto profile = compute_alpha(params);
        if (profile.criticality != Criticality::Supercritical) continue;
        ++found;
        const Rational half_n(n, 2);
        for (int j = 0; j < k; ++j) {
            CHECK(profile.l_case2[j] <= half_n);
            // -l_{j+1} p_j + n/2 > -1
            CHECK(-profile.l_case2[(j + 1) % k] * params.p[j] + half_n > -1);
        }
    }
}

TEST_CASE("case 1 epsilon keeps (1+eps) alpha_max below n/2") {
    const auto params = make(3, {Rational(4)});  // alpha = 1/3 < 3/2
    const auto profile = compute_alpha(params);
    REQUIRE(profile.criticality == Criticality::Subcritical);
    CHECK((1 + profile.case1_eps) * profile.alpha_max < Rational(3, 2));
    CHECK(profile.case1_eps <= 1);
    for (int j = 0; j < params.k; ++j)
        CHECK(profile.l_case1[j] == (1 + profile.case1_eps) * profile.alpha[j]);
    // Explicit override is honored.
    const auto tight = compute_alpha(params, Rational(1, 100));
    CHECK(tight.case1_eps == Rational(1, 100));
}
