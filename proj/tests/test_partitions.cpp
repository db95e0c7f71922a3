#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "fpplab/condsum.hpp"
#include "fpplab/errors.hpp"
#include "fpplab/partitions.hpp"

using namespace fpplab;

namespace {

Rational R(long a, long b = 1) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

// Partitions of L into distinct parts, generated one by one with parts in decreasing order.
long count_distinct(long L, long max_part) {
    if (L == 0) return 1;
    long c = 0;
    for (long part = std::min(L, max_part); part >= 1; --part) c += count_distinct(L - part, part - 1);
    return c;
}

// Subset-sum counts over the multiset {a_1, ..., a_m} by walking every 0/1 vector.
std::vector<long> subset_counts(const std::vector<long>& a, long Lmax) {
    std::vector<long> out(static_cast<std::size_t>(Lmax + 1), 0);
    std::function<void(std::size_t, long)> go = [&](std::size_t i, long s) {
        if (s > Lmax) return;
        if (i == a.size()) {
            ++out[static_cast<std::size_t>(s)];
            return;
        }
        go(i + 1, s);
        go(i + 1, s + a[i]);
    };
    go(0, 0);
    return out;
}

// Truncated product prod_n (1 + z^n)^{alpha_n}, each factor expanded by the binomial theorem.
std::vector<BigInt> generating_function(const AlphaSequence& alpha, long N) {
    std::vector<BigInt> poly(static_cast<std::size_t>(N + 1), BigInt(0));
    poly[0] = 1;
    for (long n = 1; n <= N; ++n) {
        BigInt a = alpha.at(n);
        std::vector<BigInt> factor(static_cast<std::size_t>(N / n + 1), BigInt(0));
        BigInt binom(1);
        for (long j = 0; j <= N / n; ++j) {
            factor[static_cast<std::size_t>(j)] = binom;
            binom = binom * (a - j) / (j + 1);
        }
        std::vector<BigInt> next(poly.size(), BigInt(0));
        for (long d = 0; d <= N; ++d)
            for (long j = 0; j * n <= d; ++j)
                next[static_cast<std::size_t>(d)] += poly[static_cast<std::size_t>(d - j * n)] * factor[static_cast<std::size_t>(j)];
        poly = std::move(next);
    }
    return poly;
}

// P(X_2 + ... + X_n = s) for X_k in {0, k}, P(X_k = 0) = p, by walking subsets of {2..n} with sum <= L.
std::vector<Rational> injective_oracle(const Rational& p, long L, long n) {
    std::vector<Rational> out(static_cast<std::size_t>(L + 1), Rational(0));
    std::function<void(long, long, long)> go = [&](long k, long s, long used) {
        if (k > n) {
            Rational w(1);
            for (long i = 0; i < used; ++i) w *= 1 - p;
            for (long i = 0; i < n - 1 - used; ++i) w *= p;
            out[static_cast<std::size_t>(s)] += w;
            return;
        }
        go(k + 1, s, used);
        if (s + k <= L) go(k + 1, s + k, used + 1);
    };
    go(2, 0, 0);
    return out;
}

}  // namespace

TEST_CASE("distinct-part counts") {
    auto t = q_distinct(30);
    CHECK(t.flavor == "distinct-parts");
    CHECK(t.q[0] == 1);
    CHECK(t.q[6] == 4);
    CHECK(t.q[10] == 10);
    for (long L = 0; L <= 30; ++L) CHECK(t.q[static_cast<std::size_t>(L)] == count_distinct(L, L));
    BigInt Q(0);
    for (long L = 0; L <= 30; ++L) {
        Q += t.q[static_cast<std::size_t>(L)];
        CHECK(t.Q(L) == Q);
    }
    CHECK_THROWS_AS(t.Q(31), ValidationError);
    CHECK_THROWS_AS(q_distinct(-1), ValidationError);
    CHECK(q_distinct(0).q.size() == 1);
}

TEST_CASE("CSV output") {
    auto csv = q_distinct(10).to_csv();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "L,q(L),Q(L)");
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(line);
    REQUIRE(rows.size() == 11);
    CHECK(rows[10] == "10,10,43");
    CHECK(rows[0] == "0,1,1");
}

TEST_CASE("alpha sequences") {
    auto ones = AlphaSequence::parse("ones");
    CHECK(ones.at(7) == 1);
    CHECK(ones.r(7) == 7);
    CHECK(ones.a(5) == 5);
    auto c = AlphaSequence::parse("constant:3");
    CHECK(c.a(1) == 1);
    CHECK(c.a(3) == 1);
    CHECK(c.a(4) == 2);
    auto b = AlphaSequence::parse("blocks:2,0,1");
    CHECK(b.r(3) == 3);
    CHECK(b.at(4) == 0);
    CHECK(b.a(3) == 3);
    CHECK(b.a(4) == 0);
    CHECK(AlphaSequence::parse("factorial").at(4) == 24);
    CHECK(AlphaSequence::parse("two-power-squares").at(3) == 512);
    CHECK_THROWS_AS(AlphaSequence::parse("nope"), ValidationError);
    CHECK_THROWS_AS(AlphaSequence::parse("constant:-1"), ValidationError);
    CHECK_THROWS_AS(AlphaSequence::parse("blocks:"), ValidationError);
}

TEST_CASE("multiplicity counts") {
    auto ones = q_multiplicity(40, AlphaSequence::parse("ones"));
    CHECK(ones.q == q_distinct(40).q);
    auto two = q_multiplicity(4, AlphaSequence::parse("blocks:2"));
    CHECK(two.q[1] == 2);
    CHECK(two.q[2] == 1);
    CHECK(two.q[3] == 0);

    for (const char* rule : {"constant:2", "blocks:1,3,0,2,1", "factorial", "two-power-squares", "constant:5"}) {
        auto alpha = AlphaSequence::parse(rule);
        long N = 25;
        auto t = q_multiplicity(N, alpha);
        CHECK(t.q == generating_function(alpha, N));
        // Direct subset walk where the multiset is small enough.
        if (alpha.r(std::min<long>(N, 8)) <= 20) {
            long m = 8;
            std::vector<long> a;
            for (long i = 1; BigInt(i) <= alpha.r(m); ++i) a.push_back(alpha.a(i));
            auto brute = subset_counts(a, m);
            for (long L = 0; L <= m; ++L) CHECK(t.q[static_cast<std::size_t>(L)] == brute[static_cast<std::size_t>(L)]);
        }
    }
}

TEST_CASE("point probabilities match 2^-n q(L)") {
    for (const char* rule : {"ones", "constant:2", "blocks:1,2,1,3"}) {
        auto alpha = AlphaSequence::parse(rule);
        auto table = q_multiplicity(20, alpha);
        SumModel model{{}, TailRule::indexed([alpha](long i) { return DiscreteVar::two_point(R(alpha.a(i)), R(1, 2)); },
                                             std::string("alpha ") + rule)};
        for (long L = 1; L <= 20; ++L) {
            long rL = alpha.r(L).get_si();
            for (long n : {rL, rL + 2}) {
                if (alpha.a(n) == 0 && n > rL) continue;  // zero tail past a finite block list
                Rational le = conditional_law(model, n, R(L)).conditioning_prob;
                Rational below = conditional_law(model, n, R(L - 1)).conditioning_prob;
                Rational expect(table.q[static_cast<std::size_t>(L)]);
                BigInt pow2;
                mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(n));
                expect /= Rational(pow2);
                expect.canonicalize();
                CHECK(le - below == expect);
            }
        }
    }
}

TEST_CASE("Hardy-Ramanujan ratio") {
    auto t = q_distinct(2000);
    double r1000 = hardy_ramanujan_ratio(t, 1000);
    CHECK(std::abs(r1000 - 1) <= 0.1);
    CHECK(std::abs(hardy_ramanujan_ratio(t, 2000) - 1) < std::abs(hardy_ramanujan_ratio(t, 200) - 1));
    for (long k : {1L, 2L, 10L, 77L}) CHECK(hardy_ramanujan_ratio(t, k) > 0);
    CHECK(hardy_ramanujan_ratio(50) == doctest::Approx(hardy_ramanujan_ratio(t, 50)));
    // q(1000) has 24 digits; a double-only count would lose it.
    CHECK(t.q[1000].get_str().size() > 18);
    CHECK_THROWS_AS(hardy_ramanujan_ratio(t, 0), ValidationError);
}

TEST_CASE("sandwich bounds") {
    auto ones = AlphaSequence::parse("ones");
    auto six = sandwich_check(ones, 6, 10);
    CHECK(six.ok);
    auto table = q_distinct(10);
    Rational hi(table.Q(5), table.Q(6));
    hi.canonicalize();
    CHECK(six.hi == hi);
    CHECK(six.lo == hi / 2);
    auto one = sandwich_check(ones, 1, 1);
    CHECK(one.hi == R(1, 2));
    CHECK(one.mid == R(1, 2));
    CHECK(one.ok);
    for (long L = 1; L <= 100; L += (L < 30 ? 1 : 7)) {
        auto s = sandwich_check(ones, L, L);
        INFO("L=" << L);
        CHECK(s.ok);
    }
    for (const char* rule : {"constant:2", "blocks:3", "blocks:1,1,4"}) {
        auto alpha = AlphaSequence::parse(rule);
        for (long L = 1; L <= 15; ++L) {
            long n = std::max<long>(1, alpha.r(L).get_si());
            CHECK(sandwich_check(alpha, L, n).ok);
        }
    }
    CHECK_THROWS_AS(sandwich_check(ones, 5, 4), ValidationError);
    CHECK_THROWS_AS(sandwich_check(AlphaSequence::parse("blocks:0,2"), 3, 10), ValidationError);
    CHECK(sandwich_check(ones, 3, 3).to_json().contains("mid"));
}

TEST_CASE("ratio Q(L-1)/Q(L) creeps toward 1") {
    auto t = q_distinct(300);
    double prev = 0;
    for (long L : {25L, 50L, 100L, 200L, 300L}) {
        double ratio = to_double(Rational(t.Q(L - 1), t.Q(L)));
        CHECK(ratio > prev);
        prev = ratio;
    }
    CHECK(prev > 0.9);
}

TEST_CASE("injective bound") {
    for (Rational p : {R(1, 4), R(1, 2), R(3, 4)}) {
        for (long L = 1; L <= 12; ++L) {
            for (long n = L; n <= 24; n += 3) {
                auto r = injective_bound_check(p, L, n);
                auto law = injective_oracle(p, L, n);
                Rational below(0);
                for (long s = 0; s < L; ++s) below += law[static_cast<std::size_t>(s)];
                CHECK(r.lhs == law[static_cast<std::size_t>(L)]);
                CHECK(r.rhs == (1 - p) / p * below);
                CHECK(r.ok);
            }
        }
    }
    auto slack = injective_bound_check(R(9, 10), 4, 10);
    CHECK(slack.ok);
    CHECK(injective_bound_check(R(1, 2), 1, 5).lhs == 0);
    CHECK_THROWS_AS(injective_bound_check(R(1), 2, 4), ValidationError);
    CHECK_THROWS_AS(injective_bound_check(R(1, 2), 5, 4), ValidationError);
}

TEST_CASE("criteria classification") {
    auto ones = criteria_classify(AlphaSequence::parse("ones"), 60);
    CHECK(ones.classification == "bounded-type");
    CHECK(ones.min_Q_ratio > 0.4);
    CHECK(ones.Q_ratio.size() == 60);
    CHECK(criteria_classify(AlphaSequence::parse("constant:4"), 60).classification == "bounded-type");
    auto sq = criteria_classify(AlphaSequence::parse("two-power-squares"), 12);
    CHECK(sq.classification == "unbounded-type");
    CHECK(sq.min_Q_ratio < 1e-3);
    CHECK(ones.to_json().contains("note"));
    CHECK_THROWS_AS(criteria_classify(AlphaSequence::parse("ones"), 1), ValidationError);
}
