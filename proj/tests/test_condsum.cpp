#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>

#include "fpplab/condsum.hpp"
#include "fpplab/errors.hpp"

using namespace fpplab;

namespace {

Rational R(long a, long b = 1) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

// Joint law of the first j variables given S_n <= L, by walking every joint outcome.
std::map<std::vector<Rational>, Rational> brute_law(const std::vector<DiscreteVar>& vars, const Rational& L, long j,
                                                    Rational* cond_prob = nullptr) {
    std::map<std::vector<Rational>, Rational> out;
    Rational total(0);
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
        Rational s(0), p(1);
        for (std::size_t i = 0; i < vars.size(); ++i) {
            s += vars[i].support()[idx[i]].first;
            p *= vars[i].support()[idx[i]].second;
        }
        if (s <= L) {
            std::vector<Rational> key;
            for (long i = 0; i < j; ++i) key.push_back(vars[static_cast<std::size_t>(i)].support()[idx[static_cast<std::size_t>(i)]].first);
            out[key] += p;
            total += p;
        }
        std::size_t k = 0;
        while (k < vars.size() && ++idx[k] == vars[k].support().size()) idx[k++] = 0;
        if (k == vars.size()) break;
    }
    for (auto& [key, p] : out) p /= total;
    if (cond_prob) *cond_prob = total;
    return out;
}

DiscreteVar random_var(std::mt19937_64& rng, int max_size, int max_num, int den) {
    std::uniform_int_distribution<int> size(1, max_size), num(0, max_num), w(1, 4);
    int m = size(rng);
    std::vector<std::pair<Rational, Rational>> pts;
    int wsum = 0;
    std::vector<int> ws;
    for (int i = 0; i < m; ++i) {
        ws.push_back(w(rng));
        wsum += ws.back();
    }
    for (int i = 0; i < m; ++i) pts.push_back({R(num(rng), den), R(ws[static_cast<std::size_t>(i)], wsum)});
    return DiscreteVar(pts);
}

}  // namespace

TEST_CASE("discrete variables") {
    DiscreteVar x({{R(2), R(1, 4)}, {R(0), R(1, 2)}, {R(2), R(1, 4)}, {R(5), R(0)}});
    CHECK(x.support().size() == 2);
    CHECK(x.inf() == 0);
    CHECK(x.sup() == 2);
    CHECK(x.prob_eq(R(2)) == R(1, 2));
    CHECK(x.prob_le(R(1)) == R(1, 2));
    CHECK(x.prob_ge(R(1)) == R(1, 2));
    CHECK(x.truncated_mean(R(2)) == 1);
    CHECK(x.gap() == R(2));
    CHECK(x.conditioned_positive() == DiscreteVar::point(R(2)));
    CHECK_FALSE(DiscreteVar::point(R(3)).gap().has_value());
    CHECK_THROWS_AS(DiscreteVar({{R(0), R(1, 2)}}), ValidationError);
    CHECK_THROWS_AS(DiscreteVar({{R(-1), R(1)}}), ValidationError);
    CHECK_THROWS_AS(DiscreteVar::point(R(0)).conditioned_positive(), ValidationError);
    CHECK(DiscreteVar::from_json(x.to_json()) == x);
    auto g = DiscreteVar::zero_or_uniform_grid(R(1, 2), R(1), R(3), 4);
    CHECK(g.discretized());
    CHECK(g.support().size() == 5);
    CHECK(g.support()[1].first == R(5, 4));
    CHECK(g.prob_eq(R(0)) == R(1, 2));
}

TEST_CASE("sum models") {
    auto par = SumModel::parity(R(1, 3));
    CHECK(par.var(1) == DiscreteVar::two_point(R(1), R(1, 3)));
    CHECK(par.var(7) == DiscreteVar::two_point(R(2), R(1, 3)));
    auto part = SumModel::partition(R(1, 2), R(1, 10));
    CHECK(part.var(5).prob_eq(R(1)) == R(1, 10));
    CHECK(part.var(5).prob_eq(R(5)) == R(2, 5));
    auto osc = SumModel::oscillation({2, 4, 7});
    CHECK(osc.tail.block_value(2) == 2);
    CHECK(osc.tail.block_value(4) == 3);
    CHECK(osc.tail.block_value(6) == 3);
    CHECK(osc.tail.block_value(7) == 2);
    CHECK(osc.tail.block_value(100) == 2);
    auto round = SumModel::from_json(part.to_json());
    for (long k = 1; k <= 6; ++k) CHECK(round.var(k) == part.var(k));
    CHECK(SumModel::from_json(osc.to_json()).var(5) == osc.var(5));
}

TEST_CASE("conditional law examples") {
    auto bern = DiscreteVar::two_point(R(1), R(1, 2));
    SumModel iid{{}, TailRule::iid(bern)};
    auto law = conditional_law(iid, 2, R(1));
    CHECK(law.marginal(1)[R(1)] == R(1, 3));
    CHECK(law.conditioning_prob == R(3, 4));
    auto point = conditional_law(iid, 1, R(0));
    CHECK(point.law.size() == 1);
    CHECK(point.marginal(1)[R(0)] == 1);
    auto par = conditional_law(SumModel::parity(R(1, 2)), 50, R(3));
    CHECK(par.marginal(1)[R(1)] == R(1, 2));

    CHECK_THROWS_AS(conditional_law(iid, 2, R(1), 3), ValidationError);
    SumModel pos{{}, TailRule::iid(DiscreteVar::point(R(1)))};
    CHECK_THROWS_AS(conditional_law(pos, 3, R(2)), EmptyConditioningError);
    SumModel fine{{}, TailRule::iid(DiscreteVar({{R(0), R(1, 2)}, {R(1, 1000), R(1, 2)}}))};
    CHECK_THROWS_AS(conditional_law(fine, 3, R(5000)), GridOverflowError);
}

TEST_CASE("dynamic programme matches brute-force enumeration") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 120; ++trial) {
        std::uniform_int_distribution<int> nn(1, 8), dd(1, 3), jj(1, 3);
        long n = nn(rng);
        int den = dd(rng);
        std::vector<DiscreteVar> head;
        int h = trial % 3;
        for (int i = 0; i < h; ++i) head.push_back(random_var(rng, 3, 4, den));
        SumModel model{head, TailRule::iid(random_var(rng, 3, 4, den))};
        std::vector<DiscreteVar> vars = model.first(n);
        Rational L = R(std::uniform_int_distribution<int>(0, 10)(rng), den);
        long j = std::min<long>(n, jj(rng));
        Rational cp;
        auto expect = brute_law(vars, L, j, &cp);
        if (cp == 0) {
            CHECK_THROWS_AS(conditional_law(model, n, L, j), EmptyConditioningError);
            continue;
        }
        auto got = conditional_law(model, n, L, j);
        CHECK(got.conditioning_prob == cp);
        CHECK(got.law == expect);
        Rational total(0);
        for (const auto& [k, p] : got.law) total += p;
        CHECK(total == 1);
    }
}

TEST_CASE("truncated sum law") {
    std::vector<DiscreteVar> vars{DiscreteVar::two_point(R(1), R(1, 2)), DiscreteVar::two_point(R(1, 2), R(1, 3))};
    auto law = truncated_sum_law(vars, R(1));
    CHECK(law.den == 2);
    CHECK(law.pmf(R(0)) == R(1, 6));
    CHECK(law.pmf(R(1, 2)) == R(1, 3));
    CHECK(law.pmf(R(1)) == R(1, 6));
    CHECK(law.cdf(R(3, 4)) == R(1, 2));
    CHECK(grid_denominator(vars, {R(1, 3)}) == 6);
}

TEST_CASE("Harris upper bound and flip bijection") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 80; ++trial) {
        auto x1 = random_var(rng, 3, 5, 2);
        SumModel model{{x1}, TailRule::iid(random_var(rng, 3, 5, 2))};
        long n = 2 + trial % 10;
        Rational L = R(static_cast<long>(rng() % 12), 2);
        try {
            auto law = conditional_law(model, n, L);
            CHECK(law.marginal(1)[x1.sup()] <= x1.prob_eq(x1.sup()));
        } catch (const EmptyConditioningError&) {
        }
    }
    auto bern = DiscreteVar::two_point(R(1), R(1, 2));
    for (int t = 0; t < 40; ++t) {
        auto tail = random_var(rng, 3, 3, 1);
        SumModel model{{bern}, TailRule::iid(tail)};
        long n = 2 + t % 9;
        for (long L = 1; L <= 6; ++L) {
            auto joint = [&](long LL, long x) -> Rational {
                try {
                    auto law = conditional_law(model, n, R(LL));
                    return law.marginal(1)[R(x)] * law.conditioning_prob;
                } catch (const EmptyConditioningError&) {
                    return Rational(0);
                }
            };
            CHECK(joint(L, 1) == joint(L - 1, 0));
        }
    }
}

TEST_CASE("resampling inequality") {
    auto bern = DiscreteVar::two_point(R(1), R(1, 2));
    SumModel iid{{}, TailRule::iid(bern)};
    auto worked = resampling_bound(iid, 5, R(1), R(1), R(1));
    CHECK(worked.lhs == R(1, 6));
    REQUIRE(worked.bound.has_value());
    CHECK(*worked.bound == 1);
    CHECK(worked.holds);
    for (long n = 2; n <= 8; ++n) {
        auto r = resampling_bound(iid, n, R(1), R(1), R(1));
        CHECK(r.lhs == R(1, n + 1));
        CHECK(*r.bound == R(4, n - 1));
    }
    // Vacuous conditioning.
    auto vac = resampling_bound(iid, 4, R(4), R(1), R(1));
    CHECK(vac.lhs == R(1, 2));
    CHECK(vac.holds);
    // Zero denominator: the bound is +infinity.
    SumModel big{{}, TailRule::iid(DiscreteVar::two_point(R(5), R(1, 2)))};
    auto inf = resampling_bound(big, 3, R(10), R(5), R(1));
    CHECK_FALSE(inf.bound.has_value());
    CHECK(inf.holds);

    std::mt19937_64 rng(2);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<DiscreteVar> head{random_var(rng, 4, 6, 2)};
        SumModel model{head, TailRule::iid(random_var(rng, 4, 6, 2))};
        long n = 2 + static_cast<long>(rng() % 9);
        Rational L = R(static_cast<long>(rng() % 16), 2);
        Rational dp = R(1 + static_cast<long>(rng() % 6), 2);
        Rational d = dp + R(static_cast<long>(rng() % 4), 2);
        try {
            auto r = resampling_bound(model, n, L, d, dp);
            CHECK(r.holds);
            ++checked;
        } catch (const EmptyConditioningError&) {
        }
    }
    CHECK(checked > 150);
}

TEST_CASE("trivial-limit criterion") {
    auto bern = DiscreteVar::two_point(R(1), R(1, 2));
    auto iid = trivial_limit_check(SumModel{{}, TailRule::iid(bern)}, R(1), 20);
    CHECK(iid.inf_sum_finite);
    CHECK(iid.inf_sum == 0);
    CHECK(iid.truncated_sum_diverges);
    CHECK(iid.trivial_limit_predicted);
    CHECK(iid.truncated_partial_sums.back() == R(10));

    auto part = trivial_limit_check(SumModel::partition(R(1, 2)), R(1), 20);
    CHECK_FALSE(part.truncated_sum_diverges);
    CHECK_FALSE(part.condition_at_delta_prime);
    CHECK(part.truncated_partial_sums.back() == R(1, 2));

    auto pert = trivial_limit_check(SumModel::partition(R(1, 2), R(1, 50)), R(1, 2), 20);
    REQUIRE(pert.gap.has_value());
    CHECK(*pert.gap == 1);
    CHECK(pert.gap_variant_applies);
    CHECK(pert.gap_sum_diverges);
    CHECK(pert.trivial_limit_predicted);

    auto positive = trivial_limit_check(SumModel{{}, TailRule::iid(DiscreteVar::two_point(R(1), R(1, 2)))}, R(1, 2), 10);
    CHECK_FALSE(positive.truncated_sum_diverges);

    SumModel idx{{}, TailRule::indexed([](long k) { return DiscreteVar::two_point(R(k), R(1, 2)); }, "custom")};
    CHECK_THROWS_AS(trivial_limit_check(idx, R(1), 10), UndecidableTailError);
}

TEST_CASE("parity examples") {
    for (long L : {1, 3, 5}) {
        for (Rational p : {R(1, 3), R(1, 2), R(3, 4)}) {
            auto model = SumModel::parity(p);
            for (long n : {2L, 3L, 10L, 60L}) CHECK(conditional_law(model, n, R(L)).marginal(1)[R(1)] == 1 - p);
        }
    }
    auto half = SumModel::parity(R(1, 2));
    for (long n = 4; n <= 40; ++n) {
        Rational v = conditional_law(half, n, R(2)).marginal(1)[R(1)];
        CHECK(v == R(1, n + 1));
        CHECK(v <= R(2, n));
    }
}

TEST_CASE("general parity limit") {
    auto x1 = DiscreteVar::two_point(R(1), R(1, 2));
    auto tail = DiscreteVar::two_point(R(2), R(1, 2));
    auto even = general_parity_limit(x1, tail, R(4), R(1, 2));
    CHECK(even.Kstar == 2);
    CHECK(even.limit == 0);
    auto odd = general_parity_limit(x1, tail, R(5), R(1, 2));
    CHECK(odd.Kstar == 2);
    CHECK(odd.limit == R(1, 2));
    CHECK(odd.p == R(1, 2));

    // Parity model: the closed form reproduces 1 - p for odd L.
    for (Rational p : {R(1, 3), R(3, 4)}) {
        auto r = general_parity_limit(DiscreteVar::two_point(R(1), p), DiscreteVar::two_point(R(2), p), R(3), R(1, 2));
        CHECK(r.limit == 1 - p);
    }

    // All-3 tail at L = 4: X_1 + 3m <= 4 allows m <= 1.
    auto three = general_parity_limit(x1, DiscreteVar::two_point(R(3), R(1, 2)), R(4), R(1, 2));
    CHECK(three.Kstar == 1);
    CHECK(three.limit == R(1, 2));

    CHECK_THROWS_AS(general_parity_limit(x1, DiscreteVar::point(R(0)), R(4), R(1, 2)), ValidationError);
    CHECK_THROWS_AS(general_parity_limit(x1, DiscreteVar::point(R(1)), R(4), R(1, 2)), ValidationError);
    CHECK_THROWS_AS(general_parity_limit(DiscreteVar::point(R(3)), tail, R(4), R(1, 2)), ValidationError);
}

TEST_CASE("general parity limit agrees with the finite-n probe") {
    std::mt19937_64 rng(4);
    int done = 0;
    for (int trial = 0; trial < 40 && done < 12; ++trial) {
        auto x1 = random_var(rng, 3, 3, 1);
        std::vector<std::pair<Rational, Rational>> pts{{R(0), R(4, 5)}};
        pts.push_back({R(1 + static_cast<long>(rng() % 3)), R(1, 10)});
        pts.push_back({R(2 + static_cast<long>(rng() % 3)), R(1, 10)});
        DiscreteVar tail(pts);
        Rational L = R(1 + static_cast<long>(rng() % 5));
        GeneralParityResult res;
        try {
            res = general_parity_limit(x1, tail, L, R(1, 2));
        } catch (const ValidationError&) {
            continue;
        }
        // The approach is O(1/n), so check the rate as well as the distance.
        auto probe = convergence_to_limit_probe(x1, tail, L, R(1, 2), {1000, 4000});
        double e1 = std::abs(to_double(probe[0] - res.limit)), e4 = std::abs(to_double(probe[1] - res.limit));
        INFO("K*=" << res.Kstar << " e1000=" << e1 << " e4000=" << e4);
        CHECK(e4 < 0.05);
        CHECK(e4 <= 0.35 * e1 + 1e-12);
        ++done;
    }
    CHECK(done >= 8);

    auto par = convergence_to_limit_probe(DiscreteVar::two_point(R(1), R(1, 2)), DiscreteVar::two_point(R(2), R(1, 2)),
                                          R(3), R(1, 2), {2, 5, 30, 7});
    for (const auto& v : par) CHECK(v == R(1, 2));
}

TEST_CASE("discretized uniform tail: triviality iff ceil(L/J) > ceil((L-1)/J)") {
    auto x1 = DiscreteVar::two_point(R(1), R(1, 2));
    auto ceil_q = [](const Rational& q) {
        BigInt c;
        mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
        return c;
    };
    int cases = 0;
    for (Rational a : {R(1, 2), R(2, 3), R(3, 4), R(1), R(3, 2)}) {
        for (long twiceL = 2; twiceL <= 8; ++twiceL) {
            Rational L = R(twiceL, 2);
            auto tail = DiscreteVar::zero_or_uniform_grid(R(1, 3), a, a + 1, 40);
            if (L <= a) continue;  // X_1 + X'_2 <= L has probability 0
            auto res = general_parity_limit(x1, tail, L, R(1, 2));
            CHECK(res.discretized);
            bool trivial = ceil_q(L / a) > ceil_q((L - 1) / a);
            INFO("a=" << a.get_str() << " L=" << L.get_str() << " limit=" << res.limit.get_str());
            CHECK((res.limit == 0) == trivial);
            ++cases;
        }
    }
    CHECK(cases >= 30);
}

TEST_CASE("oscillation example") {
    // A tail that stays at 2 is the parity model.
    auto flat = oscillation_example({2}, R(4), {5, 9, 20});
    auto par = SumModel::parity(R(1, 2));
    std::vector<long> ns{5, 9, 20};
    for (std::size_t i = 0; i < ns.size(); ++i) CHECK(flat[i] == conditional_law(par, ns[i], R(4)).marginal(1)[R(1)]);

    auto vals = oscillation_example({2, 10, 100, 1000}, R(4), {10, 100, 1000});
    Rational lo = vals[0], hi = vals[0];
    for (const auto& v : vals) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(to_double(hi - lo) >= 0.05);
    CHECK_THROWS_AS(oscillation_example({3, 5}, R(4), {5}), ValidationError);
    CHECK_THROWS_AS(oscillation_example({2, 2}, R(4), {5}), ValidationError);
}
