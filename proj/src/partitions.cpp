#include "fpplab/partitions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fpplab/condsum.hpp"
#include "fpplab/errors.hpp"

namespace fpplab {

BigInt PartitionTable::Q(long L) const {
    if (L < 0) return BigInt(0);
    if (L > Lmax()) throw ValidationError("L past the table");
    BigInt s(0);
    for (long k = 0; k <= L; ++k) s += q[static_cast<std::size_t>(k)];
    return s;
}

std::string PartitionTable::to_csv() const {
    std::ostringstream out;
    out << "L,q(L),Q(L)\n";
    BigInt cum(0);
    for (long L = 0; L <= Lmax(); ++L) {
        cum += q[static_cast<std::size_t>(L)];
        out << L << ',' << q[static_cast<std::size_t>(L)].get_str() << ',' << cum.get_str() << '\n';
    }
    return out.str();
}

PartitionTable q_distinct(long Lmax) {
    if (Lmax < 0) throw ValidationError("Lmax must be >= 0");
    PartitionTable t;
    t.flavor = "distinct-parts";
    t.q.assign(static_cast<std::size_t>(Lmax + 1), BigInt(0));
    t.q[0] = 1;
    for (long part = 1; part <= Lmax; ++part)
        for (long L = Lmax; L >= part; --L) t.q[static_cast<std::size_t>(L)] += t.q[static_cast<std::size_t>(L - part)];
    return t;
}

// ---------------------------------------------------------------- alpha

AlphaSequence::AlphaSequence(std::string rule, std::function<BigInt(long)> alpha)
    : rule_(std::move(rule)), alpha_(std::move(alpha)) {}

AlphaSequence AlphaSequence::parse(const std::string& rule) {
    if (rule == "ones") return AlphaSequence(rule, [](long) { return BigInt(1); });
    if (rule == "factorial") {
        return AlphaSequence(rule, [](long n) {
            BigInt f;
            mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
            return f;
        });
    }
    if (rule == "two-power-squares") {
        return AlphaSequence(rule, [](long n) {
            BigInt p;
            mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(n * n));
            return p;
        });
    }
    auto colon = rule.find(':');
    std::string head = rule.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : rule.substr(colon + 1);
    auto parse_count = [&](const std::string& text) {
        BigInt v;
        if (text.empty() || v.set_str(text, 10) != 0 || v < 0) throw ValidationError("bad count in alpha rule: " + rule);
        return v;
    };
    if (head == "constant" && colon != std::string::npos) {
        BigInt c = parse_count(rest);
        return AlphaSequence(rule, [c](long) { return c; });
    }
    if (head == "blocks" && colon != std::string::npos) {
        std::vector<BigInt> counts;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) counts.push_back(parse_count(item));
        if (counts.empty()) throw ValidationError("blocks rule needs at least one count");
        return AlphaSequence(rule, [counts](long n) {
            return n <= static_cast<long>(counts.size()) ? counts[static_cast<std::size_t>(n - 1)] : BigInt(0);
        });
    }
    throw ValidationError("unknown alpha rule: " + rule);
}

BigInt AlphaSequence::at(long n) const {
    if (n < 1) throw ValidationError("alpha index must be >= 1");
    return alpha_(n);
}

BigInt AlphaSequence::r(long n) const {
    BigInt s(0);
    for (long m = 1; m <= n; ++m) s += at(m);
    return s;
}

long AlphaSequence::a(long i) const {
    if (i < 1) throw ValidationError("index must be >= 1");
    // Rules in use are either positive forever or zero past a short list, so a bounded scan suffices.
    constexpr long kScan = 1000000;
    BigInt r(0);
    for (long m = 1; m <= kScan; ++m) {
        r += at(m);
        if (r >= i) return m;
        if (m > i && r == 0) break;
    }
    return 0;
}

PartitionTable q_multiplicity(long Lmax, const AlphaSequence& alpha) {
    if (Lmax < 0) throw ValidationError("Lmax must be >= 0");
    PartitionTable t;
    t.flavor = "multiplicity(" + alpha.rule() + ")";
    t.q.assign(static_cast<std::size_t>(Lmax + 1), BigInt(0));
    t.q[0] = 1;
    for (long n = 1; n <= Lmax; ++n) {
        BigInt an = alpha.at(n);
        if (an == 0) continue;
        long jmax = Lmax / n;
        std::vector<BigInt> binom{BigInt(1)};  // C(an, j)
        for (long j = 1; j <= jmax && j <= an; ++j) {
            BigInt c = binom.back() * (an - (j - 1));
            mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(j));
            binom.push_back(c);
        }
        // Multiply by (1 + z^n)^{an}, highest degree first so old values are read before being replaced.
        for (long L = Lmax; L >= n; --L) {
            BigInt s = t.q[static_cast<std::size_t>(L)];
            for (long j = 1; j < static_cast<long>(binom.size()) && j * n <= L; ++j)
                s += binom[static_cast<std::size_t>(j)] * t.q[static_cast<std::size_t>(L - j * n)];
            t.q[static_cast<std::size_t>(L)] = s;
        }
    }
    return t;
}

// ---------------------------------------------------------------- checks

nlohmann::json SandwichResult::to_json() const {
    return {{"lo", to_string(lo)}, {"mid", to_string(mid)}, {"hi", to_string(hi)},
            {"lo_float", to_double(lo)}, {"mid_float", to_double(mid)}, {"hi_float", to_double(hi)}, {"ok", ok}};
}

SandwichResult sandwich_check(const AlphaSequence& alpha, long L, long n) {
    if (L < 1) throw ValidationError("L must be >= 1");
    if (alpha.at(1) < 1) throw ValidationError("need a_1 = 1 (alpha_1 >= 1)");
    BigInt rL = alpha.r(L);
    if (BigInt(n) < rL) throw ValidationError("need n >= r_L = " + rL.get_str());
    PartitionTable t = q_multiplicity(L, alpha);

    SandwichResult out;
    out.hi = Rational(t.Q(L - 1), t.Q(L));
    out.hi.canonicalize();
    out.lo = out.hi / 2;
    long rl = rL.get_si();
    // Variables past r_L exceed L and only enter through P(X_i = 0); any value above L gives the same law.
    auto rule = [&alpha, rl, L](long i) {
        long ai = i <= rl ? alpha.a(i) : L + 1;
        return DiscreteVar::two_point(Rational(ai), Rational(1, 2));
    };
    SumModel model{{}, TailRule::indexed(rule, "alpha:" + alpha.rule())};
    ConditionalLaw law = conditional_law(model, n, Rational(L), 1);
    out.mid = law.prob([](const std::vector<Rational>& v) { return v[0] == 1; });
    out.ok = out.lo <= out.mid && out.mid <= out.hi;
    return out;
}

double hardy_ramanujan_ratio(const PartitionTable& distinct, long k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (k > distinct.Lmax()) throw ValidationError("k past the table");
    double kd = static_cast<double>(k);
    double log_ratio = log_bigint(distinct.q[static_cast<std::size_t>(k)]) + std::log(4.0) + 0.25 * std::log(3.0) +
                       0.75 * std::log(kd) - std::numbers::pi * std::sqrt(kd / 3.0);
    return std::exp(log_ratio);
}

double hardy_ramanujan_ratio(long k) {
    if (k < 1) throw ValidationError("k must be >= 1");
    return hardy_ramanujan_ratio(q_distinct(k), k);
}

nlohmann::json InjectiveResult::to_json() const {
    return {{"lhs", to_string(lhs)}, {"rhs", to_string(rhs)},
            {"lhs_float", to_double(lhs)}, {"rhs_float", to_double(rhs)}, {"ok", ok}};
}

InjectiveResult injective_bound_check(const Rational& p, long L, long n) {
    if (!(p > 0 && p < 1)) throw ValidationError("p must lie in (0, 1)");
    if (!(n >= L && L >= 1)) throw ValidationError("need n >= L >= 1");
    std::vector<DiscreteVar> vars;
    for (long k = 2; k <= n; ++k) vars.push_back(DiscreteVar::two_point(Rational(k), p));
    TruncatedSumLaw law = truncated_sum_law(vars, Rational(L), BigInt(1));
    InjectiveResult out;
    out.lhs = law.pmf(Rational(L));
    out.rhs = (Rational(1) - p) / p * law.cdf(Rational(L - 1));
    out.ok = out.lhs <= out.rhs;
    return out;
}

nlohmann::json CriteriaReport::to_json() const {
    return {{"rule", rule},
            {"N", N},
            {"alpha_root_max", alpha_root_max},
            {"q_root_max", q_root_max},
            {"Q_ratio", Q_ratio},
            {"min_Q_ratio", min_Q_ratio},
            {"classification", classification},
            {"note", "empirical classification at horizon N; not a proof about the limsup"}};
}

CriteriaReport criteria_classify(const AlphaSequence& alpha, long N) {
    if (N < 2) throw ValidationError("N must be >= 2");
    CriteriaReport r;
    r.rule = alpha.rule();
    r.N = N;
    double best = 0.0;
    for (long n = 1; n <= N; ++n) {
        BigInt a = alpha.at(n);
        if (a > 0) best = std::max(best, std::exp(log_bigint(a) / static_cast<double>(n)));
        r.alpha_root_max.push_back(best);
    }
    PartitionTable t = q_multiplicity(N, alpha);
    best = 0.0;
    BigInt Qprev = t.q[0];
    r.min_Q_ratio = 1.0;
    for (long L = 1; L <= N; ++L) {
        const BigInt& q = t.q[static_cast<std::size_t>(L)];
        if (q > 0) best = std::max(best, std::exp(log_bigint(q) / static_cast<double>(L)));
        r.q_root_max.push_back(best);
        BigInt Q = Qprev + q;
        double ratio = to_double(Rational(Qprev, Q));
        r.Q_ratio.push_back(ratio);
        r.min_Q_ratio = std::min(r.min_Q_ratio, ratio);
        Qprev = Q;
    }
    double at_half = r.alpha_root_max[static_cast<std::size_t>(N / 2 - 1)];
    double at_end = r.alpha_root_max.back();
    r.classification = at_end > 1.25 * at_half ? "unbounded-type" : "bounded-type";
    return r;
}

}  // namespace fpplab
