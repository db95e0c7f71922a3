#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpplab/rational.hpp"

namespace fpplab {

/// Counts q(0..Lmax) with cumulative sums Q(L) = q(0) + ... + q(L).
struct PartitionTable {
    std::vector<BigInt> q;
    std::string flavor;  // "distinct-parts" or "multiplicity(<rule>)"

    long Lmax() const { return static_cast<long>(q.size()) - 1; }
    BigInt Q(long L) const;
    /// Header "L,q(L),Q(L)" then one row per L.
    std::string to_csv() const;
};

/// Partitions of L into distinct positive parts, L = 0..Lmax.
PartitionTable q_distinct(long Lmax);

/// alpha_n = number of indices i with a_i = n.
class AlphaSequence {
public:
    AlphaSequence(std::string rule, std::function<BigInt(long)> alpha);

    /// "ones", "constant:c", "factorial", "two-power-squares", "blocks:c1,c2,...". The blocks rule lists
    /// alpha_1, alpha_2, ... explicitly and is zero past the list.
    static AlphaSequence parse(const std::string& rule);

    const std::string& rule() const { return rule_; }
    /// alpha_n for n >= 1.
    BigInt at(long n) const;
    /// r_n = alpha_1 + ... + alpha_n.
    BigInt r(long n) const;
    /// a_i (1-based) for the nondecreasing sequence with these multiplicities; 0 past its end.
    long a(long i) const;

private:
    std::string rule_;
    std::function<BigInt(long)> alpha_;
};

/// Number of 0/1 vectors v with sum a_i v_i = L, for L = 0..Lmax; equals q_distinct for alpha = ones.
PartitionTable q_multiplicity(long Lmax, const AlphaSequence& alpha);

struct SandwichResult {
    Rational lo, mid, hi;
    bool ok = false;
    nlohmann::json to_json() const;
};

/// lo = Q(L-1)/(2 Q(L)), hi = Q(L-1)/Q(L), mid = P(X_1 = 1 | S_n <= L) for X_i in {0, a_i} with probability 1/2
/// each, computed by the conditional DP. Requires a_1 = 1, L >= 1 and n >= r_L.
SandwichResult sandwich_check(const AlphaSequence& alpha, long L, long n);

/// q(k) 4 3^{1/4} k^{3/4} / exp(pi sqrt(k/3)) with exact q(k).
double hardy_ramanujan_ratio(long k);
double hardy_ramanujan_ratio(const PartitionTable& distinct, long k);

struct InjectiveResult {
    Rational lhs, rhs;
    bool ok = false;
    nlohmann::json to_json() const;
};

/// For X_k in {0, k}, P(X_k = 0) = p: lhs = P(X_2 + ... + X_n = L), rhs = ((1-p)/p) P(X_2 + ... + X_n <= L-1).
/// Requires n >= L >= 1 and 0 < p < 1.
InjectiveResult injective_bound_check(const Rational& p, long L, long n);

struct CriteriaReport {
    std::string rule;
    long N = 0;
    std::vector<double> alpha_root_max;  // max_{m<=n} alpha_m^{1/m}, n = 1..N
    std::vector<double> q_root_max;      // max_{l<=L} q(l)^{1/l}, L = 1..N
    std::vector<double> Q_ratio;         // Q(L-1)/Q(L), L = 1..N
    double min_Q_ratio = 0.0;
    std::string classification;          // "bounded-type" or "unbounded-type"
    nlohmann::json to_json() const;
};

/// Horizon-N look at alpha_n^{1/n}: "unbounded-type" when the running maximum at N exceeds 1.25 times the
/// running maximum at N/2. Empirical only; the limsup itself is not decidable from finitely many terms.
CriteriaReport criteria_classify(const AlphaSequence& alpha, long N);

}  // namespace fpplab
