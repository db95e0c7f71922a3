#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fpplab/rational.hpp"

namespace fpplab {

/// Finite-support law of a nonnegative random variable.
class DiscreteVar {
public:
    /// Merges repeated values and drops zero-probability points. Throws ValidationError on negative
    /// values, negative probabilities or total mass != 1.
    explicit DiscreteVar(std::vector<std::pair<Rational, Rational>> support, bool discretized = false);

    /// P(X = 0) = p_zero, P(X = value) = 1 - p_zero.
    static DiscreteVar two_point(const Rational& value, const Rational& p_zero);
    static DiscreteVar point(const Rational& value);
    /// 0 with probability q, otherwise the midpoints a + (i + 1/2)(b - a)/m, i < m, each with mass (1 - q)/m.
    /// Stand-in for "0 w.p. q, else uniform on [a, b]"; flagged as discretized.
    static DiscreteVar zero_or_uniform_grid(const Rational& q, const Rational& a, const Rational& b, int m);
    /// ["v:p", ...] with rational strings.
    static DiscreteVar from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Sorted by value, probabilities positive.
    const std::vector<std::pair<Rational, Rational>>& support() const { return support_; }
    bool discretized() const { return discretized_; }

    /// Infimum of the support.
    const Rational& inf() const { return support_.front().first; }
    const Rational& sup() const { return support_.back().first; }
    Rational prob_eq(const Rational& x) const;
    Rational prob_le(const Rational& x) const;
    Rational prob_ge(const Rational& x) const;
    Rational prob_gt(const Rational& x) const { return Rational(1) - prob_le(x); }
    /// E X 1{X <= x}.
    Rational truncated_mean(const Rational& x) const;
    /// Smallest support point above the infimum minus the infimum; nullopt for a point mass.
    std::optional<Rational> gap() const;
    /// Law of X given X > 0. Throws ValidationError when P(X > 0) = 0.
    DiscreteVar conditioned_positive() const;

    bool operator==(const DiscreteVar& o) const { return support_ == o.support_; }

private:
    std::vector<std::pair<Rational, Rational>> support_;
    bool discretized_ = false;
};

/// Law of X_k for k past the explicit head of a SumModel.
class TailRule {
public:
    enum class Kind { Iid, Linear, Blocks, Indexed };

    static TailRule iid(DiscreteVar var);
    /// "a_n = n": X_k = 0 w.p. p_zero, 1 w.p. p_one, k otherwise.
    static TailRule linear(const Rational& p_zero, const Rational& p_one = Rational(0));
    /// "a_n in blocks": X_1 in {0, 1}, and for k >= 2, X_k in {0, a_k} with a_k = 2 on [r_{2i}, r_{2i+1}) and
    /// 3 on [r_{2i+1}, r_{2i+2}), where r_0 = 2 < r_1 < ... is the given list; past the last r the current
    /// value continues. P(X_k = 0) = p_zero throughout.
    static TailRule blocks(std::vector<long> r, const Rational& p_zero);
    /// Arbitrary rule without a summability analysis.
    static TailRule indexed(std::function<DiscreteVar(long)> fn, std::string tag);
    static TailRule from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Kind kind() const { return kind_; }
    const std::string& tag() const { return tag_; }
    /// Law of X_k (k >= 1).
    DiscreteVar at(long k) const;
    /// Value a_k of the block rule.
    long block_value(long k) const;

    const DiscreteVar& iid_var() const { return *iid_; }
    const Rational& p_zero() const { return p_zero_; }
    const Rational& p_one() const { return p_one_; }
    const std::vector<long>& block_bounds() const { return r_; }

private:
    TailRule() = default;
    Kind kind_ = Kind::Iid;
    std::string tag_;
    std::optional<DiscreteVar> iid_;
    Rational p_zero_, p_one_;
    std::vector<long> r_;
    std::function<DiscreteVar(long)> fn_;
};

/// X_1, ..., X_j given explicitly, then the tail rule for k > j.
struct SumModel {
    std::vector<DiscreteVar> head;
    TailRule tail;

    /// Law of X_k, k >= 1.
    DiscreteVar var(long k) const;
    std::vector<DiscreteVar> first(long n) const;

    /// X_1 in {0,1}, X_k in {0,2} for k >= 2, each zero with probability p.
    static SumModel parity(const Rational& p);
    /// X_k in {0, k} with P(X_k = 0) = p_zero; with p_one > 0 the mass p_one moves to the value 1.
    static SumModel partition(const Rational& p_zero, const Rational& p_one = Rational(0));
    /// X_1 = 0 or 1 (each 1/2) followed by the block rule with P(0) = 1/2.
    static SumModel oscillation(std::vector<long> r);
    /// {"head": [var, ...], "tail": rule}.
    static SumModel from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// DP state cap on (common denominator) * L. Default 10^6; FPPLAB_STATE_CAP overrides.
long state_cap();

/// Law of X_1 + ... + X_m restricted to sums <= L, on the grid (1/den)Z: probs[i] = P(S = i/den).
struct TruncatedSumLaw {
    BigInt den;
    std::vector<Rational> probs;

    /// P(S <= x) for x >= 0 (x need not lie on the grid; values past the truncation are not available).
    Rational cdf(const Rational& x) const;
    Rational pmf(const Rational& x) const;
};

/// Common denominator of all support values and of `extra`.
BigInt grid_denominator(const std::vector<DiscreteVar>& vars, const std::vector<Rational>& extra = {});
/// Throws GridOverflowError if den * L + 1 exceeds state_cap().
TruncatedSumLaw truncated_sum_law(const std::vector<DiscreteVar>& vars, const Rational& L, const BigInt& den);
TruncatedSumLaw truncated_sum_law(const std::vector<DiscreteVar>& vars, const Rational& L);

/// Exact joint law of (X_1, ..., X_j) given S_n <= L.
struct ConditionalLaw {
    long n = 0;
    Rational L;
    long j = 0;
    Rational conditioning_prob;  // P(S_n <= L)
    std::map<std::vector<Rational>, Rational> law;

    /// Law of X_i (1 <= i <= j) under the conditioning.
    std::map<Rational, Rational> marginal(long i) const;
    Rational prob(const std::function<bool(const std::vector<Rational>&)>& pred) const;
    nlohmann::json to_json() const;
};

/// Throws ValidationError if j > n or j < 1, EmptyConditioningError if P(S_n <= L) = 0,
/// GridOverflowError past the state cap.
ConditionalLaw conditional_law(const SumModel& model, long n, const Rational& L, long j = 1);

struct ResamplingResult {
    Rational lhs;                  // P(X_1 >= delta | S_n <= L)
    std::optional<Rational> bound; // nullopt means +infinity
    bool holds = false;
    nlohmann::json to_json() const;
};

/// P(X_1 >= delta | S_n <= L) against L / (P(X_1 <= delta - delta') sum_{k=2}^n E X_k 1{X_k <= delta'}).
ResamplingResult resampling_bound(const SumModel& model, long n, const Rational& L, const Rational& delta,
                                  const Rational& delta_prime);

struct TrivialLimitReport {
    std::string tail;
    Rational delta_prime;
    long K = 0;
    std::vector<Rational> inf_partial_sums;        // sum_{k<=m} I_k, m = 1..K
    std::vector<Rational> truncated_partial_sums;  // sum_{k<=m} E X_k 1{X_k <= delta'}, m = 1..K
    bool inf_sum_finite = false;
    std::optional<Rational> inf_sum;               // value when finite
    bool truncated_sum_diverges = false;           // at delta'
    std::optional<Rational> gap;                   // uniform support gap epsilon, if one exists
    bool gap_sum_diverges = false;                 // divergence at delta' = gap
    bool condition_at_delta_prime = false;
    bool gap_variant_applies = false;
    bool trivial_limit_predicted = false;
    nlohmann::json to_json() const;
};

/// Decides sum I_k < infinity and divergence of sum E X_k 1{X_k <= delta'} for IID, "a_n = n" and block
/// tails, plus the weakened condition at delta' = gap when all laws share a support gap.
/// Throws UndecidableTailError for Indexed tails.
TrivialLimitReport trivial_limit_check(const SumModel& model, const Rational& delta_prime, long K);

struct GeneralParityResult {
    long Kstar = 0;
    Rational limit;
    Rational p;  // P(tail > 0)
    bool discretized = false;
    nlohmann::json to_json() const;
};

/// K* = sup{k : P(X_1 + S'_k <= L) > 0} with S'_k a sum of k copies of the tail conditioned positive, and
/// P(X_1 > I_1 + delta | X_1 + S'_{K*} <= L). Throws ValidationError when P(tail > 0) = 0, inf tail > 0,
/// or P(X_1 + S'_1 <= L) = 0.
GeneralParityResult general_parity_limit(const DiscreteVar& x1, const DiscreteVar& tail, const Rational& L,
                                         const Rational& delta);

/// P(X_1 > I_1 + delta | S_n <= L) for the model (x1, tail, tail, ...) at each n (n >= 1, any order).
std::vector<Rational> convergence_to_limit_probe(const DiscreteVar& x1, const DiscreteVar& tail, const Rational& L,
                                                 const Rational& delta, const std::vector<long>& n_list);

/// P(X_1 = 1 | S_n <= L) along n_list for SumModel::oscillation(r). r must start at 2 and increase strictly.
std::vector<Rational> oscillation_example(const std::vector<long>& r, const Rational& L, const std::vector<long>& n_list);

}  // namespace fpplab
