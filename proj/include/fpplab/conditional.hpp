#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "fpplab/cylinder_event.hpp"
#include "fpplab/random.hpp"
#include "fpplab/weight_model.hpp"

namespace fpplab {

/// Fewest accepted samples for which a conditional estimate is reported.
inline constexpr long kMinAccepted = 30;

struct ConditionalEstimate {
    std::string event;
    int n = 0;
    double L = 0.0;  // +inf means no conditioning
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    long hits = 0;
    long accepted = 0;
    long total = 0;
    std::uint64_t seed = 0;

    double acceptance_rate() const { return total > 0 ? static_cast<double>(accepted) / total : 0.0; }
    double std_error() const;
    nlohmann::json to_json() const;
};

/// Rejection sampling of P(E | T(0, boundary of B(n)) <= L): `budget` configurations on B(n) are drawn
/// (chunks of 256, chunk c from derive_seed(seed, c)) and those with T <= L are kept.
/// Requires a critical distribution (F(0) = 1/2) and the event inside B(n).
/// Throws RareConditioningError when fewer than kMinAccepted configurations are kept.
ConditionalEstimate estimate_conditional(const WeightDistribution& dist, const CylinderEvent& event, int n, double L,
                                         long budget, std::uint64_t seed, int workers = 1);

/// One draw from the finite-volume stand-in for the FPP incipient infinite cluster: a Bernoulli(1/2)
/// configuration on B(proxy_n) conditioned on T^B(0, boundary) = 0, multiplied edgewise by independent
/// s_e ~ P(t in . | t > 0). Throws RareConditioningError after `max_attempts` rejections.
WeightConfig<double> sample_nu_tilde(const WeightDistribution& dist, int proxy_n, Rng& rng, long max_attempts = 1000000);

/// Fraction of `samples` nu-tilde draws on B(proxy_n) satisfying the event.
ConditionalEstimate estimate_nu_tilde(const WeightDistribution& dist, const CylinderEvent& event, int proxy_n,
                                      long samples, std::uint64_t seed, int workers = 1);

struct FactorizationReport {
    double joint = 0.0;            // P(t^B in D1, s in D2 | T^B = 0)
    double conditional_d1 = 0.0;   // P(t^B in D1 | T^B = 0)
    double marginal_d2 = 0.0;      // P(s in D2), from independent s-draws
    double product = 0.0;
    double difference = 0.0;       // joint - product
    double joint_se = 0.0;
    double product_se = 0.0;
    double half_width = 0.0;       // 1.96 (joint_se + product_se)
    bool within_ci = false;
    long accepted = 0;
    long total = 0;
    long marginal_samples = 0;

    nlohmann::json to_json() const;
};

/// Tests P(t^B in D1, s in D2 | T^B(0, boundary of B(n)) = 0) = P(s in D2) P(t^B in D1 | T^B = 0), with
/// D1 evaluated on the 0/1 indicators 1{t_e > 0} and D2 on the positive parts s_e. Draws configurations until
/// `accepted_target` are accepted or `budget` are drawn; P(s in D2) uses `accepted_target` fresh s-configurations.
FactorizationReport factorization_check(const WeightDistribution& dist, const CylinderEvent& d1, const CylinderEvent& d2,
                                        int n, long accepted_target, long budget, std::uint64_t seed, int workers = 1);

/// Estimates P(T(0, boundary of B(K)) >= F^{-1}(eta) | T(0, boundary of B(n)) <= L) for each n.
/// Requires a CriticalInfinite distribution and eta in (1/2, 1).
std::vector<ConditionalEstimate> convergence_probe(const WeightDistribution& dist, int K, const Rational& eta, double L,
                                                   const std::vector<int>& n_list, long budget, std::uint64_t seed,
                                                   int workers = 1);

}  // namespace fpplab
