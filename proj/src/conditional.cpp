#include "fpplab/conditional.hpp"

#include <cmath>

#include "fpplab/errors.hpp"
#include "fpplab/passage_time.hpp"

namespace fpplab {

double ConditionalEstimate::std_error() const {
    if (accepted <= 0) return 0.0;
    return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(accepted));
}

nlohmann::json ConditionalEstimate::to_json() const {
    return {{"event", event},
            {"n", n},
            {"L", std::isinf(L) ? nlohmann::json("inf") : nlohmann::json(L)},
            {"estimate", estimate},
            {"ci_lo", ci_lo},
            {"ci_hi", ci_hi},
            {"hits", hits},
            {"accepted", accepted},
            {"total", total},
            {"acceptance_rate", acceptance_rate()},
            {"seed", seed}};
}

namespace {

constexpr long kChunk = 256;

void require_critical(const WeightDistribution& dist) {
    if (dist.mass_at_zero() != Rational(1, 2)) throw ValidationError("distribution must be critical (F(0) = 1/2)");
}

ConditionalEstimate finish(const CylinderEvent& event, int n, double L, long hits, long accepted, long total,
                           std::uint64_t seed) {
    if (accepted < kMinAccepted) {
        throw RareConditioningError("conditioning too rare: " + std::to_string(accepted) + " accepted out of " +
                                        std::to_string(total),
                                    accepted, total);
    }
    ConditionalEstimate out;
    out.event = event.to_string();
    out.n = n;
    out.L = L;
    out.hits = hits;
    out.accepted = accepted;
    out.total = total;
    out.seed = seed;
    out.estimate = static_cast<double>(hits) / static_cast<double>(accepted);
    Interval ci = wilson_interval(hits, accepted);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
    return out;
}

struct Counts {
    long hits = 0;
    long accepted = 0;
    long total = 0;
};

// Runs chunk 0, 1, 2, ... (in parallel batches of `workers`) and folds them in order until `done` says stop.
// The stopping chunk depends only on the folded totals, so the result does not depend on the worker count.
template <class Part, class Fn, class Fold, class Done>
void run_until(int workers, Fn&& fn, Fold&& fold, Done&& done) {
    int w = std::max(1, workers);
    long next = 0;
    while (!done()) {
        long base = next;
        auto parts = run_chunks<Part>(w, 1, w, [&](long idx, long, long) { return fn(base + idx); });
        for (const Part& p : parts) {
            if (done()) return;
            fold(p);
            ++next;
        }
    }
}

WeightConfig<double> indicator_config(const WeightDistribution& dist, const Box& box, Rng& rng) {
    double f0 = to_double(dist.mass_at_zero());
    WeightConfig<double> b(box);
    for (const Edge& e : enumerate_edges(box)) b.mutable_slot(b.slot(e)) = uniform_open01(rng) > f0 ? 1.0 : 0.0;
    return b;
}

WeightConfig<double> positive_parts(const WeightDistribution& dist, const Box& box, Rng& rng) {
    WeightConfig<double> s(box);
    for (const Edge& e : enumerate_edges(box)) s.mutable_slot(s.slot(e)) = dist.sample_positive(rng);
    return s;
}

}  // namespace

ConditionalEstimate estimate_conditional(const WeightDistribution& dist, const CylinderEvent& event, int n, double L,
                                         long budget, std::uint64_t seed, int workers) {
    require_critical(dist);
    if (n < 0) throw ValidationError("n must be nonnegative");
    if (event.radius() > n) throw ValidationError("event support must lie inside B(n)");
    if (!(L >= 0.0)) throw ValidationError("L must be nonnegative");
    if (budget <= 0) throw ValidationError("budget must be positive");
    Box box{n};
    bool unconditioned = std::isinf(L);
    auto parts = run_chunks<Counts>(budget, kChunk, workers, [&](long c, long begin, long end) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
        Counts k;
        for (long i = begin; i < end; ++i) {
            auto sc = sample_config(dist, box, rng);
            ++k.total;
            if (!unconditioned && !(t_to_boundary(sc.weights, n) <= L)) continue;
            ++k.accepted;
            if (event.evaluate(sc.weights)) ++k.hits;
        }
        return k;
    });
    Counts sum;
    for (const Counts& k : parts) {
        sum.hits += k.hits;
        sum.accepted += k.accepted;
        sum.total += k.total;
    }
    return finish(event, n, L, sum.hits, sum.accepted, sum.total, seed);
}

WeightConfig<double> sample_nu_tilde(const WeightDistribution& dist, int proxy_n, Rng& rng, long max_attempts) {
    require_critical(dist);
    if (proxy_n < 1) throw ValidationError("proxy_n must be >= 1");
    Box box{proxy_n};
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        auto b = indicator_config(dist, box, rng);
        if (t_to_boundary(b, proxy_n) != 0.0) continue;
        auto s = positive_parts(dist, box, rng);
        for (std::size_t i = 0; i < box.vertex_count() * 2; ++i) b.mutable_slot(i) *= s.at_slot(i);
        return b;
    }
    throw RareConditioningError("conditioning too rare: no accepted configuration", 0, max_attempts);
}

ConditionalEstimate estimate_nu_tilde(const WeightDistribution& dist, const CylinderEvent& event, int proxy_n,
                                      long samples, std::uint64_t seed, int workers) {
    require_critical(dist);
    if (event.radius() > proxy_n) throw ValidationError("event support must lie inside B(proxy_n)");
    if (samples <= 0) throw ValidationError("samples must be positive");
    auto parts = run_chunks<long>(samples, kChunk, workers, [&](long c, long begin, long end) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
        long hits = 0;
        for (long i = begin; i < end; ++i) hits += event.evaluate(sample_nu_tilde(dist, proxy_n, rng)) ? 1 : 0;
        return hits;
    });
    long hits = 0;
    for (long h : parts) hits += h;
    return finish(event, proxy_n, 0.0, hits, samples, samples, seed);
}

nlohmann::json FactorizationReport::to_json() const {
    return {{"joint", joint},
            {"conditional_d1", conditional_d1},
            {"marginal_d2", marginal_d2},
            {"product", product},
            {"difference", difference},
            {"joint_se", joint_se},
            {"product_se", product_se},
            {"half_width", half_width},
            {"within_ci", within_ci},
            {"accepted", accepted},
            {"total", total},
            {"marginal_samples", marginal_samples}};
}

FactorizationReport factorization_check(const WeightDistribution& dist, const CylinderEvent& d1, const CylinderEvent& d2,
                                        int n, long accepted_target, long budget, std::uint64_t seed, int workers) {
    require_critical(dist);
    if (d1.radius() > n || d2.radius() > n) throw ValidationError("event support must lie inside B(n)");
    if (accepted_target <= 0 || budget <= 0) throw ValidationError("sample targets must be positive");
    Box box{n};

    struct Part {
        long total = 0, accepted = 0, d1 = 0, both = 0;
    };
    Part sum;
    run_until<Part>(
        workers,
        [&](long c) {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
            Part p;
            for (long i = 0; i < kChunk; ++i) {
                auto b = indicator_config(dist, box, rng);
                auto s = positive_parts(dist, box, rng);
                ++p.total;
                if (t_to_boundary(b, n) != 0.0) continue;
                ++p.accepted;
                if (!d1.evaluate(b)) continue;
                ++p.d1;
                if (d2.evaluate(s)) ++p.both;
            }
            return p;
        },
        [&](const Part& p) {
            sum.total += p.total;
            sum.accepted += p.accepted;
            sum.d1 += p.d1;
            sum.both += p.both;
        },
        [&] { return sum.accepted >= accepted_target || sum.total >= budget; });
    if (sum.accepted < kMinAccepted) {
        throw RareConditioningError("conditioning too rare: " + std::to_string(sum.accepted) + " accepted", sum.accepted,
                                    sum.total);
    }

    // Independent stream for the unconditional P(s in D2).
    std::uint64_t marginal_seed = derive_seed(seed, 0xD2D2D2D2ULL);
    long m = accepted_target;
    auto mparts = run_chunks<long>(m, kChunk, workers, [&](long c, long begin, long end) {
        Rng rng = make_rng(marginal_seed, static_cast<std::uint64_t>(c));
        long hits = 0;
        for (long i = begin; i < end; ++i) hits += d2.evaluate(positive_parts(dist, box, rng)) ? 1 : 0;
        return hits;
    });
    long mhits = 0;
    for (long h : mparts) mhits += h;

    FactorizationReport r;
    r.accepted = sum.accepted;
    r.total = sum.total;
    r.marginal_samples = m;
    double na = static_cast<double>(sum.accepted);
    r.joint = sum.both / na;
    r.conditional_d1 = sum.d1 / na;
    r.marginal_d2 = static_cast<double>(mhits) / static_cast<double>(m);
    r.product = r.conditional_d1 * r.marginal_d2;
    r.difference = r.joint - r.product;
    r.joint_se = std::sqrt(r.joint * (1.0 - r.joint) / na);
    double se_d1 = std::sqrt(r.conditional_d1 * (1.0 - r.conditional_d1) / na);
    double se_d2 = std::sqrt(r.marginal_d2 * (1.0 - r.marginal_d2) / static_cast<double>(m));
    r.product_se = std::sqrt(r.marginal_d2 * r.marginal_d2 * se_d1 * se_d1 + r.conditional_d1 * r.conditional_d1 * se_d2 * se_d2);
    r.half_width = 1.96 * (r.joint_se + r.product_se);
    r.within_ci = std::abs(r.difference) <= r.half_width;
    return r;
}

std::vector<ConditionalEstimate> convergence_probe(const WeightDistribution& dist, int K, const Rational& eta, double L,
                                                   const std::vector<int>& n_list, long budget, std::uint64_t seed,
                                                   int workers) {
    if (classify(dist) != CriticalClass::CriticalInfinite) {
        throw ValidationError("convergence probe needs a CriticalInfinite distribution");
    }
    if (!(eta > Rational(1, 2) && eta < 1)) throw ValidationError("eta must lie in (1/2, 1)");
    if (K < 0) throw ValidationError("K must be nonnegative");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < K) throw ValidationError("every n must be >= K");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw ValidationError("n_list must be increasing");
    }
    CylinderEvent event = CylinderEvent::ball(K, Cmp::Ge, dist.quantile(eta));
    std::vector<ConditionalEstimate> out;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        out.push_back(estimate_conditional(dist, event, n_list[i], L, budget, derive_seed(seed, i), workers));
    }
    return out;
}

}  // namespace fpplab
