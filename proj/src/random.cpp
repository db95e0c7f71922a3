#include "fpplab/random.hpp"

#include <cmath>

namespace fpplab {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    splitmix64(state);
    return splitmix64(state);
}

Interval wilson_interval(long successes, long trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double centre = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) out.lo = 0.0;
    if (successes == trials) out.hi = 1.0;
    return out;
}

double EstimateReport::std_error() const {
    if (samples <= 0) return 0.0;
    return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(samples));
}

nlohmann::json EstimateReport::to_json() const {
    return {{"quantity", quantity}, {"params", params},   {"estimate", estimate}, {"ci_lo", ci_lo},
            {"ci_hi", ci_hi},       {"successes", successes}, {"samples", samples}, {"seed", seed}};
}

EstimateReport make_report(std::string quantity, long successes, long samples, std::uint64_t seed,
                           nlohmann::json params) {
    EstimateReport r;
    r.quantity = std::move(quantity);
    r.params = std::move(params);
    r.successes = successes;
    r.samples = samples;
    r.seed = seed;
    r.estimate = samples > 0 ? static_cast<double>(successes) / static_cast<double>(samples) : 0.0;
    Interval ci = wilson_interval(successes, samples);
    r.ci_lo = ci.lo;
    r.ci_hi = ci.hi;
    return r;
}

int default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace fpplab
