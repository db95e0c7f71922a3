#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace fpplab {

using Rng = std::mt19937_64;

/// One step of the splitmix64 generator; also used as a 64-bit mixing function.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for replica/chunk `index` under master seed `seed`:
/// two splitmix64 rounds over (seed ^ golden * (index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng(derive_seed(seed, index)); }

/// Uniform on the open interval (0,1) with 53-bit resolution; never returns 0 or 1.
inline double uniform_open01(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 gives 95%).
Interval wilson_interval(long successes, long trials, double z = 1.96);

/// Monte Carlo estimate of a probability.
struct EstimateReport {
    std::string quantity;
    nlohmann::json params = nlohmann::json::object();
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    long successes = 0;
    long samples = 0;
    std::uint64_t seed = 0;

    /// Binomial standard error sqrt(p(1-p)/n) at the point estimate.
    double std_error() const;
    nlohmann::json to_json() const;
};

EstimateReport make_report(std::string quantity, long successes, long samples, std::uint64_t seed,
                           nlohmann::json params = nlohmann::json::object());

/// Splits `total` work items into fixed-size chunks (chunk c covers [c*chunk, min(total,(c+1)*chunk))),
/// evaluates `fn(c, begin, end)` for every chunk on up to `workers` threads, and returns the per-chunk
/// results in chunk order. Chunk boundaries do not depend on the worker count, so any order-respecting
/// reduction of the result is worker-independent.
template <class T>
std::vector<T> run_chunks(long total, long chunk, int workers, const std::function<T(long, long, long)>& fn) {
    if (chunk <= 0) chunk = 1;
    long nchunks = total <= 0 ? 0 : (total + chunk - 1) / chunk;
    std::vector<T> out(static_cast<std::size_t>(nchunks));
    auto body = [&](long c) { out[static_cast<std::size_t>(c)] = fn(c, c * chunk, std::min(total, (c + 1) * chunk)); };
    int w = std::max(1, workers);
    if (w == 1 || nchunks <= 1) {
        for (long c = 0; c < nchunks; ++c) body(c);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (long c = t; c < nchunks; c += w) body(c);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

/// Default worker count for library calls: one per hardware thread.
int default_workers();

}  // namespace fpplab
