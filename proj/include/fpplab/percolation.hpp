#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpplab/lattice.hpp"
#include "fpplab/random.hpp"
#include "fpplab/weight_model.hpp"

namespace fpplab {

/// Uniform labels U_e on a box; an edge is p-open iff U_e <= p.
using UniformConfig = WeightConfig<double>;

/// Fills every edge of the box with an independent uniform on (0,1), in canonical edge order.
UniformConfig sample_uniforms(const Box& box, Rng& rng);

enum class CrossingShape { Square, Rectangle };

CrossingShape parse_shape(const std::string& name);
std::string to_string(CrossingShape s);

/// Box that carries the uniforms of one crossing sample of the given shape and size.
Box crossing_region(CrossingShape shape, int n);

/// Smallest p at which a p-open left-right crossing exists:
///   Square: B(n) from {x = -n} to {x = n};
///   Rectangle: {0..n+1} x {0..n} from {x = 0} to {x = n+1}.
/// The crossing at p exists iff the returned threshold is <= p.
double open_crossing_threshold(const UniformConfig& u, CrossingShape shape, int n);

/// For the rectangle only: the largest p at which a p-closed top-bottom dual crossing exists, on dual
/// vertices (i + 1/2, j + 1/2), i in 0..n, j in -1..n, from row j = -1 to row j = n through duals of
/// rectangle edges. The closed crossing at p exists iff the returned value is > p.
double closed_dual_crossing_threshold(const UniformConfig& u, int n);

/// Monte Carlo sigma(n, p). Chunks of 256 samples, chunk c drawing from derive_seed(seed, c).
EstimateReport crossing_prob(double p, int n, CrossingShape shape, long samples, std::uint64_t seed, int workers = 1);

/// Per-sample left-right open thresholds for the given shape, reproducible chunk by chunk.
std::vector<double> crossing_thresholds(CrossingShape shape, int n, long samples, std::uint64_t seed, int workers = 1);

struct CorrelationLengthEstimate {
    double p = 0.0;
    double epsilon = 0.0;
    std::optional<int> value;  // empty when no probed n0 <= nmax qualifies
    bool ambiguous = false;    // some probed n0 <= value had a Wilson CI straddling 1 - epsilon
    std::vector<int> probed;
    std::vector<EstimateReport> diagnostics;

    nlohmann::json to_json() const;
};

/// Probe grid used for correlation lengths: 1..8, then geometric growth by 3/2, always ending at nmax.
std::vector<int> probe_grid(int nmax);

/// L(p, eps) estimated as the smallest probed n0 with sigma_hat(n0, p) >= 1 - eps.
CorrelationLengthEstimate correlation_length(double p, double epsilon, int nmax, long samples, std::uint64_t seed,
                                             int workers = 1);

struct PkStep {
    double p;
    std::optional<int> L;
    bool accepted;
    bool ambiguous;
    long samples;
};

struct PkResult {
    double p_k = 1.0;
    double tolerance = 1e-3;
    bool ambiguous = false;
    long samples_per_size = 0;
    std::vector<PkStep> trace;

    nlohmann::json to_json() const;
};

/// Bisection on p in (1/2, 1) for min{p : L_hat(p, eps1) <= R^{3k}}. Every evaluation uses one shared
/// bank of per-sample crossing thresholds per probed size, so the predicate is monotone in p. When the
/// deciding estimate is ambiguous the bank is doubled, up to `max_doublings` times, after which the step
/// is flagged.
PkResult p_k_solve(int R, int k, double epsilon1, long samples, std::uint64_t seed, int workers = 1,
                   int max_doublings = 3, double tolerance = 1e-3);

/// Alternating four-arm event around e0 = {(0,0),(1,0)} at level p, in the box of half-side r centred at
/// (1/2, 0): two vertex-disjoint p-open primal paths from (0,0) and (1,0) to the primal boundary
/// (x = 1-r, x = r or |y| = r) avoiding e0, and two vertex-disjoint p-closed dual paths from (1/2,-1/2) and
/// (1/2,1/2) to the dual boundary avoiding e0*. `u` must cover B(r+1).
bool four_arm_event(const UniformConfig& u, int r, double p = 0.5);

/// Monte Carlo pi_4(r) at p = 1/2 (chunks of 256, uniforms on B(r+1)).
EstimateReport four_arm_prob(int radius, long samples, std::uint64_t seed, int workers = 1);

/// Edges e of Ann(R^{3k+1}, R^{3k+2}) satisfying items (1)-(3) of the O_k event:
///  (1) U_e in (p_k, 2p_k - 1/2);
///  (2) one endpoint in the 1/2-open cluster of the boundary of B(R^{3k}), the other in the 1/2-open
///      cluster of the boundary of B(R^{3k+3});
///  (3) e* closes a (2p_k - 1/2)-closed dual circuit around the origin whose other edges are duals of
///      edges of Ann(R^{3k+1}, R^{3k+2}).
/// `u` must cover B(R^{3k+3}).
std::vector<Edge> O_k_witnesses(const UniformConfig& u, int k, int R, double p_k);

inline bool detect_O_k(const UniformConfig& u, int k, int R, double p_k) { return !O_k_witnesses(u, k, R, p_k).empty(); }

/// Boundary of B(n) as a counterclockwise circuit (n >= 1).
Circuit square_circuit(int n);

/// Piecewise-uniform replacement for the product-uniform law of the labels, used to make O_k common
/// enough to check the sandwich on many firings. Edges of Ann(R^{3k+1}, R^{3k+2}) draw U_e from
/// (0, 1/2], (1/2, p_k], (p_k, 2p_k - 1/2), [2p_k - 1/2, 1) with probabilities `middle`; every other edge
/// draws from (0, 1/2] with probability `outside_open` and from (1/2, 1) otherwise. Detection and passage
/// times are computed exactly as under the product law.
struct OkTilt {
    std::array<double, 4> middle{0.5, 0.0, 0.0, 0.5};
    double outside_open = 0.5;

    nlohmann::json to_json() const;
    static OkTilt from_json(const nlohmann::json& j);
};

/// Uniform labels on `box` drawn from the tilted law for the O_k annuli at (k, R, p_k).
UniformConfig sample_tilted_uniforms(const Box& box, const OkTilt& tilt, int k, int R, double p_k, Rng& rng);

struct OkSandwichReport {
    std::string sampling = "product-uniform";
    long configs = 0;
    long firings = 0;
    long multiple_witnesses = 0;
    long sandwich_failures = 0;
    double lower = 0.0;  // F^{-1}(p_k)
    double upper = 0.0;  // F^{-1}(2p_k - 1/2)
    double min_time = 0.0;
    double max_time = 0.0;

    nlohmann::json to_json() const;
};

/// Samples uniforms on B(R^{3k+3}) until `target_firings` configurations fire O_k (or `max_configs` are
/// drawn), and on each firing checks F^{-1}(p_k) <= T(C1, C2) <= F^{-1}(2p_k - 1/2) with
/// t_e = F^{-1}(U_e), C1 = boundary of B(R^{3k+1}), C2 = boundary of B(R^{3k+2} + 1).
/// Labels come from the product-uniform law unless `tilt` is given.
OkSandwichReport ok_sandwich_run(const WeightDistribution& dist, int k, int R, double p_k, long target_firings,
                                 long max_configs, std::uint64_t seed, int workers = 1,
                                 const std::optional<OkTilt>& tilt = std::nullopt);

}  // namespace fpplab
