#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fpplab/lattice.hpp"
#include "fpplab/random.hpp"
#include "fpplab/weight_model.hpp"

namespace fpplab {

/// True iff the zero-weight edges of the annulus contain a circuit around the origin.
/// Decided on the dual: faces touching B(k1) are flooded across every edge that is not a zero-weight
/// annulus edge; a circuit exists iff the flood never reaches a face outside B(k2).
/// Throws std::invalid_argument when the annulus does not fit in the configuration box.
template <class W>
bool has_zero_circuit(const WeightConfig<W>& config, const Annulus& ann);

/// The zero circuit in the annulus enclosing the fewest faces, in canonical (counterclockwise) form.
template <class W>
std::optional<Circuit> innermost_zero_circuit(const WeightConfig<W>& config, const Annulus& ann);

/// The zero circuit in the annulus enclosing the most faces, in canonical (counterclockwise) form.
template <class W>
std::optional<Circuit> outermost_zero_circuit(const WeightConfig<W>& config, const Annulus& ann);

/// Integer power with overflow check; throws std::overflow_error past int range.
int int_pow(int base, int exp);

/// E_k: zero circuits in both Ann(R^{3k}, R^{3k+1}) and Ann(R^{3k+2}, R^{3k+3}).
/// Throws std::out_of_range unless R^{3k+3} fits in the configuration box.
template <class W>
bool detect_Ek(const WeightConfig<W>& config, int k, int R);

template <class W>
struct Decomposition {
    int n = 0;
    int R = 2;
    int K = 0;
    std::vector<int> kappas;                // kappa_1 < ... < kappa_I
    std::vector<Circuit> circuits_minus;  // C_i^-, C_1^- trivial
    std::vector<Circuit> circuits_plus;   // C_i^+
    int I = 0;
    std::vector<W> t_minus;  // T_i^-, T_1^- = 0
    std::vector<W> t_plus;   // T_i^+
    W remainder = W(0);      // R_n = T(C_I^+, boundary of B(n))
    W total = W(0);          // T(0, boundary of B(n)), computed independently

    W decomposed_sum() const;
    /// total == sum of T_i^- + T_i^+ + R_n (exact for Rational, to 1e-9 relative for double); vacuously true when I = 0.
    bool identity_holds() const;
};

/// Builds the circuit decomposition of T(0, boundary of B(n)) for scale R and base index K.
/// Throws std::invalid_argument unless R >= 2, K >= 0 and R^{3K+3} <= n <= box half-side.
template <class W>
Decomposition<W> decompose(const WeightConfig<W>& config, int n, int R, int K);

nlohmann::json to_json(const Decomposition<double>& d);

/// Monte Carlo estimate of P(zero circuit in Ann(l, ratio*l)) on configurations over B(ratio*l).
/// Sample i lives in chunk i / 1000 whose stream is derive_seed(seed, chunk).
EstimateReport estimate_F_prob(const WeightDistribution& dist, int l, int ratio, long samples, std::uint64_t seed,
                               int workers = 1);

}  // namespace fpplab
