#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fpplab/lattice.hpp"
#include "fpplab/random.hpp"
#include "fpplab/rational.hpp"

namespace fpplab {

struct Atom {
    Rational value;
    Rational prob;
};

/// Mass `prob` spread uniformly on [lo, hi].
struct UniformPiece {
    Rational lo;
    Rational hi;
    Rational prob;
};

enum class CriticalClass { Subcritical, Supercritical, CriticalFinite, CriticalInfinite };

std::string to_string(CriticalClass c);

/// Law of a nonnegative edge weight: finitely many atoms plus finitely many uniform pieces.
class WeightDistribution {
public:
    /// Throws ValidationError on negative values/probabilities, lo >= hi, or total mass != 1.
    /// Zero-probability atoms and pieces are dropped.
    WeightDistribution(std::vector<Atom> atoms, std::vector<UniformPiece> pieces);

    /// "bernoulli-half", "half-uniform", "half-atom:v" (v a positive rational).
    static WeightDistribution preset(const std::string& name);
    /// Either a preset name string or {"atoms": [[v,p],...], "pieces": [[lo,hi,p],...]} with rational strings.
    static WeightDistribution from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<UniformPiece>& pieces() const { return pieces_; }

    Rational cdf(const Rational& x) const;
    /// F(0) = P(t = 0).
    Rational mass_at_zero() const { return cdf(Rational(0)); }

    /// inf{x : F(x) >= t} in exact arithmetic. Throws ValidationError unless 0 < t < 1.
    Rational quantile(const Rational& t) const;
    /// Same rule in floating point, used by samplers; monotone in t.
    double quantile(double t) const;

    /// t_e = F^{-1}(U) with U uniform on (0,1).
    double sample(Rng& rng) const { return quantile(uniform_open01(rng)); }
    /// A draw from P(t in . | t > 0) as F^{-1}(F(0) + (1 - F(0)) U). Requires F(0) < 1.
    double sample_positive(Rng& rng) const;

private:
    struct Break {
        Rational at;
        Rational left;   // F(at-)
        Rational value;  // F(at)
        double at_d, left_d, value_d;
    };
    std::vector<Atom> atoms_;
    std::vector<UniformPiece> pieces_;
    std::vector<Break> breaks_;
    double f0_d_ = 0.0;
};

/// a_k = F^{-1}(1/2 + 2^{-k}); throws ValidationError for k < 2.
Rational a_k(const WeightDistribution& dist, int k);

/// Four-way classification by F(0) against 1/2 and, at criticality, by convergence of sum a_k.
CriticalClass classify(const WeightDistribution& dist);

/// Edge weights on B(n) together with the uniforms that generated them.
struct SampledConfig {
    WeightConfig<double> weights;
    WeightConfig<double> uniforms;
};

/// Draws U_e for every edge of the box in canonical order and sets t_e = F^{-1}(U_e).
SampledConfig sample_config(const WeightDistribution& dist, const Box& box, Rng& rng);

}  // namespace fpplab
