#include "fpplab/weight_model.hpp"

#include <algorithm>
#include <map>

#include "fpplab/errors.hpp"

namespace fpplab {

std::string to_string(CriticalClass c) {
    switch (c) {
        case CriticalClass::Subcritical: return "Subcritical";
        case CriticalClass::Supercritical: return "Supercritical";
        case CriticalClass::CriticalFinite: return "CriticalFinite";
        case CriticalClass::CriticalInfinite: return "CriticalInfinite";
    }
    return "?";
}

WeightDistribution::WeightDistribution(std::vector<Atom> atoms, std::vector<UniformPiece> pieces) {
    Rational total = 0;
    std::map<Rational, Rational> merged;
    for (const Atom& a : atoms) {
        if (a.value < 0) throw ValidationError("atom value must be nonnegative");
        if (a.prob < 0) throw ValidationError("atom probability must be nonnegative");
        total += a.prob;
        if (a.prob > 0) merged[a.value] += a.prob;
    }
    for (const auto& [v, p] : merged) atoms_.push_back({v, p});
    for (const UniformPiece& u : pieces) {
        if (u.lo < 0) throw ValidationError("uniform piece must lie in [0, inf)");
        if (!(u.lo < u.hi)) throw ValidationError("uniform piece needs lo < hi");
        if (u.prob < 0) throw ValidationError("piece probability must be nonnegative");
        total += u.prob;
        if (u.prob > 0) pieces_.push_back(u);
    }
    if (total != 1) throw ValidationError("probabilities sum to " + to_string(total) + ", not 1");

    std::vector<Rational> points;
    for (const Atom& a : atoms_) points.push_back(a.value);
    for (const UniformPiece& u : pieces_) {
        points.push_back(u.lo);
        points.push_back(u.hi);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (const Rational& b : points) {
        Rational value = cdf(b);
        Rational jump = 0;
        for (const Atom& a : atoms_) {
            if (a.value == b) jump += a.prob;
        }
        Rational left = value - jump;
        breaks_.push_back({b, left, value, to_double(b), to_double(left), to_double(value)});
    }
    f0_d_ = to_double(mass_at_zero());
}

WeightDistribution WeightDistribution::preset(const std::string& name) {
    Rational half(1, 2);
    if (name == "bernoulli-half") return WeightDistribution({{0, half}, {1, half}}, {});
    if (name == "half-uniform") return WeightDistribution({{0, half}}, {{0, 1, half}});
    const std::string prefix = "half-atom:";
    if (name.rfind(prefix, 0) == 0) {
        Rational v;
        try {
            v = parse_rational(name.substr(prefix.size()));
        } catch (const std::invalid_argument& e) {
            throw ValidationError("bad preset '" + name + "': " + e.what());
        }
        if (v <= 0) throw ValidationError("half-atom value must be positive");
        return WeightDistribution({{0, half}, {v, half}}, {});
    }
    throw ValidationError("unknown distribution preset '" + name + "'");
}

WeightDistribution WeightDistribution::from_json(const nlohmann::json& j) {
    if (j.is_string()) return preset(j.get<std::string>());
    if (!j.is_object()) throw ValidationError("distribution must be a preset name or an object");
    auto rat = [](const nlohmann::json& v) {
        try {
            if (v.is_number_integer()) return Rational(v.get<long>());
            return parse_rational(v.get<std::string>());
        } catch (const std::exception& e) {
            throw ValidationError(std::string("bad rational in distribution: ") + e.what());
        }
    };
    std::vector<Atom> atoms;
    std::vector<UniformPiece> pieces;
    for (const auto& [key, value] : j.items()) {
        if (key != "atoms" && key != "pieces") throw ValidationError("unknown distribution key '" + key + "'");
    }
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2) throw ValidationError("atom must be [value, prob]");
            atoms.push_back({rat(a[0]), rat(a[1])});
        }
    }
    if (j.contains("pieces")) {
        for (const auto& p : j.at("pieces")) {
            if (!p.is_array() || p.size() != 3) throw ValidationError("piece must be [lo, hi, prob]");
            pieces.push_back({rat(p[0]), rat(p[1]), rat(p[2])});
        }
    }
    return WeightDistribution(std::move(atoms), std::move(pieces));
}

nlohmann::json WeightDistribution::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : atoms_) atoms.push_back({to_string(a.value), to_string(a.prob)});
    nlohmann::json pieces = nlohmann::json::array();
    for (const UniformPiece& u : pieces_) pieces.push_back({to_string(u.lo), to_string(u.hi), to_string(u.prob)});
    return {{"atoms", atoms}, {"pieces", pieces}};
}

Rational WeightDistribution::cdf(const Rational& x) const {
    Rational out = 0;
    for (const Atom& a : atoms_) {
        if (a.value <= x) out += a.prob;
    }
    for (const UniformPiece& u : pieces_) {
        if (x >= u.hi) {
            out += u.prob;
        } else if (x > u.lo) {
            out += u.prob * (x - u.lo) / (u.hi - u.lo);
        }
    }
    return out;
}

Rational WeightDistribution::quantile(const Rational& t) const {
    if (!(t > 0 && t < 1)) throw ValidationError("quantile level must lie in (0,1), got " + to_string(t));
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const Break& b = breaks_[i];
        if (b.value < t) continue;
        if (i == 0 || b.left < t) return b.at;
        // F is linear on (prev.at, b.at), rising from prev.value to b.left, and crosses t there.
        const Break& prev = breaks_[i - 1];
        return prev.at + (t - prev.value) * (b.at - prev.at) / (b.left - prev.value);
    }
    return breaks_.back().at;
}

double WeightDistribution::quantile(double t) const {
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const Break& b = breaks_[i];
        if (b.value_d < t) continue;
        if (i == 0 || b.left_d < t) return b.at_d;
        const Break& prev = breaks_[i - 1];
        double x = prev.at_d + (t - prev.value_d) * (b.at_d - prev.at_d) / (b.left_d - prev.value_d);
        return std::clamp(x, prev.at_d, b.at_d);
    }
    return breaks_.back().at_d;
}

double WeightDistribution::sample_positive(Rng& rng) const {
    if (f0_d_ >= 1.0) throw ValidationError("distribution has no positive part");
    double u = uniform_open01(rng);
    return quantile(f0_d_ + (1.0 - f0_d_) * u);
}

Rational a_k(const WeightDistribution& dist, int k) {
    if (k < 2) throw ValidationError("a_k is defined for k >= 2");
    Rational t(1, 2);
    Rational step = 1;
    mpz_mul_2exp(step.get_den_mpz_t(), step.get_den_mpz_t(), static_cast<mp_bitcnt_t>(k));
    return dist.quantile(t + step);
}

CriticalClass classify(const WeightDistribution& dist) {
    Rational f0 = dist.mass_at_zero();
    Rational half(1, 2);
    if (f0 < half) return CriticalClass::Subcritical;
    if (f0 > half) return CriticalClass::Supercritical;
    // F(x) > 1/2 for every x > 0 exactly when a positive-mass uniform piece starts at 0; then
    // F(x) - 1/2 is linear near 0 and a_k decays geometrically. Otherwise F = 1/2 on [0, g) and a_k >= g.
    for (const UniformPiece& u : dist.pieces()) {
        if (u.lo == 0) return CriticalClass::CriticalFinite;
    }
    return CriticalClass::CriticalInfinite;
}

SampledConfig sample_config(const WeightDistribution& dist, const Box& box, Rng& rng) {
    SampledConfig out{WeightConfig<double>(box), WeightConfig<double>(box)};
    for (const Edge& e : enumerate_edges(box)) {
        double u = uniform_open01(rng);
        std::size_t s = out.uniforms.slot(e);
        out.uniforms.mutable_slot(s) = u;
        out.weights.mutable_slot(s) = dist.quantile(u);
    }
    return out;
}

}  // namespace fpplab
