#include "fpplab/condsum.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "fpplab/errors.hpp"

namespace fpplab {

// ---------------------------------------------------------------- DiscreteVar

DiscreteVar::DiscreteVar(std::vector<std::pair<Rational, Rational>> support, bool discretized)
    : discretized_(discretized) {
    std::map<Rational, Rational> merged;
    Rational total(0);
    for (auto& [v, p] : support) {
        v.canonicalize();
        p.canonicalize();
        if (v < 0) throw ValidationError("support values must be nonnegative");
        if (p < 0) throw ValidationError("probabilities must be nonnegative");
        total += p;
        if (p == 0) continue;
        merged[v] += p;
    }
    if (total != 1) throw ValidationError("probabilities sum to " + to_string(total) + ", not 1");
    support_.assign(merged.begin(), merged.end());
}

DiscreteVar DiscreteVar::two_point(const Rational& value, const Rational& p_zero) {
    if (p_zero < 0 || p_zero > 1) throw ValidationError("p_zero must lie in [0, 1]");
    return DiscreteVar({{Rational(0), p_zero}, {value, Rational(1) - p_zero}});
}

DiscreteVar DiscreteVar::point(const Rational& value) { return DiscreteVar({{value, Rational(1)}}); }

DiscreteVar DiscreteVar::zero_or_uniform_grid(const Rational& q, const Rational& a, const Rational& b, int m) {
    if (q < 0 || q > 1) throw ValidationError("q must lie in [0, 1]");
    if (!(a >= 0 && a < b)) throw ValidationError("need 0 <= a < b");
    if (m < 1) throw ValidationError("grid size must be >= 1");
    std::vector<std::pair<Rational, Rational>> s{{Rational(0), q}};
    Rational h = (b - a) / m;
    Rational w = (Rational(1) - q) / m;
    for (int i = 0; i < m; ++i) s.emplace_back(a + (Rational(i) + Rational(1, 2)) * h, w);
    return DiscreteVar(std::move(s), true);
}

DiscreteVar DiscreteVar::from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("variable must be a nonempty list of \"value:prob\" strings");
    std::vector<std::pair<Rational, Rational>> s;
    for (const auto& item : j) {
        if (!item.is_string()) throw ValidationError("variable entries must be \"value:prob\" strings");
        std::string text = item.get<std::string>();
        auto colon = text.find(':');
        if (colon == std::string::npos) throw ValidationError("missing ':' in \"" + text + "\"");
        try {
            s.emplace_back(parse_rational(text.substr(0, colon)), parse_rational(text.substr(colon + 1)));
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
    }
    return DiscreteVar(std::move(s));
}

nlohmann::json DiscreteVar::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [v, p] : support_) out.push_back(to_string(v) + ":" + to_string(p));
    return out;
}

Rational DiscreteVar::prob_eq(const Rational& x) const {
    for (const auto& [v, p] : support_)
        if (v == x) return p;
    return Rational(0);
}

Rational DiscreteVar::prob_le(const Rational& x) const {
    Rational s(0);
    for (const auto& [v, p] : support_)
        if (v <= x) s += p;
    return s;
}

Rational DiscreteVar::prob_ge(const Rational& x) const {
    Rational s(0);
    for (const auto& [v, p] : support_)
        if (v >= x) s += p;
    return s;
}

Rational DiscreteVar::truncated_mean(const Rational& x) const {
    Rational s(0);
    for (const auto& [v, p] : support_)
        if (v <= x) s += v * p;
    return s;
}

std::optional<Rational> DiscreteVar::gap() const {
    if (support_.size() < 2) return std::nullopt;
    return support_[1].first - support_[0].first;
}

DiscreteVar DiscreteVar::conditioned_positive() const {
    Rational pos = prob_gt(Rational(0));
    if (pos == 0) throw ValidationError("P(X > 0) = 0");
    std::vector<std::pair<Rational, Rational>> s;
    for (const auto& [v, p] : support_)
        if (v > 0) s.emplace_back(v, p / pos);
    return DiscreteVar(std::move(s), discretized_);
}

// ---------------------------------------------------------------- TailRule

TailRule TailRule::iid(DiscreteVar var) {
    TailRule t;
    t.kind_ = Kind::Iid;
    t.tag_ = "iid";
    t.iid_ = std::move(var);
    return t;
}

TailRule TailRule::linear(const Rational& p_zero, const Rational& p_one) {
    if (p_zero < 0 || p_one < 0 || p_zero + p_one > 1) throw ValidationError("need p_zero, p_one >= 0 and p_zero + p_one <= 1");
    TailRule t;
    t.kind_ = Kind::Linear;
    t.tag_ = "a_n = n";
    t.p_zero_ = p_zero;
    t.p_one_ = p_one;
    return t;
}

TailRule TailRule::blocks(std::vector<long> r, const Rational& p_zero) {
    if (r.empty() || r.front() != 2) throw ValidationError("block list must start at 2");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (r[i] <= r[i - 1]) throw ValidationError("block list must increase strictly");
    if (p_zero < 0 || p_zero > 1) throw ValidationError("p_zero must lie in [0, 1]");
    TailRule t;
    t.kind_ = Kind::Blocks;
    t.tag_ = "a_n in blocks";
    t.r_ = std::move(r);
    t.p_zero_ = p_zero;
    return t;
}

TailRule TailRule::indexed(std::function<DiscreteVar(long)> fn, std::string tag) {
    TailRule t;
    t.kind_ = Kind::Indexed;
    t.tag_ = std::move(tag);
    t.fn_ = std::move(fn);
    return t;
}

TailRule TailRule::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("tail must be an object");
    auto rat = [&](const char* key, const char* fallback) {
        if (!j.contains(key)) return parse_rational(fallback);
        if (!j.at(key).is_string()) throw ValidationError(std::string(key) + " must be a rational string");
        return parse_rational(j.at(key).get<std::string>());
    };
    if (j.contains("iid")) {
        if (j.size() != 1) throw ValidationError("unexpected keys next to \"iid\"");
        return iid(DiscreteVar::from_json(j.at("iid")));
    }
    if (!j.contains("rule") || !j.at("rule").is_string()) throw ValidationError("tail needs \"iid\" or \"rule\"");
    std::string rule = j.at("rule").get<std::string>();
    try {
        if (rule == "a_n = n") {
            for (const auto& [k, v] : j.items())
                if (k != "rule" && k != "p_zero" && k != "p_one") throw ValidationError("unknown tail key: " + k);
            return linear(rat("p_zero", "1/2"), rat("p_one", "0"));
        }
        if (rule == "a_n in blocks") {
            for (const auto& [k, v] : j.items())
                if (k != "rule" && k != "p_zero" && k != "r") throw ValidationError("unknown tail key: " + k);
            if (!j.contains("r") || !j.at("r").is_array()) throw ValidationError("block tail needs an \"r\" list");
            return blocks(j.at("r").get<std::vector<long>>(), rat("p_zero", "1/2"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(e.what());
    } catch (const ValidationError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    throw ValidationError("unknown tail rule: " + rule);
}

nlohmann::json TailRule::to_json() const {
    switch (kind_) {
        case Kind::Iid: return {{"iid", iid_->to_json()}};
        case Kind::Linear: return {{"rule", tag_}, {"p_zero", to_string(p_zero_)}, {"p_one", to_string(p_one_)}};
        case Kind::Blocks: return {{"rule", tag_}, {"r", r_}, {"p_zero", to_string(p_zero_)}};
        case Kind::Indexed: return {{"rule", tag_}};
    }
    return nullptr;
}

long TailRule::block_value(long k) const {
    if (k <= 1) return 1;
    auto it = std::upper_bound(r_.begin(), r_.end(), k);
    long i = static_cast<long>(it - r_.begin()) - 1;  // r_[i] <= k < r_[i+1]
    return i % 2 == 0 ? 2 : 3;
}

DiscreteVar TailRule::at(long k) const {
    if (k < 1) throw ValidationError("variable index must be >= 1");
    switch (kind_) {
        case Kind::Iid: return *iid_;
        case Kind::Linear:
            if (k == 1) return DiscreteVar({{Rational(0), p_zero_}, {Rational(1), Rational(1) - p_zero_}});
            return DiscreteVar({{Rational(0), p_zero_}, {Rational(1), p_one_}, {Rational(k), Rational(1) - p_zero_ - p_one_}});
        case Kind::Blocks: return DiscreteVar::two_point(Rational(block_value(k)), p_zero_);
        case Kind::Indexed: return fn_(k);
    }
    throw ValidationError("bad tail rule");
}

// ---------------------------------------------------------------- SumModel

DiscreteVar SumModel::var(long k) const {
    if (k < 1) throw ValidationError("variable index must be >= 1");
    if (k <= static_cast<long>(head.size())) return head[static_cast<std::size_t>(k - 1)];
    return tail.at(k);
}

std::vector<DiscreteVar> SumModel::first(long n) const {
    std::vector<DiscreteVar> out;
    out.reserve(static_cast<std::size_t>(std::max(0L, n)));
    for (long k = 1; k <= n; ++k) out.push_back(var(k));
    return out;
}

SumModel SumModel::parity(const Rational& p) {
    if (!(p > 0 && p < 1)) throw ValidationError("p must lie in (0, 1)");
    return SumModel{{DiscreteVar::two_point(Rational(1), p)}, TailRule::iid(DiscreteVar::two_point(Rational(2), p))};
}

SumModel SumModel::partition(const Rational& p_zero, const Rational& p_one) {
    return SumModel{{}, TailRule::linear(p_zero, p_one)};
}

SumModel SumModel::oscillation(std::vector<long> r) {
    return SumModel{{DiscreteVar::two_point(Rational(1), Rational(1, 2))}, TailRule::blocks(std::move(r), Rational(1, 2))};
}

SumModel SumModel::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("model must be an object");
    for (const auto& [k, v] : j.items())
        if (k != "head" && k != "tail") throw ValidationError("unknown model key: " + k);
    if (!j.contains("tail")) throw ValidationError("model needs a \"tail\"");
    std::vector<DiscreteVar> head;
    if (j.contains("head")) {
        if (!j.at("head").is_array()) throw ValidationError("head must be a list of variables");
        for (const auto& v : j.at("head")) head.push_back(DiscreteVar::from_json(v));
    }
    return SumModel{std::move(head), TailRule::from_json(j.at("tail"))};
}

nlohmann::json SumModel::to_json() const {
    nlohmann::json h = nlohmann::json::array();
    for (const auto& v : head) h.push_back(v.to_json());
    return {{"head", h}, {"tail", tail.to_json()}};
}

// ---------------------------------------------------------------- grid DP

long state_cap() {
    if (const char* env = std::getenv("FPPLAB_STATE_CAP")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return 1000000;
}

namespace {

// floor(x * den) as a long; -1 for negative x. Throws GridOverflowError past the cap.
long grid_index(const Rational& x, const BigInt& den) {
    if (x < 0) return -1;
    Rational scaled = x * Rational(den);
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    if (fl + 1 > state_cap()) {
        throw GridOverflowError("grid needs " + to_string(BigInt(fl + 1)) + " states; cap is " + std::to_string(state_cap()));
    }
    return fl.get_si();
}

struct GridVar {
    std::vector<std::pair<long, Rational>> points;  // scaled values <= M only
};

GridVar to_grid(const DiscreteVar& v, const BigInt& den, long M) {
    GridVar g;
    for (const auto& [x, p] : v.support()) {
        Rational scaled = x * Rational(den);
        if (scaled > M) break;
        g.points.emplace_back(scaled.get_num().get_si(), p);
    }
    return g;
}

void convolve(std::vector<Rational>& law, const GridVar& g) {
    long M = static_cast<long>(law.size()) - 1;
    std::vector<Rational> next(law.size(), Rational(0));
    for (long i = 0; i <= M; ++i) {
        if (law[static_cast<std::size_t>(i)] == 0) continue;
        for (const auto& [v, p] : g.points) {
            if (i + v > M) break;
            next[static_cast<std::size_t>(i + v)] += law[static_cast<std::size_t>(i)] * p;
        }
    }
    law.swap(next);
}

std::vector<Rational> prefix_sums(const std::vector<Rational>& law) {
    std::vector<Rational> c(law.size());
    Rational s(0);
    for (std::size_t i = 0; i < law.size(); ++i) {
        s += law[i];
        c[i] = s;
    }
    return c;
}

// P(S <= x) from prefix sums on the grid.
Rational cdf_from(const std::vector<Rational>& cum, const Rational& x, const BigInt& den) {
    if (x < 0 || cum.empty()) return Rational(0);
    Rational scaled = x * Rational(den);
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    long M = static_cast<long>(cum.size()) - 1;
    if (fl > M) return cum.back();
    return cum[static_cast<std::size_t>(fl.get_si())];
}

}  // namespace

BigInt grid_denominator(const std::vector<DiscreteVar>& vars, const std::vector<Rational>& extra) {
    BigInt den(1);
    for (const auto& v : vars)
        for (const auto& [x, p] : v.support()) den = common_denominator(den, x);
    for (const auto& x : extra) den = common_denominator(den, x);
    return den;
}

Rational TruncatedSumLaw::cdf(const Rational& x) const { return cdf_from(prefix_sums(probs), x, den); }

Rational TruncatedSumLaw::pmf(const Rational& x) const {
    Rational scaled = x * Rational(den);
    if (x < 0 || scaled.get_den() != 1 || scaled >= static_cast<long>(probs.size())) return Rational(0);
    return probs[static_cast<std::size_t>(scaled.get_num().get_si())];
}

TruncatedSumLaw truncated_sum_law(const std::vector<DiscreteVar>& vars, const Rational& L, const BigInt& den) {
    TruncatedSumLaw out;
    out.den = den;
    long M = grid_index(L, den);
    if (M < 0) return out;
    out.probs.assign(static_cast<std::size_t>(M + 1), Rational(0));
    out.probs[0] = 1;
    for (const auto& v : vars) convolve(out.probs, to_grid(v, den, M));
    return out;
}

TruncatedSumLaw truncated_sum_law(const std::vector<DiscreteVar>& vars, const Rational& L) {
    return truncated_sum_law(vars, L, grid_denominator(vars));
}

// ---------------------------------------------------------------- conditional law

std::map<Rational, Rational> ConditionalLaw::marginal(long i) const {
    if (i < 1 || i > j) throw ValidationError("marginal index out of range");
    std::map<Rational, Rational> out;
    for (const auto& [tuple, p] : law) out[tuple[static_cast<std::size_t>(i - 1)]] += p;
    return out;
}

Rational ConditionalLaw::prob(const std::function<bool(const std::vector<Rational>&)>& pred) const {
    Rational s(0);
    for (const auto& [tuple, p] : law)
        if (pred(tuple)) s += p;
    return s;
}

nlohmann::json ConditionalLaw::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [tuple, p] : law) {
        nlohmann::json values = nlohmann::json::array();
        for (const auto& v : tuple) values.push_back(to_string(v));
        entries.push_back({{"values", values}, {"prob", to_string(p)}, {"prob_float", to_double(p)}});
    }
    return {{"n", n},
            {"L", to_string(L)},
            {"j", j},
            {"conditioning_prob", to_string(conditioning_prob)},
            {"law", entries}};
}

ConditionalLaw conditional_law(const SumModel& model, long n, const Rational& L, long j) {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (j < 1 || j > n) throw ValidationError("need 1 <= j <= n");
    std::vector<DiscreteVar> vars = model.first(n);
    BigInt den = grid_denominator(vars);
    std::vector<DiscreteVar> head(vars.begin(), vars.begin() + j);
    std::vector<DiscreteVar> rest(vars.begin() + j, vars.end());

    double tuples = 1;
    for (const auto& v : head) tuples *= static_cast<double>(v.support().size());
    if (tuples > 1e6) throw ValidationError("too many outcome tuples for the first j variables");

    ConditionalLaw out;
    out.n = n;
    out.L = L;
    out.j = j;
    if (L < 0) throw EmptyConditioningError("P(S_n <= L) = 0");
    auto rest_law = truncated_sum_law(rest, L, den);
    auto cum = prefix_sums(rest_law.probs);

    std::vector<Rational> tuple(static_cast<std::size_t>(j));
    Rational total(0);
    std::function<void(std::size_t, const Rational&, const Rational&)> walk = [&](std::size_t i, const Rational& sum,
                                                                                  const Rational& prob) {
        if (sum > L) return;
        if (i == head.size()) {
            Rational mass = prob * cdf_from(cum, L - sum, den);
            if (mass != 0) {
                out.law[tuple] = mass;
                total += mass;
            }
            return;
        }
        for (const auto& [v, p] : head[i].support()) {
            tuple[i] = v;
            walk(i + 1, sum + v, prob * p);
        }
    };
    walk(0, Rational(0), Rational(1));
    if (total == 0) throw EmptyConditioningError("P(S_n <= L) = 0");
    for (auto& [t, p] : out.law) p /= total;
    out.conditioning_prob = total;
    return out;
}

// ---------------------------------------------------------------- resampling bound

nlohmann::json ResamplingResult::to_json() const {
    return {{"lhs", to_string(lhs)},
            {"lhs_float", to_double(lhs)},
            {"bound", bound ? nlohmann::json(to_string(*bound)) : nlohmann::json("inf")},
            {"bound_float", bound ? nlohmann::json(to_double(*bound)) : nlohmann::json(nullptr)},
            {"holds", holds}};
}

ResamplingResult resampling_bound(const SumModel& model, long n, const Rational& L, const Rational& delta,
                                  const Rational& delta_prime) {
    if (!(delta_prime > 0 && delta_prime <= delta)) throw ValidationError("need 0 < delta' <= delta");
    ConditionalLaw law = conditional_law(model, n, L, 1);
    ResamplingResult r;
    r.lhs = law.prob([&](const std::vector<Rational>& t) { return t[0] >= delta; });
    Rational sum(0);
    for (long k = 2; k <= n; ++k) sum += model.var(k).truncated_mean(delta_prime);
    Rational denom = model.var(1).prob_le(delta - delta_prime) * sum;
    if (denom == 0) {
        r.holds = true;
    } else {
        r.bound = L / denom;
        r.holds = r.lhs <= *r.bound;
    }
    return r;
}

// ---------------------------------------------------------------- trivial-limit check

nlohmann::json TrivialLimitReport::to_json() const {
    auto strings = [](const std::vector<Rational>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : v) a.push_back(to_string(x));
        return a;
    };
    return {{"tail", tail},
            {"delta_prime", to_string(delta_prime)},
            {"K", K},
            {"inf_partial_sums", strings(inf_partial_sums)},
            {"truncated_partial_sums", strings(truncated_partial_sums)},
            {"inf_sum_finite", inf_sum_finite},
            {"inf_sum", inf_sum ? nlohmann::json(to_string(*inf_sum)) : nlohmann::json("inf")},
            {"truncated_sum_diverges", truncated_sum_diverges},
            {"gap", gap ? nlohmann::json(to_string(*gap)) : nlohmann::json(nullptr)},
            {"gap_sum_diverges", gap_sum_diverges},
            {"condition_at_delta_prime", condition_at_delta_prime},
            {"gap_variant_applies", gap_variant_applies},
            {"trivial_limit_predicted", trivial_limit_predicted}};
}

TrivialLimitReport trivial_limit_check(const SumModel& model, const Rational& delta_prime, long K) {
    if (delta_prime <= 0) throw ValidationError("delta' must be positive");
    if (K < 1) throw ValidationError("K must be >= 1");
    const TailRule& tail = model.tail;
    if (tail.kind() == TailRule::Kind::Indexed) {
        throw UndecidableTailError("no summability analysis for tail rule \"" + tail.tag() + "\"");
    }
    TrivialLimitReport r;
    r.tail = tail.tag();
    r.delta_prime = delta_prime;
    r.K = K;
    Rational si(0), st(0);
    for (long k = 1; k <= K; ++k) {
        DiscreteVar v = model.var(k);
        si += v.inf();
        st += v.truncated_mean(delta_prime);
        r.inf_partial_sums.push_back(si);
        r.truncated_partial_sums.push_back(st);
    }

    const long h = static_cast<long>(model.head.size());
    Rational head_inf(0);
    std::optional<Rational> gap;
    auto take_gap = [&](const DiscreteVar& v) {
        if (auto g = v.gap()) gap = gap ? std::min(*gap, *g) : *g;
    };
    for (const auto& v : model.head) {
        head_inf += v.inf();
        take_gap(v);
    }

    // Eventual law of the tail: the sums diverge iff the eventual summand is positive. The linear rule has
    // summand p_one * 1{1 <= x} for k > x.
    std::function<Rational(const Rational&)> eventual_truncated;
    bool tail_inf_zero = false;
    switch (tail.kind()) {
        case TailRule::Kind::Iid: {
            const DiscreteVar& v = tail.iid_var();
            tail_inf_zero = v.inf() == 0;
            eventual_truncated = [v](const Rational& x) { return v.truncated_mean(x); };
            take_gap(v);
            break;
        }
        case TailRule::Kind::Linear: {
            tail_inf_zero = tail.p_zero() > 0;
            Rational p1 = tail.p_one();
            eventual_truncated = [p1](const Rational& x) { return x >= 1 ? p1 : Rational(0); };
            // Gaps are nondecreasing from k = 2 on.
            long k0 = h + 1;
            take_gap(tail.at(k0));
            take_gap(tail.at(std::max(k0 + 1, 2L)));
            break;
        }
        case TailRule::Kind::Blocks: {
            tail_inf_zero = tail.p_zero() > 0;
            long k0 = h + 1;
            long last = std::max(k0, tail.block_bounds().back());
            for (long k = k0; k <= last; ++k) take_gap(tail.at(k));
            DiscreteVar v = tail.at(last);
            eventual_truncated = [v](const Rational& x) { return v.truncated_mean(x); };
            break;
        }
        case TailRule::Kind::Indexed: break;
    }

    r.inf_sum_finite = tail_inf_zero;
    if (r.inf_sum_finite) r.inf_sum = head_inf;
    r.truncated_sum_diverges = eventual_truncated(delta_prime) > 0;
    r.condition_at_delta_prime = r.inf_sum_finite && r.truncated_sum_diverges;
    r.gap = gap;
    if (gap) {
        r.gap_sum_diverges = eventual_truncated(*gap) > 0;
        r.gap_variant_applies = r.inf_sum_finite && r.gap_sum_diverges;
        r.trivial_limit_predicted = r.gap_variant_applies;
    } else {
        // Every law is a point mass: the conditional law is trivial whenever the conditioning is possible.
        r.trivial_limit_predicted = r.inf_sum_finite;
    }
    return r;
}

// ---------------------------------------------------------------- general parity

nlohmann::json GeneralParityResult::to_json() const {
    return {{"Kstar", Kstar},
            {"limit", to_string(limit)},
            {"limit_float", to_double(limit)},
            {"p", to_string(p)},
            {"discretized", discretized}};
}

namespace {

void check_parity_inputs(const DiscreteVar& tail) {
    if (tail.prob_gt(Rational(0)) == 0) throw ValidationError("tail must satisfy P(X > 0) > 0");
    if (tail.inf() != 0) throw ValidationError("tail support infimum must be 0");
}

Rational ratio_above(const DiscreteVar& x1, const Rational& delta, const std::vector<Rational>& cum, const Rational& L,
                     const BigInt& den) {
    Rational num(0), dnm(0);
    for (const auto& [x, p] : x1.support()) {
        Rational c = p * cdf_from(cum, L - x, den);
        dnm += c;
        if (x > x1.inf() + delta) num += c;
    }
    if (dnm == 0) throw EmptyConditioningError("P(S_n <= L) = 0");
    return num / dnm;
}

}  // namespace

GeneralParityResult general_parity_limit(const DiscreteVar& x1, const DiscreteVar& tail, const Rational& L,
                                         const Rational& delta) {
    check_parity_inputs(tail);
    if (delta <= 0) throw ValidationError("delta must be positive");
    DiscreteVar pos = tail.conditioned_positive();
    BigInt den = grid_denominator({x1, tail});
    long M = grid_index(L - x1.inf(), den);
    if (M < 0) throw ValidationError("L below the support of X_1");
    GridVar g = to_grid(pos, den, M);

    std::vector<Rational> law(static_cast<std::size_t>(M + 1), Rational(0));
    law[0] = 1;
    std::vector<Rational> best;
    long k = 0;
    for (;;) {
        convolve(law, g);
        bool feasible = std::any_of(law.begin(), law.end(), [](const Rational& x) { return x != 0; });
        if (!feasible) break;
        ++k;
        best = law;
    }
    if (k == 0) throw ValidationError("L too small: P(X_1 + X'_2 <= L) = 0");

    GeneralParityResult r;
    r.Kstar = k;
    r.p = tail.prob_gt(Rational(0));
    r.discretized = x1.discretized() || tail.discretized();
    r.limit = ratio_above(x1, delta, prefix_sums(best), L, den);
    return r;
}

std::vector<Rational> convergence_to_limit_probe(const DiscreteVar& x1, const DiscreteVar& tail, const Rational& L,
                                                 const Rational& delta, const std::vector<long>& n_list) {
    check_parity_inputs(tail);
    if (delta <= 0) throw ValidationError("delta must be positive");
    for (long n : n_list)
        if (n < 1) throw ValidationError("n must be >= 1");
    BigInt den = grid_denominator({x1, tail});
    long M = grid_index(L, den);
    if (M < 0) throw EmptyConditioningError("P(S_n <= L) = 0");
    GridVar g = to_grid(tail, den, M);

    std::vector<long> order(n_list.begin(), n_list.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::map<long, Rational> value;
    std::vector<Rational> law(static_cast<std::size_t>(M + 1), Rational(0));
    law[0] = 1;
    long have = 1;  // law is that of X_2 + ... + X_have
    for (long n : order) {
        while (have < n) {
            convolve(law, g);
            ++have;
        }
        value[n] = ratio_above(x1, delta, prefix_sums(law), L, den);
    }
    std::vector<Rational> out;
    for (long n : n_list) out.push_back(value[n]);
    return out;
}

std::vector<Rational> oscillation_example(const std::vector<long>& r, const Rational& L, const std::vector<long>& n_list) {
    SumModel model = SumModel::oscillation(r);
    for (long n : n_list)
        if (n < 1) throw ValidationError("n must be >= 1");
    BigInt den(1);
    long M = grid_index(L, den);
    if (M < 0) throw EmptyConditioningError("P(S_n <= L) = 0");
    DiscreteVar x1 = model.var(1);

    std::vector<long> order(n_list.begin(), n_list.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::map<long, Rational> value;
    std::vector<Rational> law(static_cast<std::size_t>(M + 1), Rational(0));
    law[0] = 1;
    long have = 1;
    for (long n : order) {
        while (have < n) {
            ++have;
            convolve(law, to_grid(model.var(have), den, M));
        }
        // P(X_1 = 1 | S_n <= L) with I_1 = 0 and delta = 1/2.
        value[n] = ratio_above(x1, Rational(1, 2), prefix_sums(law), L, den);
    }
    std::vector<Rational> out;
    for (long n : n_list) out.push_back(value[n]);
    return out;
}

}  // namespace fpplab
