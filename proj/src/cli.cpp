#include "fpplab/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "fpplab/circuits.hpp"
#include "fpplab/conditional.hpp"
#include "fpplab/condsum.hpp"
#include "fpplab/errors.hpp"
#include "fpplab/partitions.hpp"
#include "fpplab/passage_time.hpp"
#include "fpplab/percolation.hpp"
#include "fpplab/weight_model.hpp"

#ifndef FPPLAB_VERSION
#define FPPLAB_VERSION "0.0.0"
#endif

namespace fpplab::cli {

using nlohmann::json;

std::string version() { return FPPLAB_VERSION; }

namespace {

// Key types: integer, seed (unsigned), real, rational string, rational-or-"inf", string, integer list, any JSON, bool.
enum class T { Int, Seed, Real, Rat, RatInf, Str, IntList, Any, Bool };

struct Key {
    const char* name;
    T type;
    json def;
};

using Table = std::vector<Key>;

const json kParityModel = {{"head", json::array({json::array({"0:1/2", "1:1/2"})})},
                           {"tail", {{"iid", json::array({"0:1/2", "2:1/2"})}}}};

const std::map<std::string, Table>& tables() {
    static const std::map<std::string, Table> t = {
        {"fpp.sim", {{"dist", T::Any, "bernoulli-half"}, {"n", T::Int, 8}, {"samples", T::Int, 100}, {"weights", T::Any, nullptr}}},
        {"fpp.decompose",
         {{"dist", T::Any, "bernoulli-half"}, {"n", T::Int, 64}, {"R", T::Int, 2}, {"K", T::Int, 0}, {"samples", T::Int, 10},
          {"include_circuits", T::Bool, false}}},
        {"iic.estimate",
         {{"mode", T::Str, "conditional"}, {"dist", T::Any, "bernoulli-half"}, {"event", T::Str, "ball(2) >= 1"},
          {"n", T::Int, 8}, {"L", T::RatInf, "0"}, {"budget", T::Int, 100000}, {"d1", T::Str, "true"},
          {"d2", T::Str, "true"}, {"accepted", T::Int, 10000}, {"K", T::Int, 2}, {"eta", T::Rat, "3/4"},
          {"n_list", T::IntList, json::array({8, 16, 32})}}},
        {"iic.sample", {{"dist", T::Any, "bernoulli-half"}, {"proxy_n", T::Int, 8}, {"samples", T::Int, 1}, {"event", T::Str, ""}}},
        {"perc.crossing", {{"p", T::Real, 0.5}, {"n", T::Int, 16}, {"shape", T::Str, "rectangle"}, {"samples", T::Int, 10000}}},
        {"perc.corrlen",
         {{"mode", T::Str, "corrlen"}, {"p", T::Real, 0.6}, {"epsilon", T::Real, 0.02}, {"nmax", T::Int, 64},
          {"samples", T::Int, 2000}, {"R", T::Int, 2}, {"k", T::Int, 1}, {"max_doublings", T::Int, 3},
          {"tolerance", T::Real, 1e-3}}},
        {"perc.fourarm", {{"radii", T::IntList, json::array({1, 2, 4, 8})}, {"samples", T::Int, 10000}}},
        {"perc.ok-event",
         {{"dist", T::Any, "half-uniform"}, {"k", T::Int, 1}, {"R", T::Int, 2}, {"p_k", T::Real, 0.6},
          {"firings", T::Int, 100}, {"max_configs", T::Int, 1000000}, {"tilt", T::Any, nullptr}}},
        {"condsum.law", {{"model", T::Any, kParityModel}, {"n", T::Int, 10}, {"L", T::Rat, "3"}, {"j", T::Int, 1}}},
        {"condsum.bound",
         {{"mode", T::Str, "resampling"}, {"model", T::Any, kParityModel}, {"n", T::Int, 5}, {"L", T::Rat, "1"},
          {"delta", T::Rat, "1"}, {"delta_prime", T::Rat, "1"}, {"K", T::Int, 20}}},
        {"condsum.parity", {{"p", T::Rat, "1/2"}, {"L", T::Rat, "3"}, {"n", T::Int, 50}}},
        {"condsum.general-parity",
         {{"x1", T::Any, json::array({"0:1/2", "1:1/2"})}, {"tail", T::Any, json::array({"0:1/2", "2:1/2"})},
          {"L", T::Rat, "5"}, {"delta", T::Rat, "1/2"}, {"n_list", T::IntList, json::array()}}},
        {"condsum.oscillate",
         {{"r", T::IntList, json::array({2, 10, 100, 1000})}, {"L", T::Rat, "4"},
          {"n_list", T::IntList, json::array({9, 99, 999, 1999})}}},
        {"partition.q", {{"Lmax", T::Int, 10}, {"alpha", T::Str, ""}, {"csv", T::Str, ""}}},
        {"partition.criteria",
         {{"mode", T::Str, "criteria"}, {"alpha", T::Str, "ones"}, {"N", T::Int, 30}, {"L", T::Int, 6}, {"n", T::Int, 0},
          {"p", T::Rat, "1/2"}, {"k", T::Int, 1000}}},
    };
    return t;
}

const Table& table_for(const std::string& sub) {
    auto it = tables().find(sub);
    if (it == tables().end()) throw ValidationError("unknown subcommand: " + sub);
    return it->second;
}

const Key* find_key(const Table& t, const std::string& name) {
    for (const Key& k : t)
        if (name == k.name) return &k;
    return nullptr;
}

std::string canonical_rational(const std::string& text, bool allow_inf) {
    if (allow_inf && (text == "inf" || text == "+inf")) return "inf";
    try {
        return to_string(parse_rational(text));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("bad rational \"") + text + "\": " + e.what());
    }
}

json check_value(const Key& k, const json& v) {
    const std::string name = k.name;
    switch (k.type) {
        case T::Int:
            if (!v.is_number_integer()) throw ValidationError(name + " must be an integer");
            return v.get<long>();
        case T::Seed:
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                throw ValidationError(name + " must be a nonnegative integer");
            return v.get<std::uint64_t>();
        case T::Real:
            if (!v.is_number()) throw ValidationError(name + " must be a number");
            return v.get<double>();
        case T::Rat:
        case T::RatInf:
            if (v.is_number_integer()) return canonical_rational(std::to_string(v.get<long long>()), false);
            if (!v.is_string()) throw ValidationError(name + " must be a rational string");
            return canonical_rational(v.get<std::string>(), k.type == T::RatInf);
        case T::Str:
            if (!v.is_string()) throw ValidationError(name + " must be a string");
            return v;
        case T::IntList:
            if (!v.is_array()) throw ValidationError(name + " must be a list of integers");
            for (const auto& x : v)
                if (!x.is_number_integer()) throw ValidationError(name + " must be a list of integers");
            return v;
        case T::Any: return v;
        case T::Bool:
            if (!v.is_boolean()) throw ValidationError(name + " must be true or false");
            return v;
    }
    return v;
}

// Command-line text to the JSON value expected by the key.
json from_text(const Key& k, const std::string& text) {
    try {
        switch (k.type) {
            case T::Int: {
                std::size_t pos = 0;
                long v = std::stol(text, &pos);
                if (pos != text.size()) throw std::invalid_argument("trailing characters");
                return v;
            }
            case T::Seed: {
                if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
                std::size_t pos = 0;
                unsigned long long v = std::stoull(text, &pos);
                if (pos != text.size()) throw std::invalid_argument("trailing characters");
                return static_cast<std::uint64_t>(v);
            }
            case T::Real: {
                std::size_t pos = 0;
                double v = std::stod(text, &pos);
                if (pos != text.size()) throw std::invalid_argument("trailing characters");
                return v;
            }
            case T::IntList: {
                if (!text.empty() && text.front() == '[') return json::parse(text);
                json out = json::array();
                std::stringstream ss(text);
                std::string item;
                while (std::getline(ss, item, ',')) out.push_back(from_text(Key{k.name, T::Int, nullptr}, item));
                return out;
            }
            case T::Any: {
                json parsed = json::parse(text, nullptr, false);
                return parsed.is_discarded() ? json(text) : parsed;
            }
            case T::Bool:
                if (text == "true") return true;
                if (text == "false") return false;
                throw std::invalid_argument("expected true or false");
            default: return text;
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("bad value for ") + k.name + ": \"" + text + "\" (" + e.what() + ")");
    }
}

const Key kSeedKey{"seed", T::Seed, 1};
const Key kWorkersKey{"workers", T::Int, 1};

const Key* lookup(const std::string& sub, const std::string& name) {
    if (name == "seed") return &kSeedKey;
    if (name == "workers") return &kWorkersKey;
    return find_key(table_for(sub), name);
}

// ---------------------------------------------------------------- helpers for payloads

long get_long(const json& c, const char* k) { return c.at(k).get<long>(); }
int get_int(const json& c, const char* k) {
    long v = c.at(k).get<long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) throw ValidationError(std::string(k) + " out of range");
    return static_cast<int>(v);
}
Rational get_rat(const json& c, const char* k) { return parse_rational(c.at(k).get<std::string>()); }
std::vector<long> get_list(const json& c, const char* k) { return c.at(k).get<std::vector<long>>(); }
std::uint64_t seed_of(const json& c) { return c.at("seed").get<std::uint64_t>(); }
int workers_of(const json& c) { return std::max(1, get_int(c, "workers")); }

json rational_list(const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(to_string(x));
    return out;
}

json float_list(const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(to_double(x));
    return out;
}

void require_positive(long v, const char* name) {
    if (v <= 0) throw ValidationError(std::string(name) + " must be positive");
}

// ---------------------------------------------------------------- subcommands

json run_fpp_sim(const json& c) {
    int n = get_int(c, "n");
    if (!c.at("weights").is_null()) {
        WeightConfig<Rational> cfg = rational_config_from_json(c.at("weights"));
        if (n < 1 || n > cfg.region().n) throw ValidationError("n must lie in [1, config half-side]");
        auto res = passage_time(cfg, TargetSet::vertex(Vertex{0, 0}), TargetSet::boundary(n));
        json path = json::array();
        for (const Vertex& v : res.geodesic.vertices()) path.push_back({v.x, v.y});
        return {{"mode", "exact"}, {"n", n}, {"value", to_string(res.value)}, {"value_float", to_double(res.value)},
                {"geodesic", path}};
    }
    WeightDistribution dist = WeightDistribution::from_json(c.at("dist"));
    long samples = get_long(c, "samples");
    require_positive(samples, "samples");
    if (n < 1) throw ValidationError("n must be >= 1");
    std::uint64_t seed = seed_of(c);
    auto parts = run_chunks<std::vector<double>>(samples, 256, workers_of(c), [&](long ch, long b, long e) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(ch));
        std::vector<double> vals;
        for (long i = b; i < e; ++i) vals.push_back(t_to_boundary(sample_config(dist, Box{n}, rng).weights, n));
        return vals;
    });
    std::vector<double> values;
    for (auto& p : parts) values.insert(values.end(), p.begin(), p.end());
    double sum = 0.0, lo = values.front(), hi = values.front();
    for (double v : values) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {{"mode", "sampled"}, {"n", n}, {"dist", dist.to_json()}, {"values", values},
            {"mean", sum / static_cast<double>(values.size())}, {"min", lo}, {"max", hi}};
}

json run_fpp_decompose(const json& c) {
    WeightDistribution dist = WeightDistribution::from_json(c.at("dist"));
    int n = get_int(c, "n"), R = get_int(c, "R"), K = get_int(c, "K");
    long samples = get_long(c, "samples");
    require_positive(samples, "samples");
    bool circuits = c.at("include_circuits").get<bool>();
    std::uint64_t seed = seed_of(c);
    auto parts = run_chunks<json>(samples, 1, workers_of(c), [&](long i, long, long) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
        auto cfg = sample_config(dist, Box{n}, rng);
        auto d = decompose(cfg.weights, n, R, K);
        if (circuits) return to_json(d);
        return json{{"I", d.I}, {"kappas", d.kappas}, {"total", d.total}, {"decomposed_sum", d.decomposed_sum()},
                    {"identity_holds", d.identity_holds()}};
    });
    bool all = true;
    long with_circuits = 0;
    json out = json::array();
    for (auto& p : parts) {
        if (p.contains("identity_holds")) all = all && p.at("identity_holds").get<bool>();
        if (p.at("I").get<int>() >= 1) ++with_circuits;
        out.push_back(std::move(p));
    }
    return {{"n", n}, {"R", R}, {"K", K}, {"samples", out}, {"with_circuits", with_circuits}, {"identity_holds_all", all}};
}

double parse_L(const json& c) {
    std::string L = c.at("L").get<std::string>();
    if (L == "inf") return std::numeric_limits<double>::infinity();
    return to_double(parse_rational(L));
}

json run_iic_estimate(const json& c) {
    WeightDistribution dist = WeightDistribution::from_json(c.at("dist"));
    std::string mode = c.at("mode").get<std::string>();
    std::uint64_t seed = seed_of(c);
    int workers = workers_of(c);
    if (mode == "conditional") {
        auto est = estimate_conditional(dist, CylinderEvent::parse(c.at("event").get<std::string>()), get_int(c, "n"),
                                        parse_L(c), get_long(c, "budget"), seed, workers);
        return {{"mode", mode}, {"result", est.to_json()}};
    }
    if (mode == "factorization") {
        auto rep = factorization_check(dist, CylinderEvent::parse(c.at("d1").get<std::string>()),
                                       CylinderEvent::parse(c.at("d2").get<std::string>()), get_int(c, "n"),
                                       get_long(c, "accepted"), get_long(c, "budget"), seed, workers);
        return {{"mode", mode}, {"result", rep.to_json()}};
    }
    if (mode == "convergence") {
        std::vector<int> ns;
        for (long v : get_list(c, "n_list")) ns.push_back(static_cast<int>(v));
        auto ests = convergence_probe(dist, get_int(c, "K"), get_rat(c, "eta"), parse_L(c), ns, get_long(c, "budget"),
                                      seed, workers);
        json arr = json::array();
        for (const auto& e : ests) arr.push_back(e.to_json());
        return {{"mode", mode}, {"result", arr}};
    }
    throw ValidationError("mode must be conditional, factorization or convergence");
}

json run_iic_sample(const json& c) {
    WeightDistribution dist = WeightDistribution::from_json(c.at("dist"));
    int proxy_n = get_int(c, "proxy_n");
    long samples = get_long(c, "samples");
    require_positive(samples, "samples");
    std::uint64_t seed = seed_of(c);
    std::string event = c.at("event").get<std::string>();
    json out = {{"proxy_n", proxy_n}, {"samples", samples}};
    if (!event.empty()) {
        out["estimate"] =
            estimate_nu_tilde(dist, CylinderEvent::parse(event), proxy_n, samples, seed, workers_of(c)).to_json();
        return out;
    }
    auto parts = run_chunks<json>(samples, 1, workers_of(c), [&](long i, long, long) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
        return to_json(sample_nu_tilde(dist, proxy_n, rng));
    });
    out["configs"] = parts;
    return out;
}

json run_perc_crossing(const json& c) {
    return crossing_prob(c.at("p").get<double>(), get_int(c, "n"), parse_shape(c.at("shape").get<std::string>()),
                         get_long(c, "samples"), seed_of(c), workers_of(c))
        .to_json();
}

json run_perc_corrlen(const json& c) {
    std::string mode = c.at("mode").get<std::string>();
    if (mode == "corrlen") {
        return {{"mode", mode},
                {"result", correlation_length(c.at("p").get<double>(), c.at("epsilon").get<double>(), get_int(c, "nmax"),
                                              get_long(c, "samples"), seed_of(c), workers_of(c))
                               .to_json()}};
    }
    if (mode == "pk") {
        return {{"mode", mode},
                {"result", p_k_solve(get_int(c, "R"), get_int(c, "k"), c.at("epsilon").get<double>(), get_long(c, "samples"),
                                     seed_of(c), workers_of(c), get_int(c, "max_doublings"), c.at("tolerance").get<double>())
                               .to_json()}};
    }
    throw ValidationError("mode must be corrlen or pk");
}

json run_perc_fourarm(const json& c) {
    json reports = json::array();
    auto radii = get_list(c, "radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        reports.push_back(four_arm_prob(static_cast<int>(radii[i]), get_long(c, "samples"), derive_seed(seed_of(c), i),
                                        workers_of(c))
                              .to_json());
    }
    return {{"reports", reports}};
}

json run_perc_ok(const json& c) {
    WeightDistribution dist = WeightDistribution::from_json(c.at("dist"));
    std::optional<OkTilt> tilt;
    if (!c.at("tilt").is_null()) tilt = OkTilt::from_json(c.at("tilt"));
    return ok_sandwich_run(dist, get_int(c, "k"), get_int(c, "R"), c.at("p_k").get<double>(), get_long(c, "firings"),
                           get_long(c, "max_configs"), seed_of(c), workers_of(c), tilt)
        .to_json();
}

json run_condsum_law(const json& c) {
    SumModel model = SumModel::from_json(c.at("model"));
    return conditional_law(model, get_long(c, "n"), get_rat(c, "L"), get_long(c, "j")).to_json();
}

json run_condsum_bound(const json& c) {
    SumModel model = SumModel::from_json(c.at("model"));
    std::string mode = c.at("mode").get<std::string>();
    if (mode == "resampling") {
        return {{"mode", mode},
                {"result", resampling_bound(model, get_long(c, "n"), get_rat(c, "L"), get_rat(c, "delta"),
                                            get_rat(c, "delta_prime"))
                               .to_json()}};
    }
    if (mode == "trivial-limit") {
        return {{"mode", mode}, {"result", trivial_limit_check(model, get_rat(c, "delta_prime"), get_long(c, "K")).to_json()}};
    }
    throw ValidationError("mode must be resampling or trivial-limit");
}

json run_condsum_parity(const json& c) {
    Rational p = get_rat(c, "p"), L = get_rat(c, "L");
    long n = get_long(c, "n");
    SumModel model = SumModel::parity(p);
    Rational value =
        conditional_law(model, n, L, 1).prob([](const std::vector<Rational>& v) { return v[0] == 1; });
    json out = {{"p", to_string(p)}, {"L", to_string(L)}, {"n", n}, {"value", to_string(value)},
                {"value_float", to_double(value)}};
    try {
        auto lim = general_parity_limit(model.var(1), model.var(2), L, Rational(1, 2));
        out["Kstar"] = lim.Kstar;
        out["limit"] = to_string(lim.limit);
    } catch (const ValidationError&) {
        out["Kstar"] = nullptr;  // L too small: no K* exists
        out["limit"] = nullptr;
    }
    return out;
}

json run_condsum_general(const json& c) {
    DiscreteVar x1 = DiscreteVar::from_json(c.at("x1"));
    DiscreteVar tail = DiscreteVar::from_json(c.at("tail"));
    Rational L = get_rat(c, "L"), delta = get_rat(c, "delta");
    json out = general_parity_limit(x1, tail, L, delta).to_json();
    auto ns = get_list(c, "n_list");
    auto probe = convergence_to_limit_probe(x1, tail, L, delta, ns);
    out["n_list"] = ns;
    out["probe"] = rational_list(probe);
    out["probe_float"] = float_list(probe);
    return out;
}

json run_condsum_oscillate(const json& c) {
    auto r = get_list(c, "r");
    auto ns = get_list(c, "n_list");
    Rational L = get_rat(c, "L");
    auto vals = oscillation_example(r, L, ns);
    return {{"r", r}, {"L", to_string(L)}, {"n_list", ns}, {"values", rational_list(vals)}, {"values_float", float_list(vals)}};
}

json run_partition_q(const json& c) {
    long Lmax = get_long(c, "Lmax");
    std::string alpha = c.at("alpha").get<std::string>();
    PartitionTable t = alpha.empty() ? q_distinct(Lmax) : q_multiplicity(Lmax, AlphaSequence::parse(alpha));
    json rows = json::array();
    BigInt cum(0);
    for (long L = 0; L <= t.Lmax(); ++L) {
        cum += t.q[static_cast<std::size_t>(L)];
        rows.push_back({L, t.q[static_cast<std::size_t>(L)].get_str(), cum.get_str()});
    }
    return {{"flavor", t.flavor}, {"Lmax", Lmax}, {"rows", rows}};
}

json run_partition_criteria(const json& c) {
    std::string mode = c.at("mode").get<std::string>();
    if (mode == "criteria") {
        return {{"mode", mode}, {"result", criteria_classify(AlphaSequence::parse(c.at("alpha").get<std::string>()), get_long(c, "N")).to_json()}};
    }
    if (mode == "sandwich") {
        AlphaSequence alpha = AlphaSequence::parse(c.at("alpha").get<std::string>());
        long L = get_long(c, "L");
        long n = get_long(c, "n");
        if (n == 0) {
            BigInt r = alpha.r(L);
            if (!r.fits_slong_p()) throw ValidationError("r_L too large");
            n = std::max(1L, r.get_si());
        }
        json res = sandwich_check(alpha, L, n).to_json();
        res["n"] = n;
        return {{"mode", mode}, {"result", res}};
    }
    if (mode == "hardy-ramanujan") {
        long k = get_long(c, "k");
        return {{"mode", mode}, {"result", {{"k", k}, {"ratio", hardy_ramanujan_ratio(k)}}}};
    }
    if (mode == "injective") {
        return {{"mode", mode}, {"result", injective_bound_check(get_rat(c, "p"), get_long(c, "L"), get_long(c, "n")).to_json()}};
    }
    throw ValidationError("mode must be criteria, sandwich, hardy-ramanujan or injective");
}

using Runner = json (*)(const json&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> r = {
        {"fpp.sim", run_fpp_sim},
        {"fpp.decompose", run_fpp_decompose},
        {"iic.estimate", run_iic_estimate},
        {"iic.sample", run_iic_sample},
        {"perc.crossing", run_perc_crossing},
        {"perc.corrlen", run_perc_corrlen},
        {"perc.fourarm", run_perc_fourarm},
        {"perc.ok-event", run_perc_ok},
        {"condsum.law", run_condsum_law},
        {"condsum.bound", run_condsum_bound},
        {"condsum.parity", run_condsum_parity},
        {"condsum.general-parity", run_condsum_general},
        {"condsum.oscillate", run_condsum_oscillate},
        {"partition.q", run_partition_q},
        {"partition.criteria", run_partition_criteria},
    };
    return r;
}

bool is_sampling(const std::string& sub) { return sub.rfind("fpp.", 0) == 0 || sub.rfind("iic.", 0) == 0 || sub.rfind("perc.", 0) == 0; }

json seed_schedule(const json& config) {
    std::string sub = config.at("subcommand").get<std::string>();
    if (!is_sampling(sub) || (sub == "fpp.sim" && !config.at("weights").is_null())) return nullptr;
    std::uint64_t seed = seed_of(config);
    json streams = json::array();
    for (std::uint64_t i = 0; i < 4; ++i) streams.push_back(derive_seed(seed, i));
    return {{"master", seed},
            {"rule", "stream i = splitmix64(splitmix64(master ^ (0x9E3779B97F4A7C15 * (i + 1)))) seeding mt19937_64"},
            {"first_streams", streams}};
}

// ---------------------------------------------------------------- schema

json obj_schema(std::initializer_list<std::pair<const char*, json>> props) {
    json p = json::object();
    json req = json::array();
    for (const auto& [k, t] : props) {
        p[k] = {{"type", t}};
        req.push_back(k);
    }
    return {{"$schema", "http://json-schema.org/draft-07/schema#"}, {"type", "object"}, {"required", req}, {"properties", p}};
}

const json kResultType = json::array({"object", "array"});

}  // namespace

std::vector<std::string> subcommands() {
    std::vector<std::string> out;
    for (const auto& [k, v] : tables()) out.push_back(k);
    return out;
}

json normalize_config(const json& config) {
    if (!config.is_object()) throw ValidationError("config must be a JSON object");
    if (!config.contains("subcommand") || !config.at("subcommand").is_string()) throw ValidationError("config needs a subcommand");
    std::string sub = config.at("subcommand").get<std::string>();
    const Table& t = table_for(sub);
    json out = {{"subcommand", sub}};
    for (const auto& [k, v] : config.items()) {
        if (k == "subcommand") continue;
        const Key* key = lookup(sub, k);
        if (!key) throw ValidationError("unknown key for " + sub + ": " + k);
        out[k] = check_value(*key, v);
    }
    for (const Key* key : {&kSeedKey, &kWorkersKey})
        if (!out.contains(key->name)) out[key->name] = key->def;
    for (const Key& key : t)
        if (!out.contains(key.name)) out[key.name] = check_value(key, key.def);
    return out;
}

std::string config_checksum(const json& config) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

json run_payload(const json& config) {
    std::string sub = config.at("subcommand").get<std::string>();
    return runners().at(sub)(config);
}

json run(const json& config) {
    json cfg = normalize_config(config);
    auto start = std::chrono::steady_clock::now();
    json payload = run_payload(cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {{"subcommand", cfg.at("subcommand")},
            {"version", version()},
            {"config", cfg},
            {"config_checksum", config_checksum(cfg)},
            {"wall_time_s", wall},
            {"payload", payload},
            {"seed_schedule", seed_schedule(cfg)}};
}

json replay(const json& record) {
    for (const char* k : {"version", "config", "config_checksum", "payload"})
        if (!record.contains(k)) throw ReplayError(std::string("record lacks \"") + k + "\"");
    std::string v = record.at("version").get<std::string>();
    if (v != version()) throw ReplayError("version mismatch: record " + v + ", running " + version());
    if (config_checksum(record.at("config")) != record.at("config_checksum").get<std::string>()) {
        throw ReplayError("config checksum mismatch: the config echo was modified");
    }
    json fresh = run(record.at("config"));
    if (fresh.at("payload").dump() != record.at("payload").dump()) throw ReplayError("replayed payload differs from the record");
    return fresh;
}

json payload_schema(const std::string& sub) {
    table_for(sub);
    if (sub == "fpp.sim") return obj_schema({{"mode", "string"}, {"n", "integer"}});
    if (sub == "fpp.decompose")
        return obj_schema({{"n", "integer"}, {"R", "integer"}, {"K", "integer"}, {"samples", "array"},
                           {"with_circuits", "integer"}, {"identity_holds_all", "boolean"}});
    if (sub == "iic.sample") return obj_schema({{"proxy_n", "integer"}, {"samples", "integer"}});
    if (sub == "perc.crossing")
        return obj_schema({{"quantity", "string"}, {"estimate", "number"}, {"ci_lo", "number"}, {"ci_hi", "number"},
                           {"successes", "integer"}, {"samples", "integer"}});
    if (sub == "perc.fourarm") return obj_schema({{"reports", "array"}});
    if (sub == "perc.ok-event")
        return obj_schema({{"sampling", "string"}, {"configs", "integer"}, {"firings", "integer"}, {"sandwich_failures", "integer"},
                           {"lower", "number"}, {"upper", "number"}});
    if (sub == "condsum.law")
        return obj_schema({{"n", "integer"}, {"L", "string"}, {"j", "integer"}, {"conditioning_prob", "string"}, {"law", "array"}});
    if (sub == "condsum.parity")
        return obj_schema({{"p", "string"}, {"L", "string"}, {"n", "integer"}, {"value", "string"}, {"value_float", "number"}});
    if (sub == "condsum.general-parity")
        return obj_schema({{"Kstar", "integer"}, {"limit", "string"}, {"p", "string"}, {"probe", "array"}});
    if (sub == "condsum.oscillate") return obj_schema({{"r", "array"}, {"L", "string"}, {"values", "array"}});
    if (sub == "partition.q") return obj_schema({{"flavor", "string"}, {"Lmax", "integer"}, {"rows", "array"}});
    return obj_schema({{"mode", "string"}, {"result", kResultType}});
}

std::optional<std::string> validate_against(const json& doc, const json& schema) {
    auto type_ok = [](const json& d, const json& t) {
        auto one = [&](const std::string& name) {
            if (name == "object") return d.is_object();
            if (name == "array") return d.is_array();
            if (name == "string") return d.is_string();
            if (name == "integer") return d.is_number_integer();
            if (name == "number") return d.is_number();
            if (name == "boolean") return d.is_boolean();
            if (name == "null") return d.is_null();
            return false;
        };
        if (t.is_array()) {
            for (const auto& x : t)
                if (one(x.get<std::string>())) return true;
            return false;
        }
        return one(t.get<std::string>());
    };
    if (schema.contains("type") && !type_ok(doc, schema.at("type"))) return "type mismatch: expected " + schema.at("type").dump();
    if (schema.contains("required")) {
        for (const auto& k : schema.at("required"))
            if (!doc.contains(k.get<std::string>())) return "missing key " + k.get<std::string>();
    }
    if (schema.contains("properties") && doc.is_object()) {
        for (const auto& [k, sub] : schema.at("properties").items()) {
            if (!doc.contains(k)) continue;
            if (auto e = validate_against(doc.at(k), sub)) return k + ": " + *e;
        }
    }
    if (schema.contains("items") && doc.is_array()) {
        for (const auto& x : doc)
            if (auto e = validate_against(x, schema.at("items"))) return "item: " + *e;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- entry point

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError(path + " is not valid JSON");
    return j;
}

json read_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ValidationError(path + " does not hold a JSON record");
        return j;
    }
    throw ValidationError(path + " is empty");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string csv_of(const json& payload) {
    std::string s = "L,q(L),Q(L)\n";
    for (const auto& row : payload.at("rows"))
        s += std::to_string(row[0].get<long>()) + "," + row[1].get<std::string>() + "," + row[2].get<std::string>() + "\n";
    return s;
}

int dispatch(int argc, char** argv, std::ostream& out) {
    CLI::App app{"Experiments for critical first-passage percolation and conditioned sums"};
    app.allow_extras();
    app.set_version_flag("--version", version());
    std::string sub, config_path, out_path, record_path;
    std::optional<std::string> seed_text, workers_text;
    app.add_option("subcommand", sub, "subcommand, \"replay\" or \"schema\"")->required();
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed_text, "master seed");
    app.add_option("--out", out_path, "output path for the JSON-lines record");
    app.add_option("--workers", workers_text, "worker threads");
    app.add_option("--record", record_path, "record to replay");
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, out);
    } catch (const CLI::ParseError& e) {
        throw ValidationError(e.what());
    }
    std::vector<std::string> extras = app.remaining();

    if (sub == "schema") {
        if (extras.size() != 1) throw ValidationError("usage: fpplab schema <subcommand>");
        out << payload_schema(extras[0]).dump(2) << '\n';
        return kOk;
    }
    if (sub == "replay") {
        if (record_path.empty() || !extras.empty()) throw ValidationError("usage: fpplab replay --record FILE [--out PATH]");
        json fresh = replay(read_record(record_path));
        if (out_path.empty()) out << fresh.dump() << '\n';
        else write_text(out_path, fresh.dump() + "\n");
        return kOk;
    }

    json config = json::object();
    if (!config_path.empty()) {
        config = read_json_file(config_path);
        if (!config.is_object()) throw ValidationError("config file must hold a JSON object");
        if (config.contains("subcommand") && config.at("subcommand") != sub) {
            throw ValidationError("config file is for subcommand " + config.at("subcommand").dump());
        }
    }
    config["subcommand"] = sub;
    table_for(sub);
    auto set = [&](const std::string& name, const std::string& text) {
        const Key* key = lookup(sub, name);
        if (!key) throw ValidationError("unknown key for " + sub + ": " + name);
        config[name] = from_text(*key, text);
    };
    if (seed_text) set("seed", *seed_text);
    if (workers_text) set("workers", *workers_text);
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() < 3) throw ValidationError("unexpected argument: " + tok);
        std::string name = tok.substr(2), value;
        auto eq = name.find('=');
        if (eq != std::string::npos) {
            value = name.substr(eq + 1);
            name = name.substr(0, eq);
        } else {
            if (i + 1 >= extras.size()) throw ValidationError("missing value for --" + name);
            value = extras[++i];
        }
        std::replace(name.begin(), name.end(), '-', '_');
        set(name, value);
    }

    json record = run(config);
    std::string line = record.dump() + "\n";
    if (out_path.empty()) out << line;
    else write_text(out_path, line);
    if (sub == "partition.q") {
        std::string csv_path = record.at("config").at("csv").get<std::string>();
        if (csv_path.empty() && !out_path.empty()) csv_path = out_path + ".csv";
        if (!csv_path.empty()) write_text(csv_path, csv_of(record.at("payload")));
    }
    return kOk;
}

}  // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(argc, argv, out);
    } catch (const ReplayError& e) {
        err << "replay refused: " << e.what() << '\n';
        return kReplayMismatch;
    } catch (const RareConditioningError& e) {
        err << "rare conditioning: " << e.what() << '\n';
        return kRareConditioning;
    } catch (const GridOverflowError& e) {
        err << "grid overflow: " << e.what() << '\n';
        return kGridOverflow;
    } catch (const std::invalid_argument& e) {
        err << "invalid config: " << e.what() << '\n';
        return kValidationError;
    } catch (const json::exception& e) {
        err << "invalid config: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace fpplab::cli
