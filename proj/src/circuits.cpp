#include "fpplab/circuits.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <type_traits>

#include "fpplab/passage_time.hpp"

namespace fpplab {

namespace {

// Faces with lower-left corner in [-m-1, m]^2, where m = k2: the faces meeting B(k2) plus one ring outside.
class FaceGrid {
public:
    explicit FaceGrid(int m) : m_(m), side_(2 * m + 2) {}

    std::size_t size() const { return static_cast<std::size_t>(side_) * side_; }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y + m_ + 1) * side_ + static_cast<std::size_t>(x + m_ + 1);
    }
    DualVertex face(std::size_t i) const {
        return {static_cast<int>(i % side_) - m_ - 1, static_cast<int>(i / side_) - m_ - 1};
    }
    bool on_ring(DualVertex f) const { return f.x == -m_ - 1 || f.x == m_ || f.y == -m_ - 1 || f.y == m_; }

    // Calls f(neighbour_index, shared_primal_edge) for the 4 neighbours inside the grid.
    template <class F>
    void neighbours(std::size_t i, F&& f) const {
        DualVertex d = face(i);
        if (d.x > -m_ - 1) f(index(d.x - 1, d.y), Edge(Vertex{d.x, d.y}, Direction::North));
        if (d.x < m_) f(index(d.x + 1, d.y), Edge(Vertex{d.x + 1, d.y}, Direction::North));
        if (d.y > -m_ - 1) f(index(d.x, d.y - 1), Edge(Vertex{d.x, d.y}, Direction::East));
        if (d.y < m_) f(index(d.x, d.y + 1), Edge(Vertex{d.x, d.y + 1}, Direction::East));
    }

    // Flood from `seeds`, crossing only edges for which passable(edge) holds, never entering `forbidden`.
    template <class P>
    std::vector<char> flood(const std::vector<std::size_t>& seeds, P&& passable,
                            const std::vector<char>* forbidden = nullptr) const {
        std::vector<char> mark(size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t s : seeds) {
            if (forbidden && (*forbidden)[s]) continue;
            if (!mark[s]) {
                mark[s] = 1;
                stack.push_back(s);
            }
        }
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            neighbours(i, [&](std::size_t j, const Edge& e) {
                if (mark[j] || (forbidden && (*forbidden)[j]) || !passable(e)) return;
                mark[j] = 1;
                stack.push_back(j);
            });
        }
        return mark;
    }

    std::vector<std::size_t> ring() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size(); ++i) {
            if (on_ring(face(i))) out.push_back(i);
        }
        return out;
    }

    std::vector<std::size_t> inner_seeds(int k1) const {
        std::vector<std::size_t> out;
        for (int y = -k1 - 1; y <= k1; ++y) {
            for (int x = -k1 - 1; x <= k1; ++x) out.push_back(index(x, y));
        }
        return out;
    }

private:
    int m_;
    int side_;
};

template <class W>
void check_fits(const WeightConfig<W>& config, const Annulus& ann) {
    if (ann.outer() > config.region().n) throw std::invalid_argument("annulus does not fit in configuration region");
}

template <class W>
auto passable_fn(const WeightConfig<W>& config, const Annulus& ann) {
    return [&config, ann](const Edge& e) { return !(ann.contains(e) && config.at(e) == W(0)); };
}

// Region = faces in `core` plus every face it separates from the ring; returns its boundary as a circuit.
Circuit boundary_of_fill(const FaceGrid& grid, const std::vector<char>& core, const Annulus& ann) {
    auto outside = grid.flood(grid.ring(), [](const Edge&) { return true; }, &core);
    std::map<Vertex, std::vector<Vertex>> adj;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (outside[i]) continue;
        grid.neighbours(i, [&](std::size_t j, const Edge& e) {
            if (!outside[j]) return;
            adj[e.lo()].push_back(e.hi());
            adj[e.hi()].push_back(e.lo());
        });
    }
    Vertex start = adj.begin()->first;
    std::vector<Vertex> walk{start};
    Vertex prev = start;
    Vertex cur = std::min(adj[start][0], adj[start][1]);
    while (cur != start) {
        walk.push_back(cur);
        const auto& nb = adj.at(cur);
        if (nb.size() != 2) throw std::logic_error("interface vertex of degree != 2");
        Vertex next = nb[0] == prev ? nb[1] : nb[0];
        prev = cur;
        cur = next;
    }
    walk.push_back(start);
    return Circuit::from_path(Path(std::move(walk)), ann).canonical();
}

}  // namespace

template <class W>
bool has_zero_circuit(const WeightConfig<W>& config, const Annulus& ann) {
    check_fits(config, ann);
    FaceGrid grid(ann.outer());
    auto inner = grid.flood(grid.inner_seeds(ann.inner()), passable_fn(config, ann));
    for (std::size_t i : grid.ring()) {
        if (inner[i]) return false;
    }
    return true;
}

template <class W>
std::optional<Circuit> innermost_zero_circuit(const WeightConfig<W>& config, const Annulus& ann) {
    check_fits(config, ann);
    FaceGrid grid(ann.outer());
    auto inner = grid.flood(grid.inner_seeds(ann.inner()), passable_fn(config, ann));
    for (std::size_t i : grid.ring()) {
        if (inner[i]) return std::nullopt;
    }
    return boundary_of_fill(grid, inner, ann);
}

template <class W>
std::optional<Circuit> outermost_zero_circuit(const WeightConfig<W>& config, const Annulus& ann) {
    check_fits(config, ann);
    FaceGrid grid(ann.outer());
    auto outer = grid.flood(grid.ring(), passable_fn(config, ann));
    if (outer[grid.index(0, 0)]) return std::nullopt;
    // Faces not reached from outside, taken as one plain-adjacency component around the origin face.
    auto core = grid.flood({grid.index(0, 0)}, [](const Edge&) { return true; }, &outer);
    return boundary_of_fill(grid, core, ann);
}

int int_pow(int base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) {
        out *= base;
        if (out > std::numeric_limits<int>::max()) throw std::overflow_error("integer power overflow");
    }
    return static_cast<int>(out);
}

namespace {

// R^{3k+3} when it fits in int, else a sentinel larger than any box.
int scale_top(int R, int k) {
    try {
        return int_pow(R, 3 * k + 3);
    } catch (const std::overflow_error&) {
        return std::numeric_limits<int>::max();
    }
}

}  // namespace

template <class W>
bool detect_Ek(const WeightConfig<W>& config, int k, int R) {
    if (k < 0 || R < 2) throw std::invalid_argument("E_k needs k >= 0 and R >= 2");
    if (scale_top(R, k) > config.region().n) throw std::out_of_range("R^{3k+3} exceeds configuration region");
    int r0 = int_pow(R, 3 * k);
    return has_zero_circuit(config, Annulus(r0, r0 * R)) && has_zero_circuit(config, Annulus(r0 * R * R, r0 * R * R * R));
}

template <class W>
W Decomposition<W>::decomposed_sum() const {
    W s = remainder;
    for (const W& t : t_minus) s += t;
    for (const W& t : t_plus) s += t;
    return s;
}

template <class W>
bool Decomposition<W>::identity_holds() const {
    if (I == 0) return true;
    if constexpr (std::is_floating_point_v<W>) {
        return std::abs(decomposed_sum() - total) <= 1e-9 * (1.0 + std::abs(total));
    } else {
        return decomposed_sum() == total;
    }
}

template <class W>
Decomposition<W> decompose(const WeightConfig<W>& config, int n, int R, int K) {
    if (R < 2) throw std::invalid_argument("decompose needs R >= 2");
    if (K < 0) throw std::invalid_argument("decompose needs K >= 0");
    if (n > config.region().n) throw std::invalid_argument("n exceeds configuration region");
    if (scale_top(R, K) > n) throw std::invalid_argument("decompose needs R^{3K+3} <= n");

    Decomposition<W> d;
    d.n = n;
    d.R = R;
    d.K = K;
    d.total = t_to_boundary(config, n);
    for (int k = K; scale_top(R, k) <= n; ++k) {
        if (!detect_Ek(config, k, R)) continue;
        int r0 = int_pow(R, 3 * k);
        d.kappas.push_back(k);
        if (d.kappas.size() == 1) {
            d.circuits_minus.push_back(Circuit::trivial());
        } else {
            d.circuits_minus.push_back(*innermost_zero_circuit(config, Annulus(r0, r0 * R)));
        }
        d.circuits_plus.push_back(*outermost_zero_circuit(config, Annulus(r0 * R * R, r0 * R * R * R)));
    }
    d.I = static_cast<int>(d.kappas.size());
    if (d.I == 0) return d;
    for (int i = 0; i < d.I; ++i) {
        if (i == 0) {
            d.t_minus.push_back(W(0));
        } else {
            d.t_minus.push_back(t_between_circuits(config, d.circuits_plus[i - 1], d.circuits_minus[i]));
        }
        d.t_plus.push_back(t_between_circuits(config, d.circuits_minus[i], d.circuits_plus[i]));
    }
    d.remainder = passage_value(config, d.circuits_plus.back().vertices(), Box{n}.boundary());
    return d;
}

nlohmann::json to_json(const Decomposition<double>& d) {
    nlohmann::json cm = nlohmann::json::array(), cp = nlohmann::json::array();
    for (const auto& c : d.circuits_minus) cm.push_back(to_json(c));
    for (const auto& c : d.circuits_plus) cp.push_back(to_json(c));
    return {{"n", d.n},
            {"R", d.R},
            {"K", d.K},
            {"kappas", d.kappas},
            {"I", d.I},
            {"circuits_minus", cm},
            {"circuits_plus", cp},
            {"t_minus", d.t_minus},
            {"t_plus", d.t_plus},
            {"remainder", d.remainder},
            {"total", d.total},
            {"identity_holds", d.identity_holds()}};
}

EstimateReport estimate_F_prob(const WeightDistribution& dist, int l, int ratio, long samples, std::uint64_t seed,
                               int workers) {
    if (l < 1 || ratio < 2) throw std::invalid_argument("estimate_F_prob needs l >= 1 and ratio >= 2");
    Annulus ann(l, l * ratio);
    Box box{l * ratio};
    constexpr long kChunk = 1000;
    auto counts = run_chunks<long>(samples, kChunk, workers, [&](long c, long begin, long end) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
        long hits = 0;
        for (long i = begin; i < end; ++i) {
            auto sc = sample_config(dist, box, rng);
            hits += has_zero_circuit(sc.weights, ann) ? 1 : 0;
        }
        return hits;
    });
    long hits = 0;
    for (long h : counts) hits += h;
    return make_report("P(F(l, ratio*l))", hits, samples, seed, {{"l", l}, {"ratio", ratio}});
}

template bool has_zero_circuit(const WeightConfig<double>&, const Annulus&);
template bool has_zero_circuit(const WeightConfig<Rational>&, const Annulus&);
template std::optional<Circuit> innermost_zero_circuit(const WeightConfig<double>&, const Annulus&);
template std::optional<Circuit> innermost_zero_circuit(const WeightConfig<Rational>&, const Annulus&);
template std::optional<Circuit> outermost_zero_circuit(const WeightConfig<double>&, const Annulus&);
template std::optional<Circuit> outermost_zero_circuit(const WeightConfig<Rational>&, const Annulus&);
template bool detect_Ek(const WeightConfig<double>&, int, int);
template bool detect_Ek(const WeightConfig<Rational>&, int, int);
template struct Decomposition<double>;
template struct Decomposition<Rational>;
template Decomposition<double> decompose(const WeightConfig<double>&, int, int, int);
template Decomposition<Rational> decompose(const WeightConfig<Rational>&, int, int, int);

}  // namespace fpplab
