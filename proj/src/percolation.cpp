#include "fpplab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>

#include "fpplab/circuits.hpp"
#include "fpplab/errors.hpp"
#include "fpplab/passage_time.hpp"

namespace fpplab {

UniformConfig sample_uniforms(const Box& box, Rng& rng) {
    UniformConfig u(box);
    for (const Edge& e : enumerate_edges(box)) u.mutable_slot(u.slot(e)) = uniform_open01(rng);
    return u;
}

CrossingShape parse_shape(const std::string& name) {
    if (name == "square") return CrossingShape::Square;
    if (name == "rectangle") return CrossingShape::Rectangle;
    throw ValidationError("shape must be \"square\" or \"rectangle\", got '" + name + "'");
}

std::string to_string(CrossingShape s) { return s == CrossingShape::Square ? "square" : "rectangle"; }

Box crossing_region(CrossingShape shape, int n) {
    if (n < 1) throw ValidationError("crossing size must be >= 1");
    return shape == CrossingShape::Square ? Box{n} : Box{n + 1};
}

namespace {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

private:
    std::vector<int> parent_;
};

struct WeightedLink {
    int a;
    int b;
    double u;
};

// Kruskal sweep: the label at which `from` and `to` first join when links are added in the given order.
double join_level(int nodes, std::vector<WeightedLink>& links, int from, int to, bool ascending) {
    std::sort(links.begin(), links.end(), [ascending](const WeightedLink& x, const WeightedLink& y) {
        return ascending ? x.u < y.u : x.u > y.u;
    });
    UnionFind uf(nodes);
    for (const WeightedLink& l : links) {
        uf.unite(l.a, l.b);
        if (uf.find(from) == uf.find(to)) return l.u;
    }
    return ascending ? 2.0 : -1.0;
}

// Rectangle-local vertex numbering for [x0, x1] x [y0, y1] plus two terminal nodes.
struct Grid {
    int x0, x1, y0, y1;
    int width() const { return x1 - x0 + 1; }
    int nodes() const { return width() * (y1 - y0 + 1) + 2; }
    int id(int x, int y) const { return (y - y0) * width() + (x - x0); }
    int source() const { return nodes() - 2; }
    int sink() const { return nodes() - 1; }
};

}  // namespace

double open_crossing_threshold(const UniformConfig& u, CrossingShape shape, int n) {
    Grid g = shape == CrossingShape::Square ? Grid{-n, n, -n, n} : Grid{0, n + 1, 0, n};
    if (!u.region().contains(Vertex{g.x0, g.y0}) || !u.region().contains(Vertex{g.x1, g.y1})) {
        throw std::invalid_argument("uniform configuration does not cover the crossing domain");
    }
    std::vector<WeightedLink> links;
    for (int y = g.y0; y <= g.y1; ++y) {
        links.push_back({g.source(), g.id(g.x0, y), 0.0});
        links.push_back({g.id(g.x1, y), g.sink(), 0.0});
        for (int x = g.x0; x <= g.x1; ++x) {
            if (x < g.x1) links.push_back({g.id(x, y), g.id(x + 1, y), u.at(Edge({x, y}, Direction::East))});
            bool side = shape == CrossingShape::Rectangle && (x == g.x0 || x == g.x1);
            if (y < g.y1 && !side) links.push_back({g.id(x, y), g.id(x, y + 1), u.at(Edge({x, y}, Direction::North))});
        }
    }
    return join_level(g.nodes(), links, g.source(), g.sink(), true);
}

double closed_dual_crossing_threshold(const UniformConfig& u, int n) {
    Grid g{0, n, -1, n};
    std::vector<WeightedLink> links;
    for (int i = 0; i <= n; ++i) {
        links.push_back({g.source(), g.id(i, -1), 2.0});
        links.push_back({g.id(i, n), g.sink(), 2.0});
    }
    for (int j = -1; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            // Vertical dual edge (i, j)-(i, j+1) bisects the horizontal primal edge (i, j+1)-(i+1, j+1).
            if (j < n) links.push_back({g.id(i, j), g.id(i, j + 1), u.at(Edge({i, j + 1}, Direction::East))});
            // Horizontal dual edge (i, j)-(i+1, j) bisects the vertical primal edge (i+1, j)-(i+1, j+1).
            if (i < n && j >= 0 && j < n) {
                links.push_back({g.id(i, j), g.id(i + 1, j), u.at(Edge({i + 1, j}, Direction::North))});
            }
        }
    }
    return join_level(g.nodes(), links, g.source(), g.sink(), false);
}

namespace {

constexpr long kChunk = 256;

}  // namespace

std::vector<double> crossing_thresholds(CrossingShape shape, int n, long samples, std::uint64_t seed, int workers) {
    Box region = crossing_region(shape, n);
    auto parts = run_chunks<std::vector<double>>(samples, kChunk, workers, [&](long c, long begin, long end) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
        std::vector<double> out;
        for (long i = begin; i < end; ++i) out.push_back(open_crossing_threshold(sample_uniforms(region, rng), shape, n));
        return out;
    });
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(std::max(0L, samples)));
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

EstimateReport crossing_prob(double p, int n, CrossingShape shape, long samples, std::uint64_t seed, int workers) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0,1]");
    auto thresholds = crossing_thresholds(shape, n, samples, seed, workers);
    long hits = std::count_if(thresholds.begin(), thresholds.end(), [p](double t) { return t <= p; });
    return make_report("sigma", hits, samples, seed, {{"p", p}, {"n", n}, {"shape", to_string(shape)}});
}

std::vector<int> probe_grid(int nmax) {
    std::vector<int> out;
    for (int n = 1; n <= std::min(nmax, 8); ++n) out.push_back(n);
    int n = 8;
    while (n < nmax) {
        n = std::min(nmax, (n * 3 + 1) / 2);
        out.push_back(n);
    }
    return out;
}

nlohmann::json CorrelationLengthEstimate::to_json() const {
    nlohmann::json diag = nlohmann::json::array();
    for (const auto& d : diagnostics) diag.push_back(d.to_json());
    return {{"p", p},
            {"epsilon", epsilon},
            {"value", value ? nlohmann::json(*value) : nlohmann::json("exceeds nmax")},
            {"ambiguous", ambiguous},
            {"probed", probed},
            {"diagnostics", diag}};
}

namespace {

bool straddles(const EstimateReport& r, double level) { return r.ci_lo < level && level <= r.ci_hi; }

}  // namespace

CorrelationLengthEstimate correlation_length(double p, double epsilon, int nmax, long samples, std::uint64_t seed,
                                             int workers) {
    if (!(p > 0.5 && p <= 1.0)) throw ValidationError("correlation length needs 1/2 < p <= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    if (nmax < 1) throw ValidationError("nmax must be >= 1");
    CorrelationLengthEstimate out;
    out.p = p;
    out.epsilon = epsilon;
    double level = 1.0 - epsilon;
    for (int n0 : probe_grid(nmax)) {
        auto r = crossing_prob(p, n0, CrossingShape::Square, samples, derive_seed(seed, static_cast<std::uint64_t>(n0)),
                               workers);
        out.probed.push_back(n0);
        out.diagnostics.push_back(r);
        if (straddles(r, level)) out.ambiguous = true;
        if (r.estimate >= level) {
            out.value = n0;
            break;
        }
    }
    return out;
}

nlohmann::json PkResult::to_json() const {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace) {
        steps.push_back({{"p", s.p},
                         {"L", s.L ? nlohmann::json(*s.L) : nlohmann::json(nullptr)},
                         {"accepted", s.accepted},
                         {"ambiguous", s.ambiguous},
                         {"samples", s.samples}});
    }
    return {{"p_k", p_k}, {"tolerance", tolerance}, {"ambiguous", ambiguous}, {"samples_per_size", samples_per_size},
            {"trace", steps}};
}

PkResult p_k_solve(int R, int k, double epsilon1, long samples, std::uint64_t seed, int workers, int max_doublings,
                   double tolerance) {
    if (R < 2 || k < 1) throw ValidationError("p_k needs R >= 2 and k >= 1");
    if (!(epsilon1 > 0.0 && epsilon1 < 1.0)) throw ValidationError("epsilon1 must lie in (0,1)");
    if (samples < 1) throw ValidationError("samples must be positive");
    int scale = int_pow(R, 3 * k);
    std::vector<int> sizes = probe_grid(scale);
    double level = 1.0 - epsilon1;

    long bank_size = samples;
    std::vector<std::vector<double>> bank;
    auto fill_bank = [&] {
        bank.clear();
        for (int n0 : sizes) {
            auto t = crossing_thresholds(CrossingShape::Square, n0, bank_size,
                                         derive_seed(seed, static_cast<std::uint64_t>(n0)), workers);
            std::sort(t.begin(), t.end());
            bank.push_back(std::move(t));
        }
    };
    fill_bank();

    // L_hat(p) <= scale, plus whether any probed size sits ambiguously at the threshold.
    auto evaluate = [&](double p, PkStep& step) {
        step.p = p;
        step.L.reset();
        step.ambiguous = false;
        step.samples = bank_size;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            long hits = std::upper_bound(bank[i].begin(), bank[i].end(), p) - bank[i].begin();
            auto r = make_report("sigma", hits, bank_size, 0);
            if (straddles(r, level)) step.ambiguous = true;
            if (r.estimate >= level) {
                step.L = sizes[i];
                break;
            }
        }
        step.accepted = step.L.has_value();
    };

    PkResult out;
    out.tolerance = tolerance;
    double lo = 0.5, hi = 1.0;
    while (hi - lo > tolerance) {
        double mid = 0.5 * (lo + hi);
        PkStep step{};
        evaluate(mid, step);
        for (int d = 0; step.ambiguous && d < max_doublings; ++d) {
            if (bank_size >= samples << max_doublings) break;
            bank_size *= 2;
            fill_bank();
            evaluate(mid, step);
        }
        if (step.ambiguous) out.ambiguous = true;
        out.trace.push_back(step);
        if (step.accepted) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.p_k = hi;
    out.samples_per_size = bank_size;
    return out;
}

namespace {

// Unit-capacity max flow, stopping once `want` augmenting paths are found.
class SmallFlow {
public:
    explicit SmallFlow(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

    void add_arc(int a, int b) {
        adj_[a].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({b, 1});
        adj_[b].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({a, 0});
    }

    int flow(int s, int t, int want) {
        int found = 0;
        while (found < want) {
            std::vector<int> via(adj_.size(), -1);
            std::vector<char> seen(adj_.size(), 0);
            std::queue<int> q;
            q.push(s);
            seen[s] = 1;
            while (!q.empty() && !seen[t]) {
                int v = q.front();
                q.pop();
                for (int a : adj_[v]) {
                    int w = arcs_[a].to;
                    if (arcs_[a].cap > 0 && !seen[w]) {
                        seen[w] = 1;
                        via[w] = a;
                        q.push(w);
                    }
                }
            }
            if (!seen[t]) break;
            for (int v = t; v != s;) {
                int a = via[v];
                arcs_[a].cap -= 1;
                arcs_[a ^ 1].cap += 1;
                v = arcs_[a ^ 1].to;
            }
            ++found;
        }
        return found;
    }

private:
    struct Arc {
        int to;
        int cap;
    };
    std::vector<std::vector<int>> adj_;
    std::vector<Arc> arcs_;
};

// Two vertex-disjoint paths from {start0, start1} to boundary nodes over the given usable links.
bool two_disjoint_arms(const Grid& g, int start0, int start1, const std::vector<char>& on_boundary,
                       const std::vector<std::pair<int, int>>& usable) {
    int cells = g.nodes() - 2;
    SmallFlow f(2 * cells + 2);
    int s = 2 * cells, t = 2 * cells + 1;
    for (int v = 0; v < cells; ++v) {
        f.add_arc(2 * v, 2 * v + 1);
        if (on_boundary[v]) f.add_arc(2 * v + 1, t);
    }
    for (auto [a, b] : usable) {
        f.add_arc(2 * a + 1, 2 * b);
        f.add_arc(2 * b + 1, 2 * a);
    }
    f.add_arc(s, 2 * start0);
    f.add_arc(s, 2 * start1);
    return f.flow(s, t, 2) == 2;
}

}  // namespace

bool four_arm_event(const UniformConfig& u, int r, double p) {
    if (r < 1) throw ValidationError("four-arm radius must be >= 1");
    if (u.region().n < r + 1) throw std::invalid_argument("uniform configuration must cover B(r+1)");
    const Edge e0({0, 0}, Direction::East);

    Grid primal{1 - r, r, -r, r};
    std::vector<char> pb(static_cast<std::size_t>(primal.nodes() - 2), 0);
    std::vector<std::pair<int, int>> open;
    for (int y = primal.y0; y <= primal.y1; ++y) {
        for (int x = primal.x0; x <= primal.x1; ++x) {
            if (x == primal.x0 || x == primal.x1 || y == primal.y0 || y == primal.y1) pb[primal.id(x, y)] = 1;
            Edge east({x, y}, Direction::East), north({x, y}, Direction::North);
            if (x < primal.x1 && east != e0 && u.at(east) <= p) open.emplace_back(primal.id(x, y), primal.id(x + 1, y));
            if (y < primal.y1 && u.at(north) <= p) open.emplace_back(primal.id(x, y), primal.id(x, y + 1));
        }
    }
    if (!two_disjoint_arms(primal, primal.id(0, 0), primal.id(1, 0), pb, open)) return false;

    Grid dual{-r, r, -r, r - 1};
    std::vector<char> db(static_cast<std::size_t>(dual.nodes() - 2), 0);
    std::vector<std::pair<int, int>> closed;
    for (int b = dual.y0; b <= dual.y1; ++b) {
        for (int a = dual.x0; a <= dual.x1; ++a) {
            if (a == dual.x0 || a == dual.x1 || b == dual.y0 || b == dual.y1) db[dual.id(a, b)] = 1;
            if (a < dual.x1) {
                Edge crossed = DualEdge::between({a, b}, {a + 1, b}).primal();
                if (u.at(crossed) > p) closed.emplace_back(dual.id(a, b), dual.id(a + 1, b));
            }
            if (b < dual.y1) {
                Edge crossed = DualEdge::between({a, b}, {a, b + 1}).primal();
                if (crossed != e0 && u.at(crossed) > p) closed.emplace_back(dual.id(a, b), dual.id(a, b + 1));
            }
        }
    }
    return two_disjoint_arms(dual, dual.id(0, -1), dual.id(0, 0), db, closed);
}

EstimateReport four_arm_prob(int radius, long samples, std::uint64_t seed, int workers) {
    if (radius < 1) throw ValidationError("four-arm radius must be >= 1");
    Box region{radius + 1};
    auto counts = run_chunks<long>(samples, kChunk, workers, [&](long c, long begin, long end) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
        long hits = 0;
        for (long i = begin; i < end; ++i) hits += four_arm_event(sample_uniforms(region, rng), radius) ? 1 : 0;
        return hits;
    });
    long hits = std::accumulate(counts.begin(), counts.end(), 0L);
    return make_report("pi4", hits, samples, seed, {{"radius", radius}});
}

namespace {

// Vertices of B(n) reachable from `seeds` through edges accepted by `pass`.
template <class P>
std::vector<char> reach(const Box& box, const std::vector<Vertex>& seeds, P&& pass) {
    std::vector<char> mark(box.vertex_count(), 0);
    std::vector<Vertex> stack;
    for (const Vertex& s : seeds) {
        if (!mark[box.index(s)]) {
            mark[box.index(s)] = 1;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        const Vertex nb[4] = {{v.x + 1, v.y}, {v.x - 1, v.y}, {v.x, v.y + 1}, {v.x, v.y - 1}};
        for (const Vertex& w : nb) {
            if (!box.contains(w) || mark[box.index(w)]) continue;
            if (!pass(Edge(v, w))) continue;
            mark[box.index(w)] = 1;
            stack.push_back(w);
        }
    }
    return mark;
}

}  // namespace

std::vector<Edge> O_k_witnesses(const UniformConfig& u, int k, int R, double p_k) {
    if (R < 2 || k < 0) throw ValidationError("O_k needs R >= 2 and k >= 0");
    int a = int_pow(R, 3 * k), b1 = a * R, b2 = b1 * R, c = b2 * R;
    if (u.region().n < c) throw std::invalid_argument("uniform configuration must cover B(R^{3k+3})");
    Box box{c};
    double q = 2.0 * p_k - 0.5;
    Annulus middle(b1, b2);

    auto half_open = [&](const Edge& e) { return u.at(e) <= 0.5; };
    auto inner = reach(box, Box{a}.boundary(), half_open);
    auto outer = reach(box, box.boundary(), half_open);

    // Items (1) and (2).
    std::vector<Edge> candidates;
    for (const Edge& e : enumerate_edges(Box{b2})) {
        if (!middle.contains(e)) continue;
        double ue = u.at(e);
        if (!(ue > p_k && ue < q)) continue;
        std::size_t i = box.index(e.lo()), j = box.index(e.hi());
        if ((inner[i] && outer[j]) || (inner[j] && outer[i])) candidates.push_back(e);
    }
    if (candidates.empty()) return {};

    // Item (3) says e lies on every crossing of the middle annulus through edges that are not q-closed.
    // Such a crossing exists (items (1)-(2) give one through e), so a witness must lie on the first one found.
    auto passable = [&](const Edge& f) { return !(middle.contains(f) && u.at(f) > q); };
    std::vector<long> parent(box.vertex_count(), -2);
    std::queue<Vertex> bfs;
    for (int y = -b1; y <= b1; ++y) {
        for (int x = -b1; x <= b1; ++x) {
            parent[box.index({x, y})] = -1;
            bfs.push({x, y});
        }
    }
    std::optional<Vertex> exit;
    while (!bfs.empty() && !exit) {
        Vertex v = bfs.front();
        bfs.pop();
        const Vertex nb[4] = {{v.x + 1, v.y}, {v.x - 1, v.y}, {v.x, v.y + 1}, {v.x, v.y - 1}};
        for (const Vertex& w : nb) {
            if (!box.contains(w) || parent[box.index(w)] != -2 || !passable(Edge(v, w))) continue;
            parent[box.index(w)] = static_cast<long>(box.index(v));
            if (sup_norm(w) > b2) {
                exit = w;
                break;
            }
            bfs.push(w);
        }
    }
    if (!exit) return {};
    std::vector<Edge> on_path;
    for (std::size_t v = box.index(*exit); parent[v] >= 0; v = static_cast<std::size_t>(parent[v]))
        on_path.emplace_back(box.vertex(v), box.vertex(static_cast<std::size_t>(parent[v])));
    std::sort(on_path.begin(), on_path.end());

    std::vector<Vertex> core;
    for (int y = -b1; y <= b1; ++y) {
        for (int x = -b1; x <= b1; ++x) core.push_back({x, y});
    }
    std::vector<Edge> out;
    for (const Edge& e : candidates) {
        if (!std::binary_search(on_path.begin(), on_path.end(), e)) continue;
        auto crossing = reach(box, core, [&](const Edge& f) { return f != e && passable(f); });
        bool blocked = true;
        for (std::size_t v = 0; v < box.vertex_count() && blocked; ++v) {
            if (crossing[v] && sup_norm(box.vertex(v)) > b2) blocked = false;
        }
        if (blocked) out.push_back(e);
    }
    return out;
}

Circuit square_circuit(int n) {
    if (n < 1) throw std::invalid_argument("square circuit needs n >= 1");
    std::vector<Vertex> vs;
    for (int x = -n; x < n; ++x) vs.push_back({x, -n});
    for (int y = -n; y < n; ++y) vs.push_back({n, y});
    for (int x = n; x > -n; --x) vs.push_back({x, n});
    for (int y = n; y > -n; --y) vs.push_back({-n, y});
    vs.push_back(vs.front());
    return Circuit::from_path(Path(std::move(vs))).canonical();
}

nlohmann::json OkTilt::to_json() const { return {{"middle", middle}, {"outside_open", outside_open}}; }

OkTilt OkTilt::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("tilt must be an object {middle: [4 masses], outside_open}");
    OkTilt t;
    for (const auto& [key, v] : j.items()) {
        if (key == "middle") {
            if (!v.is_array() || v.size() != 4) throw ValidationError("tilt.middle must list 4 masses");
            for (std::size_t i = 0; i < 4; ++i) t.middle[i] = v[i].get<double>();
        } else if (key == "outside_open") {
            t.outside_open = v.get<double>();
        } else {
            throw ValidationError("unknown tilt key '" + key + "'");
        }
    }
    double total = 0.0;
    for (double m : t.middle) {
        if (!(m >= 0.0)) throw ValidationError("tilt masses must be >= 0");
        total += m;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("tilt.middle masses must sum to 1");
    if (!(t.outside_open > 0.0 && t.outside_open < 1.0)) throw ValidationError("tilt.outside_open must lie in (0, 1)");
    return t;
}

UniformConfig sample_tilted_uniforms(const Box& box, const OkTilt& tilt, int k, int R, double p_k, Rng& rng) {
    int b1 = int_pow(R, 3 * k + 1);
    Annulus middle(b1, b1 * R);
    const double cuts[5] = {0.0, 0.5, p_k, 2.0 * p_k - 0.5, 1.0};
    UniformConfig u(box);
    for (const Edge& e : enumerate_edges(box)) {
        double pick = uniform_open01(rng), v = uniform_open01(rng);
        double lo, hi;
        if (middle.contains(e)) {
            int i = 0;
            double acc = tilt.middle[0];
            while (i < 3 && pick > acc) acc += tilt.middle[++i];
            lo = cuts[i];
            hi = cuts[i + 1];
        } else if (pick <= tilt.outside_open) {
            lo = 0.0;
            hi = 0.5;
        } else {
            lo = 0.5;
            hi = 1.0;
        }
        u.mutable_slot(u.slot(e)) = lo + (hi - lo) * v;
    }
    return u;
}

nlohmann::json OkSandwichReport::to_json() const {
    return {{"sampling", sampling},
            {"configs", configs},
            {"firings", firings},
            {"multiple_witnesses", multiple_witnesses},
            {"sandwich_failures", sandwich_failures},
            {"lower", lower},
            {"upper", upper},
            {"min_time", min_time},
            {"max_time", max_time}};
}

OkSandwichReport ok_sandwich_run(const WeightDistribution& dist, int k, int R, double p_k, long target_firings,
                                 long max_configs, std::uint64_t seed, int workers, const std::optional<OkTilt>& tilt) {
    if (!(p_k > 0.5 && p_k < 0.75)) throw ValidationError("p_k must lie in (1/2, 3/4) so that 2p_k - 1/2 < 1");
    int a = int_pow(R, 3 * k);
    int c = a * R * R * R;
    Box box{c};
    Circuit c1 = square_circuit(a * R);
    Circuit c2 = square_circuit(a * R * R + 1);

    OkSandwichReport out;
    if (tilt) out.sampling = "tilted " + tilt->to_json().dump();
    out.lower = dist.quantile(p_k);
    out.upper = dist.quantile(2.0 * p_k - 0.5);
    out.min_time = std::numeric_limits<double>::infinity();
    out.max_time = -std::numeric_limits<double>::infinity();

    constexpr long kConfigsPerChunk = 16;
    struct Part {
        long configs = 0, firings = 0, multiple = 0, failures = 0;
        double tmin = std::numeric_limits<double>::infinity(), tmax = -std::numeric_limits<double>::infinity();
    };
    long chunk = 0;
    int w = std::max(1, workers);
    while (out.firings < target_firings && out.configs < max_configs) {
        long batch = w;
        auto parts = run_chunks<Part>(batch, 1, w, [&](long idx, long, long) {
            Part part;
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(chunk + idx));
            for (long i = 0; i < kConfigsPerChunk; ++i) {
                UniformConfig u = tilt ? sample_tilted_uniforms(box, *tilt, k, R, p_k, rng) : sample_uniforms(box, rng);
                ++part.configs;
                auto wit = O_k_witnesses(u, k, R, p_k);
                if (wit.empty()) continue;
                ++part.firings;
                if (wit.size() > 1) ++part.multiple;
                WeightConfig<double> t(box);
                for (std::size_t s = 0; s < box.vertex_count() * 2; ++s) t.mutable_slot(s) = dist.quantile(u.at_slot(s));
                double time = t_between_circuits(t, c1, c2);
                if (!(out.lower <= time && time <= out.upper)) ++part.failures;
                part.tmin = std::min(part.tmin, time);
                part.tmax = std::max(part.tmax, time);
            }
            return part;
        });
        for (const Part& part : parts) {
            if (out.firings >= target_firings || out.configs >= max_configs) break;
            out.configs += part.configs;
            out.firings += part.firings;
            out.multiple_witnesses += part.multiple;
            out.sandwich_failures += part.failures;
            out.min_time = std::min(out.min_time, part.tmin);
            out.max_time = std::max(out.max_time, part.tmax);
            ++chunk;
        }
    }
    return out;
}

}  // namespace fpplab
