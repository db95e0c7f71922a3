#include "fpplab/passage_time.hpp"

#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace fpplab {

TargetSet TargetSet::vertex(Vertex v) { return TargetSet({v}); }

TargetSet TargetSet::boundary(int n) {
    if (n < 0) throw std::invalid_argument("boundary radius must be nonnegative");
    return TargetSet(Box{n}.boundary());
}

TargetSet TargetSet::circuit(const Circuit& c) { return TargetSet(c.vertices()); }

TargetSet TargetSet::vertices(std::vector<Vertex> vs) {
    if (vs.empty()) throw std::invalid_argument("target set must be nonempty");
    return TargetSet(std::move(vs));
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

template <class W>
struct Label {
    W dist;
    int hops;
};

template <class W>
bool better(const W& d1, int h1, const W& d2, int h2) {
    return d1 < d2 || (d1 == d2 && h1 < h2);
}

// Calls f(neighbour, neighbour_index, edge_slot) for each neighbour of v inside the box.
template <class F>
void for_neighbours(const Box& box, Vertex v, F&& f) {
    std::size_t iv = box.index(v);
    if (v.x > -box.n) {
        Vertex u{v.x - 1, v.y};
        std::size_t iu = box.index(u);
        f(u, iu, iu * 2);
    }
    if (v.y > -box.n) {
        Vertex u{v.x, v.y - 1};
        std::size_t iu = box.index(u);
        f(u, iu, iu * 2 + 1);
    }
    if (v.y < box.n) f(Vertex{v.x, v.y + 1}, box.index({v.x, v.y + 1}), iv * 2 + 1);
    if (v.x < box.n) f(Vertex{v.x + 1, v.y}, box.index({v.x + 1, v.y}), iv * 2);
}

void check_inside(const Box& box, const std::vector<Vertex>& vs) {
    if (vs.empty()) throw std::invalid_argument("empty vertex set in passage-time query");
    for (const Vertex& v : vs) {
        if (!box.contains(v)) throw std::out_of_range("vertex outside configuration region");
    }
}

// Dijkstra keyed by (distance, hop count) from `seeds`; labels[i].hops < 0 marks unreached.
template <class W>
std::vector<Label<W>> label_from(const WeightConfig<W>& config, const std::vector<Vertex>& seeds) {
    const Box& box = config.region();
    std::vector<Label<W>> labels(box.vertex_count(), Label<W>{W(0), -1});
    std::vector<char> done(box.vertex_count(), 0);
    using Item = std::tuple<W, int, std::size_t>;
    auto cmp = [](const Item& a, const Item& b) {
        return better(std::get<0>(b), std::get<1>(b), std::get<0>(a), std::get<1>(a)) ||
               (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) == std::get<1>(b) && std::get<2>(a) > std::get<2>(b));
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    for (const Vertex& s : seeds) {
        std::size_t i = box.index(s);
        if (labels[i].hops != 0) {
            labels[i] = {W(0), 0};
            pq.emplace(W(0), 0, i);
        }
    }
    while (!pq.empty()) {
        auto [d, h, i] = pq.top();
        pq.pop();
        if (done[i]) continue;
        done[i] = 1;
        for_neighbours(box, box.vertex(i), [&](Vertex, std::size_t j, std::size_t slot) {
            if (done[j]) return;
            W nd = d + config.at_slot(slot);
            if (labels[j].hops < 0 || better(nd, h + 1, labels[j].dist, labels[j].hops)) {
                labels[j] = {nd, h + 1};
                pq.emplace(labels[j].dist, h + 1, j);
            }
        });
    }
    return labels;
}

}  // namespace

template <class W>
PassageResult<W> passage_time(const WeightConfig<W>& config, const TargetSet& source, const TargetSet& target) {
    const Box& box = config.region();
    check_inside(box, source.members());
    check_inside(box, target.members());
    auto labels = label_from(config, target.members());

    std::size_t best = kNone;
    for (const Vertex& s : source.members()) {
        std::size_t i = box.index(s);
        if (best == kNone || better(labels[i].dist, labels[i].hops, labels[best].dist, labels[best].hops) ||
            (labels[i].dist == labels[best].dist && labels[i].hops == labels[best].hops && s < box.vertex(best))) {
            best = i;
        }
    }

    std::vector<Vertex> walk{box.vertex(best)};
    std::size_t cur = best;
    while (labels[cur].hops > 0) {
        std::size_t next = kNone;
        Vertex next_v{};
        for_neighbours(box, box.vertex(cur), [&](Vertex u, std::size_t j, std::size_t slot) {
            if (labels[j].hops != labels[cur].hops - 1) return;
            if (!(labels[j].dist + config.at_slot(slot) == labels[cur].dist)) return;
            if (next == kNone || u < next_v) {
                next = j;
                next_v = u;
            }
        });
        if (next == kNone) throw std::logic_error("geodesic reconstruction failed");
        walk.push_back(next_v);
        cur = next;
    }
    return {labels[best].dist, Path(std::move(walk))};
}

template <class W>
W passage_value(const WeightConfig<W>& config, const std::vector<Vertex>& sources, const std::vector<Vertex>& targets) {
    const Box& box = config.region();
    check_inside(box, sources);
    check_inside(box, targets);
    std::vector<char> is_target(box.vertex_count(), 0);
    for (const Vertex& t : targets) is_target[box.index(t)] = 1;

    std::vector<W> dist(box.vertex_count(), W(0));
    std::vector<char> seen(box.vertex_count(), 0), done(box.vertex_count(), 0);
    using Item = std::pair<W, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (const Vertex& s : sources) {
        std::size_t i = box.index(s);
        if (!seen[i]) {
            seen[i] = 1;
            pq.emplace(W(0), i);
        }
    }
    while (!pq.empty()) {
        auto [d, i] = pq.top();
        pq.pop();
        if (done[i]) continue;
        if (is_target[i]) return d;
        done[i] = 1;
        for_neighbours(box, box.vertex(i), [&](Vertex, std::size_t j, std::size_t slot) {
            if (done[j]) return;
            W nd = d + config.at_slot(slot);
            if (!seen[j] || nd < dist[j]) {
                seen[j] = 1;
                dist[j] = nd;
                pq.emplace(nd, j);
            }
        });
    }
    throw std::logic_error("target unreachable inside a box");
}

template <class W>
W t_to_boundary(const WeightConfig<W>& config, int n) {
    if (n < 0 || n > config.region().n) throw std::out_of_range("boundary radius outside configuration region");
    return passage_value(config, {kOrigin}, Box{n}.boundary());
}

bool weakly_inside(const Circuit& inner, const Circuit& outer) {
    if (outer.is_trivial()) return inner.is_trivial();
    auto outer_vs = outer.vertices();
    std::set<Vertex> on_outer(outer_vs.begin(), outer_vs.end());
    for (const Vertex& v : inner.vertices()) {
        if (on_outer.count(v)) continue;
        if (winding_number_about(*outer.path(), v.x, v.y) == 0) return false;
    }
    return true;
}

template <class W>
W t_between_circuits(const WeightConfig<W>& config, const Circuit& c1, const Circuit& c2) {
    if (!weakly_inside(c1, c2)) throw std::invalid_argument("circuits are not nested");
    return passage_value(config, c1.vertices(), c2.vertices());
}

template PassageResult<double> passage_time(const WeightConfig<double>&, const TargetSet&, const TargetSet&);
template PassageResult<Rational> passage_time(const WeightConfig<Rational>&, const TargetSet&, const TargetSet&);
template double passage_value(const WeightConfig<double>&, const std::vector<Vertex>&, const std::vector<Vertex>&);
template Rational passage_value(const WeightConfig<Rational>&, const std::vector<Vertex>&, const std::vector<Vertex>&);
template double t_to_boundary(const WeightConfig<double>&, int);
template Rational t_to_boundary(const WeightConfig<Rational>&, int);
template double t_between_circuits(const WeightConfig<double>&, const Circuit&, const Circuit&);
template Rational t_between_circuits(const WeightConfig<Rational>&, const Circuit&, const Circuit&);

}  // namespace fpplab
