#include "fpplab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fpplab {

char direction_code(Direction d) { return d == Direction::East ? 'E' : 'N'; }

Direction parse_direction(std::string_view code) {
    if (code == "E") return Direction::East;
    if (code == "N") return Direction::North;
    throw std::invalid_argument("edge direction must be \"E\" or \"N\", got '" + std::string(code) + "'");
}

Edge::Edge(Vertex p, Vertex q) {
    int dist = std::abs(p.x - q.x) + std::abs(p.y - q.y);
    if (dist != 1) throw std::invalid_argument("edge endpoints must be nearest neighbours");
    lo_ = std::min(p, q);
    hi_ = std::max(p, q);
}

Edge::Edge(Vertex base, Direction d)
    : Edge(base, d == Direction::East ? Vertex{base.x + 1, base.y} : Vertex{base.x, base.y + 1}) {}

DualEdge DualEdge::between(DualVertex a, DualVertex b) {
    if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) {
        throw std::invalid_argument("dual edge endpoints must be nearest neighbours");
    }
    if (a > b) std::swap(a, b);
    if (a.x == b.x) {
        // Vertical dual edge from (x+1/2, y+1/2) to (x+1/2, y+3/2) bisects the horizontal primal edge at height y+1.
        return DualEdge(Edge(Vertex{a.x, a.y + 1}, Direction::East));
    }
    // Horizontal dual edge bisects the vertical primal edge at abscissa x+1.
    return DualEdge(Edge(Vertex{a.x + 1, a.y}, Direction::North));
}

std::pair<DualVertex, DualVertex> DualEdge::endpoints() const {
    Vertex v = primal_.lo();
    if (primal_.direction() == Direction::East) return {DualVertex{v.x, v.y - 1}, DualVertex{v.x, v.y}};
    return {DualVertex{v.x - 1, v.y}, DualVertex{v.x, v.y}};
}

DualEdge dual_of(Edge e) { return DualEdge(e); }
Edge primal_of(const DualEdge& d) { return d.primal(); }

std::vector<Vertex> Box::boundary() const {
    std::vector<Vertex> out;
    for (int x = -n; x <= n; ++x) {
        for (int y = -n; y <= n; ++y) {
            if (on_boundary({x, y})) out.push_back({x, y});
        }
    }
    return out;
}

Annulus::Annulus(int k1, int k2) : k1_(k1), k2_(k2) {
    if (k1 < 1 || k2 <= k1) {
        throw std::invalid_argument("annulus requires 1 <= k1 < k2, got (" + std::to_string(k1) + ", " +
                                    std::to_string(k2) + ")");
    }
}

std::vector<Edge> enumerate_edges(const Box& box) {
    if (box.n < 0) throw std::invalid_argument("box half-side must be nonnegative");
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(4) * box.n * box.side());
    for (int x = -box.n; x <= box.n; ++x) {
        for (int y = -box.n; y <= box.n; ++y) {
            if (y < box.n) out.emplace_back(Vertex{x, y}, Direction::North);
            if (x < box.n) out.emplace_back(Vertex{x, y}, Direction::East);
        }
    }
    return out;
}

Path::Path(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw std::invalid_argument("path must contain at least one vertex");
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const Vertex& a = vertices_[i];
        const Vertex& b = vertices_[i + 1];
        if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) {
            throw std::invalid_argument("consecutive path vertices must be adjacent");
        }
    }
}

std::vector<Edge> Path::edges() const {
    std::vector<Edge> out;
    out.reserve(length());
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) out.emplace_back(vertices_[i], vertices_[i + 1]);
    return out;
}

int winding_number_about(const Path& path, double px, double py) {
    if (!path.closed()) throw std::invalid_argument("winding number needs a closed path");
    const auto& vs = path.vertices();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        double ax = vs[i].x - px, ay = vs[i].y - py;
        double bx = vs[i + 1].x - px, by = vs[i + 1].y - py;
        if ((ax == 0.0 && ay == 0.0) || (bx == 0.0 && by == 0.0)) {
            throw std::invalid_argument("path passes through the winding centre");
        }
        total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

int winding_number(const Path& path) { return winding_number_about(path, 0.0, 0.0); }

Circuit Circuit::trivial() { return Circuit(); }

Circuit Circuit::from_path(const Path& path, std::optional<Annulus> region) {
    if (!path.closed()) throw std::invalid_argument("circuit must be a closed path");
    const auto& vs = path.vertices();
    std::set<Vertex> seen(vs.begin(), vs.end() - 1);
    if (seen.size() != vs.size() - 1) throw std::invalid_argument("circuit must be vertex self-avoiding");
    if (seen.count(kOrigin)) throw std::invalid_argument("circuit passes through the origin");
    int w = winding_number(path);
    if (w != 1 && w != -1) throw std::invalid_argument("circuit must wind once around the origin");
    if (region) {
        for (const Vertex& v : seen) {
            if (!region->contains(v)) throw std::invalid_argument("circuit leaves its annulus");
        }
    }
    Circuit c;
    c.path_ = path;
    c.region_ = region;
    return c;
}

std::vector<Vertex> Circuit::vertices() const {
    if (!path_) return {kOrigin};
    const auto& vs = path_->vertices();
    return {vs.begin(), vs.end() - 1};
}

std::vector<Edge> Circuit::edges() const {
    if (!path_) return {};
    return path_->edges();
}

int Circuit::orientation() const { return path_ ? winding_number(*path_) : 0; }

Circuit Circuit::canonical() const {
    if (!path_) return *this;
    std::vector<Vertex> cyc = vertices();
    if (orientation() < 0) std::reverse(cyc.begin(), cyc.end());
    auto it = std::min_element(cyc.begin(), cyc.end());
    std::rotate(cyc.begin(), it, cyc.end());
    cyc.push_back(cyc.front());
    Circuit c;
    c.path_ = Path(std::move(cyc));
    c.region_ = region_;
    return c;
}

bool Circuit::operator==(const Circuit& other) const {
    if (is_trivial() || other.is_trivial()) return is_trivial() == other.is_trivial();
    return canonical().path_->vertices() == other.canonical().path_->vertices();
}

std::vector<DualVertex> enclosed_faces(const Circuit& c) {
    if (c.is_trivial()) return {};
    auto vs = c.vertices();
    int xmin = vs[0].x, xmax = vs[0].x, ymin = vs[0].y, ymax = vs[0].y;
    for (const auto& v : vs) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    std::vector<DualVertex> out;
    for (int x = xmin; x < xmax; ++x) {
        for (int y = ymin; y < ymax; ++y) {
            if (winding_number_about(*c.path(), x + 0.5, y + 0.5) != 0) out.push_back({x, y});
        }
    }
    return out;
}

bool strictly_inside(const Circuit& inner, const Circuit& outer) {
    if (outer.is_trivial()) return false;
    auto outer_vs = outer.vertices();
    std::set<Vertex> on_outer(outer_vs.begin(), outer_vs.end());
    for (const Vertex& v : inner.vertices()) {
        if (on_outer.count(v)) return false;
        if (winding_number_about(*outer.path(), v.x, v.y) == 0) return false;
    }
    return true;
}

namespace {

template <class W, class Render>
nlohmann::json config_to_json(const WeightConfig<W>& cfg, Render render) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : enumerate_edges(cfg.region())) {
        std::string dir(1, direction_code(e.direction()));
        edges.push_back({e.lo().x, e.lo().y, dir, render(cfg.at(e))});
    }
    return {{"n", cfg.region().n}, {"edges", edges}};
}

template <class W, class Parse>
WeightConfig<W> config_from_json(const nlohmann::json& j, Parse parse) {
    int n = j.at("n").get<int>();
    if (n < 0) throw std::invalid_argument("configuration half-side must be nonnegative");
    WeightConfig<W> cfg(Box{n});
    std::size_t expected = enumerate_edges(Box{n}).size();
    const auto& edges = j.at("edges");
    if (edges.size() != expected) throw std::invalid_argument("configuration must list every edge of its box");
    std::set<Edge> seen;
    for (const auto& item : edges) {
        Edge e(Vertex{item.at(0).get<int>(), item.at(1).get<int>()},
               parse_direction(item.at(2).get<std::string>()));
        if (!seen.insert(e).second) throw std::invalid_argument("duplicate edge in configuration");
        cfg.set(e, parse(item.at(3)));
    }
    return cfg;
}

}  // namespace

nlohmann::json to_json(const WeightConfig<Rational>& cfg) {
    return config_to_json(cfg, [](const Rational& w) { return to_string(w); });
}

nlohmann::json to_json(const WeightConfig<double>& cfg) {
    return config_to_json(cfg, [](double w) { return w; });
}

WeightConfig<Rational> rational_config_from_json(const nlohmann::json& j) {
    return config_from_json<Rational>(j, [](const nlohmann::json& w) {
        return parse_rational(w.is_string() ? w.get<std::string>() : w.dump());
    });
}

WeightConfig<double> double_config_from_json(const nlohmann::json& j) {
    return config_from_json<double>(j, [](const nlohmann::json& w) {
        return w.is_string() ? to_double(parse_rational(w.get<std::string>())) : w.get<double>();
    });
}

nlohmann::json to_json(const Circuit& c) {
    nlohmann::json out = nlohmann::json::array();
    for (const Vertex& v : c.vertices()) out.push_back({v.x, v.y});
    return out;
}

Circuit circuit_from_json(const nlohmann::json& j, std::optional<Annulus> region) {
    std::vector<Vertex> vs;
    for (const auto& item : j) vs.push_back({item.at(0).get<int>(), item.at(1).get<int>()});
    if (vs.size() == 1 && vs[0] == kOrigin) return Circuit::trivial();
    if (vs.empty()) throw std::invalid_argument("circuit must list at least one vertex");
    vs.push_back(vs.front());
    return Circuit::from_path(Path(std::move(vs)), region);
}

}  // namespace fpplab
