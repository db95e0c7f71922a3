#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fpplab/rational.hpp"

namespace fpplab {

struct Vertex {
    int x = 0;
    int y = 0;
    auto operator<=>(const Vertex&) const = default;
};

inline constexpr Vertex kOrigin{0, 0};

inline int sup_norm(Vertex v) { return std::max(v.x < 0 ? -v.x : v.x, v.y < 0 ? -v.y : v.y); }

enum class Direction : std::uint8_t { East = 0, North = 1 };

char direction_code(Direction d);
Direction parse_direction(std::string_view code);

/// Nearest-neighbour edge of Z^2, stored with its lexicographically smaller endpoint first.
class Edge {
public:
    /// Throws std::invalid_argument unless p and q are at L1 distance exactly 1.
    Edge(Vertex p, Vertex q);
    Edge(Vertex base, Direction d);

    Vertex lo() const { return lo_; }
    Vertex hi() const { return hi_; }
    Direction direction() const { return hi_.x == lo_.x ? Direction::North : Direction::East; }
    Vertex other(Vertex v) const { return v == lo_ ? hi_ : lo_; }
    bool has_endpoint(Vertex v) const { return v == lo_ || v == hi_; }

    auto operator<=>(const Edge&) const = default;

private:
    Vertex lo_;
    Vertex hi_;
};

/// Vertex of the dual lattice, identified by the lower-left primal corner of its face:
/// DualVertex{x, y} sits at (x + 1/2, y + 1/2).
struct DualVertex {
    int x = 0;
    int y = 0;
    auto operator<=>(const DualVertex&) const = default;
};

class DualEdge {
public:
    explicit DualEdge(Edge primal) : primal_(primal) {}
    /// The dual edge joining two adjacent dual vertices.
    static DualEdge between(DualVertex a, DualVertex b);

    Edge primal() const { return primal_; }
    std::pair<DualVertex, DualVertex> endpoints() const;

    auto operator<=>(const DualEdge&) const = default;

private:
    Edge primal_;
};

DualEdge dual_of(Edge e);
Edge primal_of(const DualEdge& d);

/// B(n) = [-n, n]^2.
struct Box {
    int n = 0;

    int side() const { return 2 * n + 1; }
    std::size_t vertex_count() const { return static_cast<std::size_t>(side()) * side(); }
    bool contains(Vertex v) const { return sup_norm(v) <= n; }
    bool contains(const Edge& e) const { return contains(e.lo()) && contains(e.hi()); }
    bool on_boundary(Vertex v) const { return sup_norm(v) == n; }

    std::size_t index(Vertex v) const {
        return static_cast<std::size_t>(v.y + n) * side() + static_cast<std::size_t>(v.x + n);
    }
    Vertex vertex(std::size_t idx) const {
        return {static_cast<int>(idx % side()) - n, static_cast<int>(idx / side()) - n};
    }

    std::vector<Vertex> boundary() const;
    auto operator<=>(const Box&) const = default;
};

/// Ann(k1, k2) = B(k2) \ B(k1), as a vertex set: k1 < |v|_inf <= k2.
/// An edge belongs to the annulus when both endpoints do.
class Annulus {
public:
    /// Throws std::invalid_argument unless 1 <= k1 < k2.
    Annulus(int k1, int k2);

    int inner() const { return k1_; }
    int outer() const { return k2_; }
    bool contains(Vertex v) const {
        int r = sup_norm(v);
        return r > k1_ && r <= k2_;
    }
    bool contains(const Edge& e) const { return contains(e.lo()) && contains(e.hi()); }

    auto operator<=>(const Annulus&) const = default;

private:
    int k1_;
    int k2_;
};

/// Every edge with both endpoints in the box, each once, in canonical order.
std::vector<Edge> enumerate_edges(const Box& box);

/// Alternating vertex/edge sequence; edges are implied by consecutive vertices.
class Path {
public:
    /// Throws std::invalid_argument when empty or when consecutive vertices are not adjacent.
    explicit Path(std::vector<Vertex> vertices);

    const std::vector<Vertex>& vertices() const { return vertices_; }
    std::vector<Edge> edges() const;
    std::size_t length() const { return vertices_.size() - 1; }
    bool closed() const { return vertices_.size() > 1 && vertices_.front() == vertices_.back(); }

    bool operator==(const Path&) const = default;

private:
    std::vector<Vertex> vertices_;
};

/// Signed number of turns of a closed path about `point`, by summing signed angle increments.
/// Throws std::invalid_argument on open paths or when a vertex coincides with the point.
int winding_number_about(const Path& path, double px, double py);
int winding_number(const Path& path);

/// Closed vertex-self-avoiding lattice path with winding number +-1 about the origin,
/// or the distinguished trivial circuit {0}.
class Circuit {
public:
    static Circuit trivial();
    /// Validates closure, self-avoidance, winding +-1, and (when given) containment in `region`.
    static Circuit from_path(const Path& path, std::optional<Annulus> region = std::nullopt);

    bool is_trivial() const { return !path_.has_value(); }
    /// Distinct vertices in traversal order (the closing vertex is not repeated). {0} when trivial.
    std::vector<Vertex> vertices() const;
    std::vector<Edge> edges() const;
    const std::optional<Path>& path() const { return path_; }
    const std::optional<Annulus>& region() const { return region_; }
    /// Orientation +1 (counterclockwise) or -1; 0 for the trivial circuit.
    int orientation() const;

    /// Same vertex cycle, re-rooted at its smallest vertex and traversed counterclockwise.
    Circuit canonical() const;

    bool operator==(const Circuit& other) const;

private:
    Circuit() = default;
    std::optional<Path> path_;
    std::optional<Annulus> region_;
};

/// Faces (as dual vertices) enclosed by a nontrivial circuit.
std::vector<DualVertex> enclosed_faces(const Circuit& c);
/// True when every vertex of `inner` lies strictly inside `outer`.
bool strictly_inside(const Circuit& inner, const Circuit& outer);

/// Edge weights on a box. W is the numeric carrier: Rational for exact identities, double for Monte Carlo.
template <class W>
class WeightConfig {
public:
    explicit WeightConfig(Box region, const W& fill = W(0))
        : region_(region), weights_(region.vertex_count() * 2, fill) {}

    const Box& region() const { return region_; }

    std::size_t slot(const Edge& e) const {
        if (!region_.contains(e)) throw std::out_of_range("edge outside configuration region");
        return region_.index(e.lo()) * 2 + static_cast<std::size_t>(e.direction());
    }
    const W& at(const Edge& e) const { return weights_[slot(e)]; }
    void set(const Edge& e, const W& w) {
        if (w < W(0)) throw std::invalid_argument("negative edge weight");
        weights_[slot(e)] = w;
    }
    /// Unchecked slot access for hot loops; slot must come from slot().
    const W& at_slot(std::size_t s) const { return weights_[s]; }
    W& mutable_slot(std::size_t s) { return weights_[s]; }

    bool operator==(const WeightConfig& other) const = default;

private:
    Box region_;
    std::vector<W> weights_;
};

/// {"n": n, "edges": [[x, y, "E"|"N", w], ...]} listing every edge of B(n). Rational weights are written as
/// "p/q" strings; either reader accepts strings or JSON numbers.
nlohmann::json to_json(const WeightConfig<Rational>& cfg);
nlohmann::json to_json(const WeightConfig<double>& cfg);
WeightConfig<Rational> rational_config_from_json(const nlohmann::json& j);
WeightConfig<double> double_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j, std::optional<Annulus> region = std::nullopt);

}  // namespace fpplab
