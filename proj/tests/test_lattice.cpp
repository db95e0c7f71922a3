#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fpplab/lattice.hpp"

using namespace fpplab;

namespace {

Path square_path(int n) {
    std::vector<Vertex> v;
    for (int x = -n; x < n; ++x) v.push_back({x, -n});
    for (int y = -n; y < n; ++y) v.push_back({n, y});
    for (int x = n; x > -n; --x) v.push_back({x, n});
    for (int y = n; y > -n; --y) v.push_back({-n, y});
    v.push_back({-n, -n});
    return Path(v);
}

}  // namespace

TEST_CASE("edges are stored canonically") {
    Edge a({1, 0}, {0, 0});
    Edge b({0, 0}, Direction::East);
    CHECK(a == b);
    CHECK(a.lo() == Vertex{0, 0});
    CHECK(a.direction() == Direction::East);
    CHECK(Edge({0, 1}, {0, 0}).direction() == Direction::North);
    CHECK_THROWS_AS(Edge({0, 0}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Edge({0, 0}, {0, 0}), std::invalid_argument);
    CHECK(direction_code(Direction::North) == 'N');
    CHECK(parse_direction("E") == Direction::East);
}

TEST_CASE("dual edges cross their primal edge") {
    Edge east({2, 3}, Direction::East);
    auto [a, b] = DualEdge(east).endpoints();
    CHECK(std::set<DualVertex>{a, b} == std::set<DualVertex>{{2, 2}, {2, 3}});
    Edge north({2, 3}, Direction::North);
    auto [c, d] = DualEdge(north).endpoints();
    CHECK(std::set<DualVertex>{c, d} == std::set<DualVertex>{{1, 3}, {2, 3}});
    CHECK(DualEdge::between({0, 0}, {1, 0}).primal() == Edge({1, 0}, Direction::North));
    CHECK(DualEdge::between({0, 0}, {0, 1}).primal() == Edge({0, 1}, Direction::East));
    CHECK_THROWS(DualEdge::between({0, 0}, {1, 1}));
}

TEST_CASE("box geometry") {
    Box b{2};
    CHECK(b.vertex_count() == 25);
    CHECK(b.boundary().size() == 16);
    for (Vertex v : b.boundary()) CHECK(sup_norm(v) == 2);
    // 2 * (2n)(2n+1) edges in B(n)
    CHECK(enumerate_edges(b).size() == 40);
    CHECK(enumerate_edges(Box{0}).empty());
    for (std::size_t i = 0; i < b.vertex_count(); ++i) CHECK(b.index(b.vertex(i)) == i);
}

TEST_CASE("annulus membership") {
    CHECK_THROWS(Annulus(2, 2));
    CHECK_THROWS(Annulus(0, 2));
    Annulus a(1, 3);
    CHECK_FALSE(a.contains(Vertex{1, 0}));
    CHECK(a.contains(Vertex{2, 0}));
    CHECK(a.contains(Vertex{3, -3}));
    CHECK_FALSE(a.contains(Edge({1, 0}, Direction::East)));
    CHECK(a.contains(Edge({2, 0}, Direction::East)));
}

TEST_CASE("paths and winding numbers") {
    CHECK_THROWS(Path({}));
    CHECK_THROWS(Path({{0, 0}, {2, 0}}));
    Path sq = square_path(1);
    CHECK(sq.closed());
    CHECK(sq.length() == 8);
    CHECK(winding_number(sq) == 1);
    std::vector<Vertex> rev(sq.vertices().rbegin(), sq.vertices().rend());
    CHECK(winding_number(Path(rev)) == -1);
    // A unit square not containing the origin.
    Path off({{1, 1}, {2, 1}, {2, 2}, {1, 2}, {1, 1}});
    CHECK(winding_number(off) == 0);
    CHECK_THROWS(winding_number(Path({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}})));
}

TEST_CASE("circuit validation") {
    Circuit c = Circuit::from_path(square_path(2));
    CHECK(c.vertices().size() == 16);
    CHECK(c.edges().size() == 16);
    CHECK(c.orientation() == 1);
    CHECK_NOTHROW(Circuit::from_path(square_path(2), Annulus(1, 2)));
    CHECK_THROWS(Circuit::from_path(square_path(2), Annulus(2, 3)));
    CHECK_THROWS(Circuit::from_path(Path({{1, 1}, {2, 1}, {2, 2}, {1, 2}, {1, 1}})));
    CHECK_THROWS(Circuit::from_path(Path({{1, 0}, {1, 1}, {1, 0}})));
    Circuit t = Circuit::trivial();
    CHECK(t.is_trivial());
    CHECK(t.vertices() == std::vector<Vertex>{kOrigin});
    CHECK(t.orientation() == 0);
}

TEST_CASE("canonical form ignores root and direction") {
    Path sq = square_path(1);
    std::vector<Vertex> rev(sq.vertices().rbegin(), sq.vertices().rend());
    std::vector<Vertex> shifted(sq.vertices().begin() + 3, sq.vertices().end() - 1);
    shifted.insert(shifted.end(), sq.vertices().begin(), sq.vertices().begin() + 4);
    Circuit a = Circuit::from_path(sq), b = Circuit::from_path(Path(rev)), c = Circuit::from_path(Path(shifted));
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.canonical().vertices().front() == Vertex{-1, -1});
    CHECK(b.canonical().orientation() == 1);
}

TEST_CASE("enclosed faces and nesting") {
    Circuit c1 = Circuit::from_path(square_path(1));
    Circuit c2 = Circuit::from_path(square_path(2));
    CHECK(enclosed_faces(c1).size() == 4);
    CHECK(enclosed_faces(c2).size() == 16);
    CHECK(strictly_inside(c1, c2));
    CHECK_FALSE(strictly_inside(c2, c1));
    CHECK_FALSE(strictly_inside(c2, c2));
}

TEST_CASE("weight configurations") {
    WeightConfig<Rational> cfg(Box{1});
    Edge e({0, 0}, Direction::East);
    cfg.set(e, Rational(3, 2));
    CHECK(cfg.at(e) == Rational(3, 2));
    CHECK_THROWS_AS(cfg.set(e, Rational(-1)), std::invalid_argument);
    CHECK_THROWS_AS(cfg.at(Edge({1, 0}, Direction::East)), std::out_of_range);

    auto j = to_json(cfg);
    CHECK(rational_config_from_json(j) == cfg);
    auto d = double_config_from_json(j);
    CHECK(d.at(e) == doctest::Approx(1.5));
}

TEST_CASE("circuit json round trip") {
    Circuit c = Circuit::from_path(square_path(2));
    CHECK(circuit_from_json(to_json(c)) == c);
    CHECK(circuit_from_json(to_json(Circuit::trivial())).is_trivial());
}
