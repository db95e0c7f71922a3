#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fpplab/lattice.hpp"
#include "fpplab/rational.hpp"

namespace fpplab {

enum class Cmp { Ge, Gt, Le, Lt, Eq, Ne };

/// Predicate on finitely many edge weights.
///
/// Grammar (whitespace-insensitive, keywords lowercase):
///   expr   := term ("or" term)*
///   term   := factor ("and" factor)*
///   factor := "not" factor | "(" expr ")" | "true" | "false" | atom
///   atom   := "edge" "(" int "," int "," ("E"|"N") ")" cmp number
///           | "ball" "(" int ")" cmp number          -- T(0, boundary of B(K)) compared with number
///   cmp    := ">=" | ">" | "<=" | "<" | "==" | "!="
///   number := integer, decimal or p/q
/// "or" binds looser than "and"; "not" binds tightest.
class CylinderEvent {
public:
    static CylinderEvent parse(std::string_view text);
    static CylinderEvent sure();
    static CylinderEvent null();
    static CylinderEvent edge(Edge e, Cmp cmp, const Rational& value);
    static CylinderEvent ball(int K, Cmp cmp, const Rational& value);

    CylinderEvent operator&&(const CylinderEvent& other) const;
    CylinderEvent operator||(const CylinderEvent& other) const;
    CylinderEvent operator!() const;

    bool evaluate(const WeightConfig<double>& config) const;
    bool evaluate(const WeightConfig<Rational>& config) const;

    /// Edges the event depends on, sorted. ball(K) contributes the edges of B(K) with an endpoint
    /// strictly inside B(K); edges joining two boundary vertices never matter for T(0, boundary).
    std::vector<Edge> support() const;
    /// Smallest box containing the support (0 when the support is empty).
    int radius() const;

    /// Canonical rendering; parse(to_string()) reproduces the event.
    std::string to_string() const;

    struct Node;

private:
    explicit CylinderEvent(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace fpplab
