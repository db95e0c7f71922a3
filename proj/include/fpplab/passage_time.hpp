#pragma once

#include <vector>

#include "fpplab/lattice.hpp"

namespace fpplab {

/// A nonempty vertex set used as the source or target of a passage-time query.
class TargetSet {
public:
    static TargetSet vertex(Vertex v);
    /// The boundary of B(n).
    static TargetSet boundary(int n);
    /// Vertices of a circuit ({0} for the trivial circuit).
    static TargetSet circuit(const Circuit& c);
    /// Throws std::invalid_argument when empty.
    static TargetSet vertices(std::vector<Vertex> vs);

    const std::vector<Vertex>& members() const { return members_; }

private:
    explicit TargetSet(std::vector<Vertex> vs) : members_(std::move(vs)) {}
    std::vector<Vertex> members_;
};

template <class W>
struct PassageResult {
    W value;
    Path geodesic;
};

/// Minimal total weight over lattice paths inside the configuration's box from any source vertex to any
/// target vertex, with a geodesic attaining it. Among geodesics the returned one has the fewest edges,
/// and among those the lexicographically smallest vertex sequence.
/// Throws std::out_of_range when a source or target vertex lies outside the box.
template <class W>
PassageResult<W> passage_time(const WeightConfig<W>& config, const TargetSet& source, const TargetSet& target);

/// Value-only variant of passage_time (no geodesic bookkeeping).
template <class W>
W passage_value(const WeightConfig<W>& config, const std::vector<Vertex>& sources, const std::vector<Vertex>& targets);

/// T(0, boundary of B(n)); throws std::out_of_range when n exceeds the configuration box.
template <class W>
W t_to_boundary(const WeightConfig<W>& config, int n);

/// T(c1, c2). Requires every vertex of c1 to lie on c2 or inside it; throws std::invalid_argument otherwise.
template <class W>
W t_between_circuits(const WeightConfig<W>& config, const Circuit& c1, const Circuit& c2);

/// True when every vertex of `inner` lies on `outer` or strictly inside it.
bool weakly_inside(const Circuit& inner, const Circuit& outer);

}  // namespace fpplab
