#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qpg/bits.hpp"
#include "qpg/parallel.hpp"
#include "qpg/pauli.hpp"

namespace qpg {

struct CaseTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultMaxK = 8;

/// Commutation graph on the 4d^2-1 non-identity elements.
/// Vertex v corresponds to element index v+1; the diagonal is zero.
struct CommutationGraph {
    CaseParameter param;
    int n = 0;
    std::vector<Bitset> adj;

    bool adjacent(int u, int v) const { return adj[static_cast<size_t>(u)].test(v); }
};

inline CommutationGraph build_graph(const CaseParameter& p, int threads = 0,
                                    int max_k = kDefaultMaxK) {
    if (p.k > max_k)
        throw CaseTooLarge("case too large: k=" + std::to_string(p.k) + " exceeds cap " +
                           std::to_string(max_k));
    CommutationGraph g{p, p.element_count(), {}};
    const auto elems = all_elements(p);
    g.adj.assign(static_cast<size_t>(g.n), Bitset(g.n));
    parallel_for(g.n, threads, [&](int u, int) {
        Bitset& row = g.adj[static_cast<size_t>(u)];
        const PauliElement& e = elems[static_cast<size_t>(u)];
        for (int v = 0; v < g.n; ++v) {
            if (v == u) continue;
            if (commutes(e, elems[static_cast<size_t>(v)], p)) row.set(v);
        }
    });
    return g;
}

}  // namespace qpg
