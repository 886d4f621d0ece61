#pragma once

#include <algorithm>
#include <vector>

#include "qpg/commutation_graph.hpp"

namespace qpg {

/// A point of the geometry: a maximal set of mutually commuting elements,
/// stored as strictly increasing 1-based element indices.
struct MaximalCommutingSet {
    std::vector<int> members;

    friend bool operator==(const MaximalCommutingSet&, const MaximalCommutingSet&) = default;
    friend bool operator<(const MaximalCommutingSet& a, const MaximalCommutingSet& b) {
        return a.members < b.members;
    }
};

namespace detail {

// Pivoting Bron-Kerbosch over bit rows. R is the growing clique, P the
// candidates, X the excluded vertices; pivot maximizes |P & N(u)| over P|X.
class CliqueSearch {
public:
    CliqueSearch(const std::vector<Bitset>& adj, std::vector<std::vector<int>>& out)
        : adj_(adj), out_(out) {}

    void expand(std::vector<int>& r, Bitset& p, Bitset& x) {
        if (p.none()) {
            if (x.none()) {
                out_.push_back(r);
                std::sort(out_.back().begin(), out_.back().end());
            }
            return;
        }
        int pivot = -1, best = -1;
        auto consider = [&](int u) {
            const int c = p.and_count(adj_[static_cast<size_t>(u)]);
            if (c > best) {
                best = c;
                pivot = u;
            }
        };
        p.for_each_bit(consider);
        x.for_each_bit(consider);

        std::vector<int> ext;
        p.for_each_bit([&](int v) {
            if (!adj_[static_cast<size_t>(pivot)].test(v)) ext.push_back(v);
        });
        for (int v : ext) {
            Bitset np = p & adj_[static_cast<size_t>(v)];
            Bitset nx = x & adj_[static_cast<size_t>(v)];
            r.push_back(v);
            expand(r, np, nx);
            r.pop_back();
            p.reset(v);
            x.set(v);
        }
    }

private:
    const std::vector<Bitset>& adj_;
    std::vector<std::vector<int>>& out_;
};

}  // namespace detail

/// All maximal cliques of the commutation graph, as 1-based element index
/// sets, each sorted internally, the list sorted lexicographically.
inline std::vector<MaximalCommutingSet> enumerate_maximal_sets(const CommutationGraph& g,
                                                               int threads = 0) {
    const int n = g.n;
    const int workers = resolve_thread_count(threads);
    std::vector<std::vector<std::vector<int>>> found(static_cast<size_t>(workers));

    // Each vertex v roots the subtree of cliques whose minimum vertex is v:
    // P keeps the later neighbours, X the earlier ones.
    parallel_for(n, workers, [&](int v, int w) {
        const Bitset& nv = g.adj[static_cast<size_t>(v)];
        Bitset p(n), x(n);
        nv.for_each_bit([&](int u) {
            if (u > v)
                p.set(u);
            else
                x.set(u);
        });
        std::vector<int> r{v};
        detail::CliqueSearch search(g.adj, found[static_cast<size_t>(w)]);
        search.expand(r, p, x);
    });

    std::vector<MaximalCommutingSet> sets;
    for (auto& bucket : found)
        for (auto& clique : bucket) {
            MaximalCommutingSet s;
            s.members.reserve(clique.size());
            for (int v : clique) s.members.push_back(v + 1);
            sets.push_back(std::move(s));
        }
    std::sort(sets.begin(), sets.end());
    return sets;
}

/// 3*2^(k+2) - 9: matches the enumerated counts for k = 2..5 and is a
/// conjecture beyond that.
inline long long predicted_set_count(int k) { return 3 * (1LL << (k + 2)) - 9; }

}  // namespace qpg
