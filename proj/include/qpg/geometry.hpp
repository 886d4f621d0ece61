#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qpg/cliques.hpp"

namespace qpg {

/// A line: three mutually collinear points whose pairwise member
/// intersections coincide in a single core of 2^k - 1 elements.
struct Line {
    std::array<int, 3> points{};  // ascending point ids
    std::vector<int> core;        // shared element indices, ascending
};

/// A 15-point subgeometry validated as the generalized quadrangle of order
/// two: point ids and the ids of the 15 lines lying inside.
struct Doily {
    std::vector<int> points;  // ascending, size 15
    std::vector<int> lines;   // ascending line ids, size 15
};

/// Three doilies through a common carrier line.
struct Pencil {
    int carrier = -1;               // line id
    std::array<int, 3> doilies{};  // ascending doily ids
};

/// The point-line incidence geometry for one k: points are the maximal
/// commuting sets, two points are collinear iff they share 2^k - 1 elements.
struct GeometrySnapshot {
    int k = 0;
    int d = 0;
    int element_count = 0;
    std::vector<MaximalCommutingSet> points;  // canonical (lex) order
    std::vector<Bitset> members;              // per point, bit i <-> element index i+1
    std::vector<Bitset> adj;                  // point-level collinearity
    std::vector<Line> lines;
    std::vector<std::vector<int>> lines_through;  // point id -> line ids
    std::vector<char> exceptional;
    std::map<int, long long> spectrum;  // |intersection| -> unordered pair count
    std::vector<std::string> violations;

    int point_count() const { return static_cast<int>(points.size()); }
    bool collinear(int p, int q) const { return adj[static_cast<size_t>(p)].test(q); }

    /// Line id through a collinear pair, or -1.
    int line_between(int p, int q) const {
        if (p > q) std::swap(p, q);
        const auto it = line_of_pair_.find((static_cast<uint64_t>(p) << 32) | static_cast<uint32_t>(q));
        return it == line_of_pair_.end() ? -1 : it->second;
    }

    // filled by detect_lines
    std::unordered_map<uint64_t, int> line_of_pair_;
};

inline bool is_subset_of(const Bitset& a, const Bitset& b) {
    for (size_t i = 0; i < a.word_count(); ++i)
        if (a.word(i) & ~b.word(i)) return false;
    return true;
}

/// Collinearity, intersection spectrum and exceptional/ordinary
/// classification in one pairwise pass.
inline void classify_exceptional(GeometrySnapshot& s) {
    const int np = s.point_count();
    s.exceptional.assign(static_cast<size_t>(np), 1);
    for (int p = 0; p < np; ++p)
        for (int q = 0; q < np; ++q)
            if (q != p && !s.members[static_cast<size_t>(p)].intersects(s.members[static_cast<size_t>(q)])) {
                s.exceptional[static_cast<size_t>(p)] = 0;
                break;
            }
}

/// Lines are the collinearity triangles whose three pairwise cores coincide.
/// Validates that every collinear pair lies in exactly one such triangle.
inline void detect_lines(GeometrySnapshot& s) {
    const int np = s.point_count();
    s.lines.clear();
    s.line_of_pair_.clear();
    s.lines_through.assign(static_cast<size_t>(np), {});

    for (int p = 0; p < np; ++p) {
        s.adj[static_cast<size_t>(p)].for_each_bit([&](int q) {
            if (q <= p) return;
            const Bitset core = s.members[static_cast<size_t>(p)] & s.members[static_cast<size_t>(q)];
            const int core_size = core.count();
            Bitset both = s.adj[static_cast<size_t>(p)] & s.adj[static_cast<size_t>(q)];
            both.for_each_bit([&](int r) {
                if (r <= q) return;
                const Bitset& mr = s.members[static_cast<size_t>(r)];
                if (!is_subset_of(core, mr)) return;
                if (s.members[static_cast<size_t>(p)].and_count(mr) != core_size) return;
                if (s.members[static_cast<size_t>(q)].and_count(mr) != core_size) return;
                Line line;
                line.points = {p, q, r};
                line.core = core.to_indices();
                for (int& e : line.core) ++e;  // back to 1-based element indices
                s.lines.push_back(std::move(line));
            });
        });
    }
    std::sort(s.lines.begin(), s.lines.end(),
              [](const Line& a, const Line& b) { return a.points < b.points; });

    std::map<std::pair<int, int>, int> pair_line_count;
    for (int id = 0; id < static_cast<int>(s.lines.size()); ++id) {
        const auto& pts = s.lines[static_cast<size_t>(id)].points;
        for (int i = 0; i < 3; ++i) {
            s.lines_through[static_cast<size_t>(pts[static_cast<size_t>(i)])].push_back(id);
            for (int j = i + 1; j < 3; ++j) {
                ++pair_line_count[{pts[static_cast<size_t>(i)], pts[static_cast<size_t>(j)]}];
                s.line_of_pair_[(static_cast<uint64_t>(pts[static_cast<size_t>(i)]) << 32) |
                                static_cast<uint32_t>(pts[static_cast<size_t>(j)])] = id;
            }
        }
    }
    for (int p = 0; p < np; ++p)
        s.adj[static_cast<size_t>(p)].for_each_bit([&](int q) {
            if (q <= p) return;
            const auto it = pair_line_count.find({p, q});
            const int c = it == pair_line_count.end() ? 0 : it->second;
            if (c != 1) {
                std::ostringstream msg;
                msg << "line axiom violated: collinear pair (" << p << "," << q << ") lies in "
                    << c << " valid triangles";
                s.violations.push_back(msg.str());
            }
        });
}

inline GeometrySnapshot build_geometry(const std::vector<MaximalCommutingSet>& sets,
                                       const CaseParameter& p, int threads = 0) {
    GeometrySnapshot s;
    s.k = p.k;
    s.d = p.d;
    s.element_count = p.element_count();
    s.points = sets;
    std::sort(s.points.begin(), s.points.end());

    const int np = s.point_count();
    s.members.assign(static_cast<size_t>(np), Bitset(s.element_count));
    for (int i = 0; i < np; ++i)
        for (int e : s.points[static_cast<size_t>(i)].members)
            s.members[static_cast<size_t>(i)].set(e - 1);

    s.adj.assign(static_cast<size_t>(np), Bitset(np));
    const int workers = resolve_thread_count(threads);
    std::vector<std::map<int, long long>> spectra(static_cast<size_t>(workers));
    parallel_for(np, workers, [&](int i, int w) {
        for (int j = 0; j < np; ++j) {
            if (j == i) continue;
            const int c = s.members[static_cast<size_t>(i)].and_count(s.members[static_cast<size_t>(j)]);
            if (c == p.core_size()) s.adj[static_cast<size_t>(i)].set(j);
            if (j > i) ++spectra[static_cast<size_t>(w)][c];
        }
    });
    for (const auto& sp : spectra)
        for (const auto& [card, cnt] : sp) s.spectrum[card] += cnt;

    detect_lines(s);
    classify_exceptional(s);
    return s;
}

/// Full GQ(2,2) validation of a candidate point set; nullopt means valid.
inline std::optional<std::string> validate_doily(const GeometrySnapshot& s,
                                                 const std::vector<int>& pts) {
    if (pts.size() != 15) return "point count != 15";
    std::vector<int> internal_lines;
    for (int id = 0; id < static_cast<int>(s.lines.size()); ++id) {
        const auto& lp = s.lines[static_cast<size_t>(id)].points;
        if (std::binary_search(pts.begin(), pts.end(), lp[0]) &&
            std::binary_search(pts.begin(), pts.end(), lp[1]) &&
            std::binary_search(pts.begin(), pts.end(), lp[2]))
            internal_lines.push_back(id);
    }
    if (internal_lines.size() != 15) {
        return "internal line count " + std::to_string(internal_lines.size()) + " != 15";
    }

    // induced collinearity: srg(15,6,1,3)
    auto adjacent = [&](int a, int b) { return s.collinear(pts[static_cast<size_t>(a)], pts[static_cast<size_t>(b)]); };
    for (int a = 0; a < 15; ++a) {
        int deg = 0;
        for (int b = 0; b < 15; ++b)
            if (b != a && adjacent(a, b)) ++deg;
        if (deg != 6) return "induced degree != 6 at local point " + std::to_string(a);
    }
    for (int a = 0; a < 15; ++a)
        for (int b = a + 1; b < 15; ++b) {
            int common = 0;
            for (int c = 0; c < 15; ++c)
                if (c != a && c != b && adjacent(a, c) && adjacent(b, c)) ++common;
            const int want = adjacent(a, b) ? 1 : 3;
            if (common != want)
                return "srg parameter violated at local pair (" + std::to_string(a) + "," +
                       std::to_string(b) + "): common=" + std::to_string(common);
        }

    // 3 lines per point; GQ axiom (iii) for every anti-flag
    std::vector<int> lines_at(15, 0);
    for (int id : internal_lines)
        for (int v : s.lines[static_cast<size_t>(id)].points)
            ++lines_at[static_cast<size_t>(std::lower_bound(pts.begin(), pts.end(), v) - pts.begin())];
    for (int a = 0; a < 15; ++a)
        if (lines_at[static_cast<size_t>(a)] != 3)
            return "lines through local point " + std::to_string(a) + " != 3";
    for (int x : pts)
        for (int id : internal_lines) {
            const auto& lp = s.lines[static_cast<size_t>(id)].points;
            if (x == lp[0] || x == lp[1] || x == lp[2]) continue;
            int met = 0;
            for (int y : lp)
                if (s.collinear(x, y)) ++met;
            if (met != 1)
                return "GQ axiom (iii) violated: point " + std::to_string(x) + " sees " +
                       std::to_string(met) + " points of line " + std::to_string(id);
        }

    // no three lines pairwise meeting in three distinct points
    auto meet = [&](int a, int b) -> int {
        for (int u : s.lines[static_cast<size_t>(a)].points)
            for (int v : s.lines[static_cast<size_t>(b)].points)
                if (u == v) return u;
        return -1;
    };
    for (size_t i = 0; i < internal_lines.size(); ++i)
        for (size_t j = i + 1; j < internal_lines.size(); ++j) {
            const int mij = meet(internal_lines[i], internal_lines[j]);
            if (mij < 0) continue;
            for (size_t l = j + 1; l < internal_lines.size(); ++l) {
                const int mil = meet(internal_lines[i], internal_lines[l]);
                const int mjl = meet(internal_lines[j], internal_lines[l]);
                if (mil < 0 || mjl < 0) continue;
                if (mij != mil || mij != mjl)
                    return "incidence triangle among lines " + std::to_string(internal_lines[i]) +
                           "," + std::to_string(internal_lines[j]) + "," +
                           std::to_string(internal_lines[l]);
            }
        }
    return std::nullopt;
}

namespace detail {

// Backtracking extraction of all 15-point line-closed sub-GQ(2,2)s.
//
// Seeds: for each point p (taken as the minimum point of the doily) and each
// choice of three mutually compatible lines through p, grow the set by
// (a) third-point-of-line closure whenever a line has two points inside and
// (b) branching on a new line through a point that has fewer than three.
// Sets are pruned as soon as an axiom can no longer be satisfied.
class DoilySearch {
public:
    explicit DoilySearch(const GeometrySnapshot& s) : s_(s), np_(s.point_count()) {}

    std::set<std::vector<int>> run() {
        for (int p = 0; p < np_; ++p) seed_point(p);
        return found_;
    }

    /// Saturated 15-point candidates that failed full validation; expected
    /// empty, surfaced as violations otherwise.
    const std::map<std::vector<int>, std::string>& rejected() const { return rejected_; }

private:
    struct State {
        Bitset in;                    // points currently in the candidate
        std::vector<int> members;     // same, as list
        std::vector<int8_t> line_cnt;  // per line id: how many of its points are in
        std::vector<int8_t> full_at;   // per point id: full lines through it
        std::vector<int> full_lines;
        Bitset forbidden;             // line ids already exhausted at an ancestor
        std::vector<int> queue;       // forced additions pending
        bool dead = false;
    };

    const GeometrySnapshot& s_;
    int np_;
    int seed_min_ = 0;
    std::set<std::vector<int>> found_;
    std::map<std::vector<int>, std::string> rejected_;

    void seed_point(int p) {
        seed_min_ = p;
        const auto& lp = s_.lines_through[static_cast<size_t>(p)];
        std::vector<int> usable;
        for (int id : lp) {
            const auto& pts = s_.lines[static_cast<size_t>(id)].points;
            bool ok = true;
            for (int v : pts)
                if (v < p) ok = false;
            if (ok) usable.push_back(id);
        }
        const int m = static_cast<int>(usable.size());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int l = j + 1; l < m; ++l) seed_tripod(p, usable[static_cast<size_t>(i)], usable[static_cast<size_t>(j)], usable[static_cast<size_t>(l)]);
    }

    void seed_tripod(int p, int a, int b, int c) {
        State st;
        st.in = Bitset(np_);
        st.line_cnt.assign(s_.lines.size(), 0);
        st.full_at.assign(static_cast<size_t>(np_), 0);
        st.forbidden = Bitset(static_cast<int>(s_.lines.size()));
        add_point(st, p);
        for (int id : {a, b, c})
            for (int v : s_.lines[static_cast<size_t>(id)].points)
                if (!st.in.test(v)) add_point(st, v);
        if (st.dead) return;
        propagate(st);
        if (!st.dead) recurse(st);
    }

    void add_point(State& st, int x) {
        if (st.dead || st.in.test(x)) return;
        if (x < seed_min_ || static_cast<int>(st.members.size()) >= 15) {
            st.dead = true;
            return;
        }
        // lambda check: an edge inside the candidate admits exactly the
        // third point of its line as common neighbour
        Bitset nbrs = s_.adj[static_cast<size_t>(x)] & st.in;
        bool ok = true;
        nbrs.for_each_bit([&](int y) {
            if (!ok) return;
            const int line = s_.line_between(x, y);
            if (line < 0) {
                ok = false;
                return;
            }
            int third = -1;
            for (int v : s_.lines[static_cast<size_t>(line)].points)
                if (v != x && v != y) third = v;
            Bitset common = nbrs & s_.adj[static_cast<size_t>(y)];
            common.for_each_bit([&](int w) {
                if (w != third) ok = false;
            });
        });
        if (!ok) {
            st.dead = true;
            return;
        }
        // every already-full line must be seen from x in exactly one point
        for (int id : st.full_lines) {
            const auto& lp = s_.lines[static_cast<size_t>(id)].points;
            if (x == lp[0] || x == lp[1] || x == lp[2]) continue;
            int met = 0;
            for (int y : lp)
                if (s_.collinear(x, y)) ++met;
            if (met != 1) {
                st.dead = true;
                return;
            }
        }

        st.in.set(x);
        st.members.push_back(x);
        for (int id : s_.lines_through[static_cast<size_t>(x)]) {
            const int8_t c = ++st.line_cnt[static_cast<size_t>(id)];
            if (c == 2) {
                for (int v : s_.lines[static_cast<size_t>(id)].points)
                    if (!st.in.test(v)) st.queue.push_back(v);
            } else if (c == 3) {
                if (st.forbidden.test(id)) {
                    st.dead = true;  // already exhausted at an ancestor branch
                    return;
                }
                st.full_lines.push_back(id);
                for (int v : s_.lines[static_cast<size_t>(id)].points) {
                    if (++st.full_at[static_cast<size_t>(v)] > 3) {
                        st.dead = true;
                        return;
                    }
                }
                // newly full line must be met by every candidate point off it
                for (int z : st.members) {
                    const auto& lp = s_.lines[static_cast<size_t>(id)].points;
                    if (z == lp[0] || z == lp[1] || z == lp[2]) continue;
                    int met = 0;
                    for (int y : lp)
                        if (s_.collinear(z, y)) ++met;
                    if (met != 1) {
                        st.dead = true;
                        return;
                    }
                }
            }
        }
    }

    void propagate(State& st) {
        while (!st.dead && !st.queue.empty()) {
            const int x = st.queue.back();
            st.queue.pop_back();
            add_point(st, x);
        }
    }

    void recurse(State& st) {
        propagate(st);
        if (st.dead) return;
        const int size = static_cast<int>(st.members.size());
        if (size == 15) {
            for (int v : st.members)
                if (st.full_at[static_cast<size_t>(v)] != 3) return;
            std::vector<int> pts = st.members;
            std::sort(pts.begin(), pts.end());
            if (const auto err = validate_doily(s_, pts))
                rejected_.emplace(std::move(pts), *err);
            else
                found_.insert(std::move(pts));
            return;
        }
        // branch on the point with the fewest candidate lines
        int branch_point = -1;
        std::vector<int> branch_lines;
        for (int v : st.members) {
            if (st.full_at[static_cast<size_t>(v)] >= 3) continue;
            std::vector<int> cand;
            for (int id : s_.lines_through[static_cast<size_t>(v)]) {
                if (st.line_cnt[static_cast<size_t>(id)] != 1 || st.forbidden.test(id)) continue;
                const auto& lp = s_.lines[static_cast<size_t>(id)].points;
                bool ok = true;
                for (int u : lp)
                    if (u < seed_min_) ok = false;
                if (ok) cand.push_back(id);
            }
            if (st.full_at[static_cast<size_t>(v)] + static_cast<int>(cand.size()) < 3) return;
            if (branch_point < 0 || cand.size() < branch_lines.size()) {
                branch_point = v;
                branch_lines = std::move(cand);
            }
        }
        if (branch_point < 0) return;  // all points saturated below 15 points: dead end
        for (int id : branch_lines) {
            State child = st;
            for (int v : s_.lines[static_cast<size_t>(id)].points)
                if (!child.in.test(v)) add_point(child, v);
            if (!child.dead) recurse(child);
            st.forbidden.set(id);
        }
    }
};

}  // namespace detail

/// All doilies of the snapshot, canonically sorted. Appends violations if
/// the doily union fails to cover every point.
inline std::vector<Doily> enumerate_doilies(GeometrySnapshot& s) {
    detail::DoilySearch search(s);
    const auto found = search.run();
    for (const auto& [pts, why] : search.rejected()) {
        std::ostringstream msg;
        msg << "doily candidate {";
        for (size_t i = 0; i < pts.size(); ++i) msg << (i ? "," : "") << pts[i];
        msg << "} rejected: " << why;
        s.violations.push_back(msg.str());
    }
    std::vector<Doily> doilies;
    doilies.reserve(found.size());
    for (const auto& pts : found) {
        Doily d;
        d.points = pts;
        for (int id = 0; id < static_cast<int>(s.lines.size()); ++id) {
            const auto& lp = s.lines[static_cast<size_t>(id)].points;
            if (std::binary_search(pts.begin(), pts.end(), lp[0]) &&
                std::binary_search(pts.begin(), pts.end(), lp[1]) &&
                std::binary_search(pts.begin(), pts.end(), lp[2]))
                d.lines.push_back(id);
        }
        doilies.push_back(std::move(d));
    }
    Bitset covered(s.point_count());
    for (const auto& d : doilies)
        for (int v : d.points) covered.set(v);
    if (covered.count() != s.point_count())
        s.violations.push_back("doily union covers " + std::to_string(covered.count()) + " of " +
                               std::to_string(s.point_count()) + " points");
    return doilies;
}

/// Every line lying in two or more doilies must lie in exactly three; those
/// lines are the pencil carriers.
inline std::vector<Pencil> detect_pencils(GeometrySnapshot& s, const std::vector<Doily>& doilies) {
    std::map<int, std::vector<int>> line_doilies;
    for (int di = 0; di < static_cast<int>(doilies.size()); ++di)
        for (int id : doilies[static_cast<size_t>(di)].lines) line_doilies[id].push_back(di);

    std::vector<Pencil> pencils;
    for (const auto& [line, ds] : line_doilies) {
        if (ds.size() < 2) continue;
        if (ds.size() != 3) {
            s.violations.push_back("pencil arity violated: line " + std::to_string(line) +
                                   " lies in " + std::to_string(ds.size()) + " doilies");
            continue;
        }
        Pencil pc;
        pc.carrier = line;
        std::copy(ds.begin(), ds.end(), pc.doilies.begin());
        // the three doilies must pairwise intersect exactly in the carrier
        const auto& lp = s.lines[static_cast<size_t>(line)].points;
        const std::vector<int> carrier_pts(lp.begin(), lp.end());
        for (int i = 0; i < 3 && pc.carrier >= 0; ++i)
            for (int j = i + 1; j < 3; ++j) {
                std::vector<int> inter;
                std::set_intersection(doilies[static_cast<size_t>(pc.doilies[static_cast<size_t>(i)])].points.begin(),
                                      doilies[static_cast<size_t>(pc.doilies[static_cast<size_t>(i)])].points.end(),
                                      doilies[static_cast<size_t>(pc.doilies[static_cast<size_t>(j)])].points.begin(),
                                      doilies[static_cast<size_t>(pc.doilies[static_cast<size_t>(j)])].points.end(),
                                      std::back_inserter(inter));
                if (inter != carrier_pts) {
                    s.violations.push_back("pencil doilies " + std::to_string(pc.doilies[static_cast<size_t>(i)]) + "," +
                                           std::to_string(pc.doilies[static_cast<size_t>(j)]) +
                                           " do not meet exactly in carrier line " +
                                           std::to_string(line));
                }
            }
        pencils.push_back(pc);
    }
    std::sort(pencils.begin(), pencils.end(),
              [](const Pencil& a, const Pencil& b) { return a.carrier < b.carrier; });
    return pencils;
}

/// Abstract point-line structure for isomorphism testing.
struct InducedGeometry {
    std::vector<int> point_ids;  // ids in the parent snapshot
    std::vector<Bitset> adj;     // re-indexed collinearity
    std::vector<std::array<int, 3>> lines;  // re-indexed, sorted triples

    int size() const { return static_cast<int>(point_ids.size()); }
    int edge_count() const {
        int e = 0;
        for (const auto& row : adj) e += row.count();
        return e / 2;
    }
};

inline InducedGeometry induce(const GeometrySnapshot& s, const std::vector<int>& ids) {
    InducedGeometry g;
    g.point_ids = ids;
    const int n = static_cast<int>(ids.size());
    std::unordered_map<int, int> local;
    for (int i = 0; i < n; ++i) local[ids[static_cast<size_t>(i)]] = i;
    g.adj.assign(static_cast<size_t>(n), Bitset(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (s.collinear(ids[static_cast<size_t>(i)], ids[static_cast<size_t>(j)])) {
                g.adj[static_cast<size_t>(i)].set(j);
                g.adj[static_cast<size_t>(j)].set(i);
            }
    for (const auto& line : s.lines) {
        const auto a = local.find(line.points[0]);
        const auto b = local.find(line.points[1]);
        const auto c = local.find(line.points[2]);
        if (a == local.end() || b == local.end() || c == local.end()) continue;
        std::array<int, 3> t{a->second, b->second, c->second};
        std::sort(t.begin(), t.end());
        g.lines.push_back(t);
    }
    std::sort(g.lines.begin(), g.lines.end());
    return g;
}

/// Induced structure on the exceptional points; a line survives iff all of
/// its three points are exceptional.
inline InducedGeometry exceptional_subgeometry(const GeometrySnapshot& s) {
    std::vector<int> ids;
    for (int p = 0; p < s.point_count(); ++p)
        if (s.exceptional[static_cast<size_t>(p)]) ids.push_back(p);
    return induce(s, ids);
}

inline InducedGeometry as_abstract(const GeometrySnapshot& s) {
    std::vector<int> ids(static_cast<size_t>(s.point_count()));
    for (int p = 0; p < s.point_count(); ++p) ids[static_cast<size_t>(p)] = p;
    return induce(s, ids);
}

namespace detail {

// Iterative partition refinement: colors seeded by (degree, lines through
// the point), refined by sorted neighbour color multisets. Shared signature
// table keeps color ids comparable across the two structures.
inline bool refine_colors(const InducedGeometry& a, const InducedGeometry& b,
                          std::vector<int>& ca, std::vector<int>& cb) {
    const int na = a.size(), nb = b.size();
    std::vector<int> lta(static_cast<size_t>(na), 0), ltb(static_cast<size_t>(nb), 0);
    for (const auto& t : a.lines)
        for (int v : t) ++lta[static_cast<size_t>(v)];
    for (const auto& t : b.lines)
        for (int v : t) ++ltb[static_cast<size_t>(v)];

    std::map<std::pair<int, int>, int> seed;
    auto seed_color = [&](int deg, int lt) {
        return seed.emplace(std::make_pair(deg, lt), static_cast<int>(seed.size())).first->second;
    };
    ca.resize(static_cast<size_t>(na));
    cb.resize(static_cast<size_t>(nb));
    for (int i = 0; i < na; ++i) ca[static_cast<size_t>(i)] = seed_color(a.adj[static_cast<size_t>(i)].count(), lta[static_cast<size_t>(i)]);
    for (int i = 0; i < nb; ++i) cb[static_cast<size_t>(i)] = seed_color(b.adj[static_cast<size_t>(i)].count(), ltb[static_cast<size_t>(i)]);

    for (int round = 0; round < na + 1; ++round) {
        std::map<std::vector<int>, int> table;
        auto next = [&](const InducedGeometry& g, const std::vector<int>& c, int i) {
            std::vector<int> sig{c[static_cast<size_t>(i)]};
            std::vector<int> nc;
            g.adj[static_cast<size_t>(i)].for_each_bit([&](int j) { nc.push_back(c[static_cast<size_t>(j)]); });
            std::sort(nc.begin(), nc.end());
            sig.insert(sig.end(), nc.begin(), nc.end());
            return table.emplace(std::move(sig), static_cast<int>(table.size())).first->second;
        };
        std::vector<int> nca(static_cast<size_t>(na)), ncb(static_cast<size_t>(nb));
        for (int i = 0; i < na; ++i) nca[static_cast<size_t>(i)] = next(a, ca, i);
        for (int i = 0; i < nb; ++i) ncb[static_cast<size_t>(i)] = next(b, cb, i);

        std::map<int, int> ha, hb;
        for (int c : nca) ++ha[c];
        for (int c : ncb) ++hb[c];
        if (ha != hb) return false;  // color histograms must agree

        if (nca == ca && ncb == cb) break;
        ca.swap(nca);
        cb.swap(ncb);
    }
    return true;
}

inline bool extend_mapping(const InducedGeometry& a, const InducedGeometry& b,
                           const std::vector<int>& order, size_t depth, std::vector<int>& map,
                           std::vector<char>& used, const std::vector<int>& ca,
                           const std::vector<int>& cb,
                           const std::function<bool(const std::vector<int>&)>& accept) {
    if (depth == order.size()) return accept(map);
    const int u = order[depth];
    for (int v = 0; v < b.size(); ++v) {
        if (used[static_cast<size_t>(v)] || ca[static_cast<size_t>(u)] != cb[static_cast<size_t>(v)]) continue;
        bool ok = true;
        for (size_t i = 0; i < depth && ok; ++i) {
            const int w = order[i];
            if (a.adj[static_cast<size_t>(u)].test(w) != b.adj[static_cast<size_t>(v)].test(map[static_cast<size_t>(w)])) ok = false;
        }
        if (!ok) continue;
        map[static_cast<size_t>(u)] = v;
        used[static_cast<size_t>(v)] = 1;
        if (extend_mapping(a, b, order, depth + 1, map, used, ca, cb, accept)) return true;
        used[static_cast<size_t>(v)] = 0;
        map[static_cast<size_t>(u)] = -1;
    }
    return false;
}

}  // namespace detail

/// Collinearity-preserving bijection between two structures, or nullopt.
/// A found witness is re-verified on every pair in both directions and must
/// map lines onto lines.
inline std::optional<std::vector<int>> isomorphic(const InducedGeometry& a,
                                                  const InducedGeometry& b) {
    if (a.size() != b.size() || a.edge_count() != b.edge_count() ||
        a.lines.size() != b.lines.size())
        return std::nullopt;
    std::vector<int> ca, cb;
    if (!detail::refine_colors(a, b, ca, cb)) return std::nullopt;

    // process rare colors first
    std::map<int, int> freq;
    for (int c : ca) ++freq[c];
    std::vector<int> order(static_cast<size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        const int fx = freq[ca[static_cast<size_t>(x)]], fy = freq[ca[static_cast<size_t>(y)]];
        if (fx != fy) return fx < fy;
        return x < y;
    });

    std::vector<int> map(static_cast<size_t>(a.size()), -1);
    std::vector<char> used(static_cast<size_t>(b.size()), 0);
    auto accept = [&](const std::vector<int>& m) {
        for (int i = 0; i < a.size(); ++i)
            for (int j = 0; j < a.size(); ++j)
                if (i != j && a.adj[static_cast<size_t>(i)].test(j) != b.adj[static_cast<size_t>(m[static_cast<size_t>(i)])].test(m[static_cast<size_t>(j)]))
                    return false;
        std::vector<std::array<int, 3>> mapped;
        mapped.reserve(a.lines.size());
        for (const auto& t : a.lines) {
            std::array<int, 3> u{m[static_cast<size_t>(t[0])], m[static_cast<size_t>(t[1])], m[static_cast<size_t>(t[2])]};
            std::sort(u.begin(), u.end());
            mapped.push_back(u);
        }
        std::sort(mapped.begin(), mapped.end());
        return mapped == b.lines;
    };
    if (detail::extend_mapping(a, b, order, 0, map, used, ca, cb, accept)) return map;
    return std::nullopt;
}

/// For three carrier lines inside one doily: (a) pairwise skew, and (b)
/// exactly three of the doily's lines meet all three carriers.
inline bool tricentric_triad_check(const GeometrySnapshot& s, const Doily& doily,
                                   const std::array<int, 3>& carriers) {
    for (int id : carriers)
        if (std::find(doily.lines.begin(), doily.lines.end(), id) == doily.lines.end())
            throw std::invalid_argument("carrier line not inside the doily");
    if (carriers[0] == carriers[1] || carriers[0] == carriers[2] || carriers[1] == carriers[2])
        throw std::invalid_argument("carrier lines must be distinct");

    auto shares_point = [&](int la, int lb) {
        for (int u : s.lines[static_cast<size_t>(la)].points)
            for (int v : s.lines[static_cast<size_t>(lb)].points)
                if (u == v) return true;
        return false;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (shares_point(carriers[static_cast<size_t>(i)], carriers[static_cast<size_t>(j)])) return false;

    int transversals = 0;
    for (int id : doily.lines) {
        bool meets_all = true;
        for (int c : carriers)
            if (!shares_point(id, c)) meets_all = false;
        if (meets_all) ++transversals;
    }
    return transversals == 3;
}

}  // namespace qpg
