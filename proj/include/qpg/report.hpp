#pragma once

#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qpg/geometry.hpp"
#include "qpg/matrix_oracle.hpp"

namespace qpg {

/// Count table for one k. For k <= 5 these are published values; beyond
/// that they are formula extrapolations.
struct ExpectedCounts {
    long long elements = 0;
    int set_size = 0;
    long long sets = 0;
    long long ordinary = 0;
    int doilies = 0;
    int pencils = 0;
    long long exceptional = 0;
};

inline ExpectedCounts expected_counts(int k) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    ExpectedCounts e;
    e.elements = 4 * (1LL << (2 * k)) - 1;
    e.set_size = (1 << (k + 1)) - 1;
    e.sets = predicted_set_count(k);
    e.ordinary = 36LL << (k - 2);
    e.doilies = (1 << k) - 1;
    e.pencils = (1 << (k - 1)) - 1;
    e.exceptional = e.sets - e.ordinary;
    return e;
}

inline bool has_published_counts(int k) { return k >= 2 && k <= 5; }

enum class TriState { Yes, No, NotApplicable };

inline const char* to_string(TriState t) {
    switch (t) {
        case TriState::Yes: return "yes";
        case TriState::No: return "no";
        default: return "not_applicable";
    }
}

struct PipelineOptions {
    int threads = 0;  // 0: THREADS env or hardware concurrency
    int max_k = kDefaultMaxK;
    bool normalize_timings = false;
    bool with_nesting = true;
};

struct CaseReport {
    int k = 0;
    ExpectedCounts expected;
    bool published = false;  // expected values are published rather than extrapolated

    long long element_count = 0;
    int set_count = 0;
    int set_size = -1;  // -1 when sizes are not uniform
    std::map<int, int> size_histogram;
    int line_count = 0;
    int exceptional_count = 0;
    int ordinary_count = 0;
    int doily_count = 0;
    int pencil_count = 0;
    std::map<int, long long> spectrum;

    TriState nesting = TriState::NotApplicable;
    std::vector<std::array<int, 2>> witness;  // (point id at k, point id at k-2)

    std::map<std::string, bool> match;
    bool all_match = false;
    std::vector<std::string> violations;
    std::map<std::string, double> timings_ms;

    GeometrySnapshot snapshot;
    std::vector<Doily> doilies;
    std::vector<Pencil> pencils;
};

namespace detail {

class StageTimer {
public:
    explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
    template <typename Fn>
    auto run(const std::string& name, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            sink_[name] = elapsed_ms(t0);
        } else {
            auto out = fn();
            sink_[name] = elapsed_ms(t0);
            return out;
        }
    }
    static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }

private:
    std::map<std::string, double>& sink_;
};

}  // namespace detail

inline CaseReport run_pipeline(int k, const PipelineOptions& opt = {}) {
    const auto total0 = std::chrono::steady_clock::now();
    CaseParameter p(k);
    CaseReport r;
    r.k = k;
    r.expected = expected_counts(k);
    r.published = has_published_counts(k);

    detail::StageTimer timer(r.timings_ms);
    const CommutationGraph graph =
        timer.run("build_graph", [&] { return build_graph(p, opt.threads, opt.max_k); });
    const auto sets =
        timer.run("enumerate_sets", [&] { return enumerate_maximal_sets(graph, opt.threads); });

    r.element_count = graph.n;
    r.set_count = static_cast<int>(sets.size());
    for (const auto& s : sets) ++r.size_histogram[static_cast<int>(s.members.size())];
    if (r.size_histogram.size() == 1) {
        r.set_size = r.size_histogram.begin()->first;
    } else {
        std::ostringstream msg;
        msg << "maximal set sizes not uniform:";
        for (const auto& [sz, cnt] : r.size_histogram) msg << " " << sz << "x" << cnt;
        if (has_published_counts(k))
            r.violations.push_back(msg.str());
        else
            r.violations.push_back("[conjecture] " + msg.str());
    }

    // abelian closure: the mod-phase product of two members is a member or
    // the identity
    timer.run("closure_check", [&] {
        for (const auto& s : sets) {
            Bitset in(p.element_count() + 1);
            for (int e : s.members) in.set(e);
            for (size_t i = 0; i < s.members.size(); ++i)
                for (size_t j = i; j < s.members.size(); ++j) {
                    const PauliElement prod =
                        product(index_to_element(s.members[i], p), index_to_element(s.members[j], p), p);
                    if (prod.is_identity()) continue;
                    if (!in.test(element_index(prod, p))) {
                        r.violations.push_back("set is not closed under product: {" +
                                               std::to_string(s.members[i]) + "," +
                                               std::to_string(s.members[j]) + "}");
                        return;
                    }
                }
        }
    });

    r.snapshot = timer.run("geometry", [&] { return build_geometry(sets, p, opt.threads); });
    timer.run("classify", [&] { classify_exceptional(r.snapshot); });
    r.doilies = timer.run("doilies", [&] { return enumerate_doilies(r.snapshot); });
    r.pencils = timer.run("pencils", [&] { return detect_pencils(r.snapshot, r.doilies); });

    r.line_count = static_cast<int>(r.snapshot.lines.size());
    for (char e : r.snapshot.exceptional) r.exceptional_count += e ? 1 : 0;
    r.ordinary_count = r.snapshot.point_count() - r.exceptional_count;
    r.doily_count = static_cast<int>(r.doilies.size());
    r.pencil_count = static_cast<int>(r.pencils.size());
    r.spectrum = r.snapshot.spectrum;

    if (k == 3) {
        timer.run("carrier_triad", [&] {
            // the all-exceptional doily carries the three pencil carriers;
            // they must be pairwise skew and admit exactly three transversals
            int distinguished = -1;
            for (int di = 0; di < static_cast<int>(r.doilies.size()); ++di) {
                bool all_exc = true;
                for (int v : r.doilies[static_cast<size_t>(di)].points)
                    if (!r.snapshot.exceptional[static_cast<size_t>(v)]) all_exc = false;
                if (all_exc) distinguished = di;
            }
            if (distinguished < 0 || r.pencils.size() != 3) {
                r.violations.push_back("carrier triad: missing distinguished doily or pencils");
                return;
            }
            const std::array<int, 3> carriers{r.pencils[0].carrier, r.pencils[1].carrier,
                                              r.pencils[2].carrier};
            try {
                if (!tricentric_triad_check(r.snapshot, r.doilies[static_cast<size_t>(distinguished)], carriers))
                    r.violations.push_back("carrier triad: skew or transversal condition failed");
            } catch (const std::invalid_argument& ex) {
                r.violations.push_back(std::string("carrier triad: ") + ex.what());
            }
        });
    }

    if (opt.with_nesting && k >= 4) {
        timer.run("nesting", [&] {
            PipelineOptions sub = opt;
            sub.with_nesting = false;
            const CaseReport inner = run_pipeline(k - 2, sub);
            const InducedGeometry core = exceptional_subgeometry(r.snapshot);
            const InducedGeometry full = as_abstract(inner.snapshot);
            const auto witness = isomorphic(core, full);
            if (witness) {
                r.nesting = TriState::Yes;
                for (int i = 0; i < core.size(); ++i)
                    r.witness.push_back({core.point_ids[static_cast<size_t>(i)], (*witness)[static_cast<size_t>(i)]});
            } else {
                r.nesting = TriState::No;
                if (has_published_counts(k))
                    r.violations.push_back("nesting isomorphism not found for k=" +
                                           std::to_string(k));
            }
        });
    }

    r.violations.insert(r.violations.end(), r.snapshot.violations.begin(),
                        r.snapshot.violations.end());
    r.snapshot.violations.clear();

    r.match["elements"] = r.element_count == r.expected.elements;
    r.match["sets"] = r.set_count == r.expected.sets;
    r.match["setSize"] = r.set_size == r.expected.set_size;
    r.match["exceptional"] = r.exceptional_count == r.expected.exceptional;
    r.match["ordinary"] = r.ordinary_count == r.expected.ordinary;
    r.match["doilies"] = r.doily_count == r.expected.doilies;
    r.match["pencils"] = r.pencil_count == r.expected.pencils;
    r.all_match = true;
    for (const auto& [_, ok] : r.match) r.all_match = r.all_match && ok;

    r.timings_ms["total"] = detail::StageTimer::elapsed_ms(total0);
    if (opt.normalize_timings)
        for (auto& [_, v] : r.timings_ms) v = 0.0;
    return r;
}

/// Outcome of comparing enumerated sets with a reference listing file.
struct ListingCheck {
    bool matched = false;
    std::vector<std::string> missing;     // listed but not enumerated
    std::vector<std::string> unexpected;  // enumerated but not listed

    std::string summary() const {
        if (matched) return "all listed sets reproduced";
        std::ostringstream os;
        os << missing.size() << " listed sets missing from enumeration; " << unexpected.size()
           << " enumerated sets absent from the listing";
        for (const auto& s : missing) os << "\n  missing: " << s;
        for (const auto& s : unexpected) os << "\n  unexpected: " << s;
        return os.str();
    }
};

/// Reference tables ship as plain text: one set per line, ascending indices,
/// comma-separated. '#' starts a comment.
inline std::vector<std::vector<int>> load_listing_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open listing file: " + path);
    std::vector<std::vector<int>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::vector<int> set;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ','))
            if (tok.find_first_not_of(" \t\r") != std::string::npos) set.push_back(std::stoi(tok));
        if (set.empty()) continue;
        std::sort(set.begin(), set.end());
        out.push_back(std::move(set));
    }
    return out;
}

inline ListingCheck verify_published_listings(const std::vector<MaximalCommutingSet>& sets,
                                              const std::string& path) {
    const auto listed_raw = load_listing_file(path);
    std::set<std::vector<int>> listed(listed_raw.begin(), listed_raw.end());
    std::set<std::vector<int>> enumerated;
    for (const auto& s : sets) enumerated.insert(s.members);

    auto render = [](const std::vector<int>& v) {
        std::ostringstream os;
        os << "{";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "}";
        return os.str();
    };
    ListingCheck c;
    for (const auto& s : listed)
        if (!enumerated.count(s)) c.missing.push_back(render(s));
    for (const auto& s : enumerated)
        if (!listed.count(s)) c.unexpected.push_back(render(s));
    c.matched = c.missing.empty() && c.unexpected.empty();
    return c;
}

inline nlohmann::ordered_json report_to_json(const CaseReport& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;

    nlohmann::ordered_json counts;
    nlohmann::ordered_json observed;
    observed["elements"] = r.element_count;
    observed["sets"] = r.set_count;
    observed["setSize"] = r.set_size;
    observed["lines"] = r.line_count;
    observed["exceptional"] = r.exceptional_count;
    observed["ordinary"] = r.ordinary_count;
    observed["doilies"] = r.doily_count;
    observed["pencils"] = r.pencil_count;
    counts["observed"] = observed;
    nlohmann::ordered_json expected;
    expected["elements"] = r.expected.elements;
    expected["sets"] = r.expected.sets;
    expected["setSize"] = r.expected.set_size;
    expected["exceptional"] = r.expected.exceptional;
    expected["ordinary"] = r.expected.ordinary;
    expected["doilies"] = r.expected.doilies;
    expected["pencils"] = r.expected.pencils;
    counts["expected"] = expected;
    counts["source"] = r.published ? "published" : "extrapolated";
    nlohmann::ordered_json match;
    for (const auto& [key, ok] : r.match) match[key] = ok;
    counts["match"] = match;
    j["counts"] = counts;

    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (int pid = 0; pid < r.snapshot.point_count(); ++pid) {
        nlohmann::ordered_json pt;
        pt["id"] = pid;
        pt["members"] = r.snapshot.points[static_cast<size_t>(pid)].members;
        pt["exceptional"] = static_cast<bool>(r.snapshot.exceptional[static_cast<size_t>(pid)]);
        points.push_back(std::move(pt));
    }
    j["points"] = points;

    nlohmann::ordered_json lines = nlohmann::ordered_json::array();
    for (const auto& line : r.snapshot.lines)
        lines.push_back({line.points[0], line.points[1], line.points[2]});
    j["lines"] = lines;

    nlohmann::ordered_json doilies = nlohmann::ordered_json::array();
    for (const auto& d : r.doilies) doilies.push_back(d.points);
    j["doilies"] = doilies;

    nlohmann::ordered_json pencils = nlohmann::ordered_json::array();
    for (const auto& pc : r.pencils) {
        nlohmann::ordered_json e;
        const auto& lp = r.snapshot.lines[static_cast<size_t>(pc.carrier)].points;
        e["carrier"] = {lp[0], lp[1], lp[2]};
        e["doilies"] = {pc.doilies[0], pc.doilies[1], pc.doilies[2]};
        pencils.push_back(std::move(e));
    }
    j["pencils"] = pencils;

    nlohmann::ordered_json nesting;
    nesting["verified"] = to_string(r.nesting);
    nlohmann::ordered_json witness = nlohmann::ordered_json::array();
    for (const auto& w : r.witness) witness.push_back({w[0], w[1]});
    nesting["witness"] = witness;
    j["nesting"] = nesting;

    nlohmann::ordered_json spectrum;
    for (const auto& [card, cnt] : r.spectrum) spectrum[std::to_string(card)] = cnt;
    j["spectrum"] = spectrum;

    j["violations"] = r.violations;

    nlohmann::ordered_json timings;
    for (const auto& [name, ms] : r.timings_ms) timings[name] = ms;
    j["timings"] = timings;
    return j;
}

inline void emit_json(const CaseReport& r, const std::string& path) {
    if (path.empty()) throw std::invalid_argument("emit_json: empty path");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << report_to_json(r).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Collinearity graph in DOT, with the element legend, per-point attributes,
/// the lines as hyperedge comments, and their 2-section as a second graph.
inline void emit_dot(const CaseReport& r, const std::string& path) {
    if (path.empty()) throw std::invalid_argument("emit_dot: empty path");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    const GeometrySnapshot& s = r.snapshot;
    const CaseParameter p(s.k);
    out << "// collinearity graph, k=" << s.k << "\n";
    out << "// element legend (1-based indices):\n";
    for (int i = 1; i <= p.element_count(); ++i)
        out << "//   " << i << ": " << element_name(index_to_element(i, p)) << "\n";

    std::vector<std::vector<int>> doilies_of(static_cast<size_t>(s.point_count()));
    for (int di = 0; di < static_cast<int>(r.doilies.size()); ++di)
        for (int v : r.doilies[static_cast<size_t>(di)].points) doilies_of[static_cast<size_t>(v)].push_back(di);

    out << "graph collinearity {\n  node [shape=circle];\n";
    for (int v = 0; v < s.point_count(); ++v) {
        out << "  p" << v << " [exceptional=" << (s.exceptional[static_cast<size_t>(v)] ? "true" : "false")
            << ", doilies=\"";
        for (size_t i = 0; i < doilies_of[static_cast<size_t>(v)].size(); ++i)
            out << (i ? "," : "") << doilies_of[static_cast<size_t>(v)][i];
        out << "\"];\n";
    }
    for (int u = 0; u < s.point_count(); ++u)
        s.adj[static_cast<size_t>(u)].for_each_bit([&](int v) {
            if (v > u) out << "  p" << u << " -- p" << v << ";\n";
        });
    out << "}\n";

    out << "// lines as 3-point hyperedges:\n";
    for (int id = 0; id < static_cast<int>(s.lines.size()); ++id) {
        const auto& lp = s.lines[static_cast<size_t>(id)].points;
        out << "//   L" << id << ": p" << lp[0] << " p" << lp[1] << " p" << lp[2] << "\n";
    }
    out << "graph line_2section {\n";
    for (int id = 0; id < static_cast<int>(s.lines.size()); ++id) {
        const auto& lp = s.lines[static_cast<size_t>(id)].points;
        out << "  p" << lp[0] << " -- p" << lp[1] << " [line=" << id << "];\n";
        out << "  p" << lp[0] << " -- p" << lp[2] << " [line=" << id << "];\n";
        out << "  p" << lp[1] << " -- p" << lp[2] << " [line=" << id << "];\n";
    }
    out << "}\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qpg
