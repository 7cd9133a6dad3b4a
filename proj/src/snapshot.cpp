#include "ossrisk/snapshot.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "graph_util.hpp"
#include "ossrisk/csv.hpp"
#include "ossrisk/error.hpp"

namespace ossrisk {

namespace {

std::uint64_t parse_count(const std::string& text, const std::string& source, const csv::Row& row,
                          std::size_t column) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw InputError(source, row.line, column, "expected a non-negative integer, found '" + text + "'");
    return value;
}

Timestamp parse_time(const std::string& text, const std::string& source, const csv::Row& row, std::size_t column) {
    auto t = parse_iso8601(text);
    if (!t) throw InputError(source, row.line, column, "expected an ISO-8601 timestamp, found '" + text + "'");
    return *t;
}

const std::string& require_id(const csv::Row& row, std::size_t column, const std::string& source) {
    const std::string& id = row.fields[column - 1];
    if (id.empty()) throw InputError(source, row.line, column, "empty id");
    return id;
}

template <class Record>
const Record* find_sorted(const std::vector<Record>& records, const std::string& id) {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const Record& r, const std::string& key) { return r.id < key; });
    return it != records.end() && it->id == id ? &*it : nullptr;
}

// Library ids plus any dangling ids, adjacency of dependency -> dependent.
struct EdgeGraph {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> adjacency;
    std::vector<std::vector<DependencyEdge>> out_edges;
};

EdgeGraph edge_graph(const EcosystemSnapshot& s) {
    EdgeGraph g;
    std::unordered_map<std::string, std::size_t> pos;
    auto node = [&](const std::string& id) {
        auto [it, inserted] = pos.emplace(id, g.names.size());
        if (inserted) {
            g.names.push_back(id);
            g.adjacency.emplace_back();
            g.out_edges.emplace_back();
        }
        return it->second;
    };
    for (const auto& lib : s.libraries) node(lib.id);
    for (const auto& e : s.dependency_edges) {
        std::size_t from = node(e.dependency);
        std::size_t to = node(e.dependent);
        g.adjacency[from].push_back(to);
        g.out_edges[from].push_back(e);
    }
    return g;
}

// Edges lying on at least one cycle, grouped per strongly connected component,
// each group sorted. Self-edges form their own groups.
std::vector<std::vector<DependencyEdge>> cyclic_edge_groups(const EcosystemSnapshot& s) {
    EdgeGraph g = edge_graph(s);
    auto component = detail::strongly_connected_components(g.adjacency);
    std::map<std::size_t, std::vector<DependencyEdge>> by_component;
    std::vector<std::vector<DependencyEdge>> groups;
    for (std::size_t v = 0; v < g.adjacency.size(); ++v) {
        for (std::size_t k = 0; k < g.adjacency[v].size(); ++k) {
            std::size_t w = g.adjacency[v][k];
            const DependencyEdge& e = g.out_edges[v][k];
            if (v == w) {
                groups.push_back({e});
            } else if (component[v] == component[w]) {
                by_component[component[v]].push_back(e);
            }
        }
    }
    for (auto& [id, edges] : by_component) groups.push_back(std::move(edges));
    for (auto& group : groups) std::sort(group.begin(), group.end());
    std::sort(groups.begin(), groups.end());
    return groups;
}

} // namespace

const LibraryRecord* EcosystemSnapshot::find_library(const std::string& id) const {
    return find_sorted(libraries, id);
}

const ContributorRecord* EcosystemSnapshot::find_contributor(const std::string& id) const {
    return find_sorted(contributors, id);
}

std::string EcosystemSnapshot::canonical() const {
    std::ostringstream out;
    out << "window\t" << (window.start ? format_iso8601(*window.start) : "-") << '\t'
        << (window.end ? format_iso8601(*window.end) : "-") << '\n';
    for (const auto& l : libraries)
        out << "library\t" << csv::quote(l.id) << '\t' << csv::quote(l.name) << '\t' << format_iso8601(l.created_at)
            << '\t' << l.downloads << '\t' << l.stars << '\n';
    for (const auto& c : contributors) out << "contributor\t" << csv::quote(c.id) << '\t' << c.is_bot << '\n';
    for (const auto& [key, count] : commit_counts)
        out << "commits\t" << csv::quote(key.first) << '\t' << csv::quote(key.second) << '\t' << count << '\n';
    for (const auto& e : dependency_edges)
        out << "edge\t" << csv::quote(e.dependent) << '\t' << csv::quote(e.dependency) << '\n';
    for (const auto& e : broken_cycle_edges)
        out << "broken\t" << csv::quote(e.dependent) << '\t' << csv::quote(e.dependency) << '\n';
    out << "dropped_bots\t" << dropped_bot_contributors << '\t' << dropped_bot_commits << '\n';
    return out.str();
}

EcosystemSnapshot load_snapshot(const SnapshotFiles& files, const LoadOptions& options) {
    EcosystemSnapshot s;
    s.window = options.window;
    if (s.window.start && s.window.end && *s.window.start >= *s.window.end)
        throw InputError("window", 0, 0, "window start must be before window end");

    // libraries
    const std::string lib_src = files.libraries.string();
    auto lib_rows = csv::expect_header(csv::read_file(files.libraries),
                                       {"id", "name", "created_at", "downloads", "stars"}, lib_src);
    std::unordered_set<std::string> library_ids;
    for (const auto& row : lib_rows) {
        LibraryRecord rec;
        rec.id = require_id(row, 1, lib_src);
        rec.name = row.fields[1];
        rec.created_at = parse_time(row.fields[2], lib_src, row, 3);
        rec.downloads = parse_count(row.fields[3], lib_src, row, 4);
        rec.stars = parse_count(row.fields[4], lib_src, row, 5);
        if (!library_ids.insert(rec.id).second)
            throw InputError(lib_src, row.line, 1, "duplicate library id '" + rec.id + "'");
        s.libraries.push_back(std::move(rec));
    }
    if (s.libraries.empty()) throw InputError(lib_src, 0, 0, "no libraries");
    std::sort(s.libraries.begin(), s.libraries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    auto check_library = [&](const std::string& id, const std::string& src, const csv::Row& row, std::size_t col) {
        if (!options.allow_dangling && !library_ids.contains(id))
            throw InputError(src, row.line, col, "unknown library id '" + id + "'");
    };

    // dependencies
    const std::string dep_src = files.dependencies.string();
    auto dep_rows = csv::expect_header(csv::read_file(files.dependencies), {"dependent_id", "dependency_id"}, dep_src);
    for (const auto& row : dep_rows) {
        DependencyEdge e{require_id(row, 1, dep_src), require_id(row, 2, dep_src)};
        check_library(e.dependent, dep_src, row, 1);
        check_library(e.dependency, dep_src, row, 2);
        if (!s.dependency_edges.insert(e).second)
            s.warnings.push_back(dep_src + ":" + std::to_string(row.line) + ": repeated edge " + e.dependent + " -> " +
                                 e.dependency + " ignored");
    }

    // bots
    std::unordered_set<std::string> bots;
    if (files.bots) {
        const std::string bot_src = files.bots->string();
        for (const auto& row : csv::expect_header(csv::read_file(*files.bots), {"contributor_id"}, bot_src))
            bots.insert(require_id(row, 1, bot_src));
    }

    // commits
    const std::string com_src = files.commits.string();
    auto com_rows = csv::expect_header(
        csv::read_file(files.commits),
        {"contributor_id", "library_id", options.raw_commits ? "timestamp" : "commit_count"}, com_src);
    std::set<std::string> contributor_ids;
    std::set<std::string> dropped_bots;
    for (const auto& row : com_rows) {
        const std::string& contributor = require_id(row, 1, com_src);
        const std::string& library = require_id(row, 2, com_src);
        check_library(library, com_src, row, 2);
        std::uint64_t count = 0;
        if (options.raw_commits) {
            Timestamp t = parse_time(row.fields[2], com_src, row, 3);
            count = s.window.contains(t) ? 1 : 0;
        } else {
            count = parse_count(row.fields[2], com_src, row, 3);
        }
        if (bots.contains(contributor)) {
            dropped_bots.insert(contributor);
            s.dropped_bot_commits += count;
            continue;
        }
        contributor_ids.insert(contributor);
        CommitKey key{contributor, library};
        if (options.raw_commits) {
            if (count > 0) s.commit_counts[key] += count;
        } else if (!s.commit_counts.emplace(key, count).second) {
            throw InputError(com_src, row.line, 1,
                             "duplicate row for contributor '" + contributor + "' and library '" + library + "'");
        }
    }
    s.dropped_bot_contributors = dropped_bots.size();
    for (const auto& id : contributor_ids) s.contributors.push_back({id, false});
    return s;
}

ValidationReport validate_snapshot(const EcosystemSnapshot& s) {
    ValidationReport report;
    report.dropped_bot_contributors = s.dropped_bot_contributors;
    report.broken_edges = s.broken_cycle_edges;
    report.warnings = s.warnings;

    std::set<std::string> dangling;
    for (const auto& e : s.dependency_edges) {
        if (!s.find_library(e.dependent)) dangling.insert(e.dependent);
        if (!s.find_library(e.dependency)) dangling.insert(e.dependency);
    }
    for (const auto& [key, count] : s.commit_counts) {
        if (!s.find_contributor(key.first)) dangling.insert(key.first);
        if (!s.find_library(key.second)) dangling.insert(key.second);
    }
    report.dangling_refs.assign(dangling.begin(), dangling.end());

    for (auto& group : cyclic_edge_groups(s))
        report.cycle_edges.insert(report.cycle_edges.end(), group.begin(), group.end());
    std::sort(report.cycle_edges.begin(), report.cycle_edges.end());

    if (s.libraries.empty()) report.warnings.push_back("snapshot has no libraries");
    bool any_downloads = std::any_of(s.libraries.begin(), s.libraries.end(), [](const auto& l) { return l.downloads > 0; });
    if (!s.libraries.empty() && !any_downloads)
        report.warnings.push_back("all libraries have zero downloads; download-weighted metrics are undefined");
    if (s.commit_counts.empty()) report.warnings.push_back("no commits in window; every library is treated as self-sufficient");
    return report;
}

std::vector<DependencyEdge> break_cycles(EcosystemSnapshot& s) {
    std::vector<DependencyEdge> dropped;
    for (;;) {
        auto groups = cyclic_edge_groups(s);
        if (groups.empty()) break;
        for (const auto& group : groups) {
            s.dependency_edges.erase(group.front());
            dropped.push_back(group.front());
        }
    }
    std::sort(dropped.begin(), dropped.end());
    s.broken_cycle_edges.insert(s.broken_cycle_edges.end(), dropped.begin(), dropped.end());
    return dropped;
}

} // namespace ossrisk
