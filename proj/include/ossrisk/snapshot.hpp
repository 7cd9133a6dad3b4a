#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ossrisk/timeutil.hpp"

namespace ossrisk {

struct LibraryRecord {
    std::string id;
    std::string name;
    Timestamp created_at{};
    std::uint64_t downloads = 0;  // window total
    std::uint64_t stars = 0;

    bool operator==(const LibraryRecord&) const = default;
};

struct ContributorRecord {
    std::string id;
    bool is_bot = false;

    bool operator==(const ContributorRecord&) const = default;
};

// `dependent` depends on `dependency`.
struct DependencyEdge {
    std::string dependent;
    std::string dependency;

    auto operator<=>(const DependencyEdge&) const = default;
};

using CommitKey = std::pair<std::string, std::string>;  // (contributor_id, library_id)

// Libraries and contributors are kept sorted by id, so a snapshot does not
// depend on input row order and ascending id doubles as the tie-break order.
struct EcosystemSnapshot {
    std::vector<LibraryRecord> libraries;
    std::vector<ContributorRecord> contributors;
    std::map<CommitKey, std::uint64_t> commit_counts;
    std::set<DependencyEdge> dependency_edges;
    TimeWindow window;

    std::size_t dropped_bot_contributors = 0;
    std::uint64_t dropped_bot_commits = 0;
    std::vector<DependencyEdge> broken_cycle_edges;  // removed by break_cycles()
    std::vector<std::string> warnings;

    const LibraryRecord* find_library(const std::string& id) const;
    const ContributorRecord* find_contributor(const std::string& id) const;

    // Stable text form used for digests and determinism checks.
    std::string canonical() const;
};

struct SnapshotFiles {
    std::filesystem::path libraries;
    std::filesystem::path dependencies;
    std::filesystem::path commits;
    std::optional<std::filesystem::path> bots;
};

struct LoadOptions {
    TimeWindow window;
    // commits file holds one row per commit with a timestamp instead of counts
    bool raw_commits = false;
    // keep references to unknown libraries so validate_snapshot can report them
    bool allow_dangling = false;
};

// Throws InputError on malformed rows, duplicate ids, duplicate
// (contributor, library) rows and (unless allow_dangling) unknown library ids.
EcosystemSnapshot load_snapshot(const SnapshotFiles& files, const LoadOptions& options = {});

struct ValidationReport {
    std::vector<DependencyEdge> cycle_edges;  // every edge inside a strongly connected component
    std::vector<std::string> dangling_refs;   // sorted, unique
    std::vector<DependencyEdge> broken_edges; // dropped by break_cycles()
    std::size_t dropped_bot_contributors = 0;
    std::vector<std::string> warnings;

    bool accepted() const { return cycle_edges.empty() && dangling_refs.empty(); }
};

ValidationReport validate_snapshot(const EcosystemSnapshot& s);

// Drops the lexicographically smallest edge of each cycle until the graph is
// acyclic; a self-edge is its own cycle. Returns the dropped edges, which are
// also appended to s.broken_cycle_edges.
std::vector<DependencyEdge> break_cycles(EcosystemSnapshot& s);

} // namespace ossrisk
