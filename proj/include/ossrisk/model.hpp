#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ossrisk/snapshot.hpp"

namespace ossrisk {

// Dense reindexing of snapshot ids. Index order is ascending id order.
class IdIndex {
public:
    IdIndex() = default;
    explicit IdIndex(std::vector<std::string> sorted_ids);

    std::size_t size() const { return ids_.size(); }
    const std::string& id(std::size_t index) const { return ids_.at(index); }
    const std::vector<std::string>& ids() const { return ids_; }
    std::optional<std::size_t> find(const std::string& id) const;
    std::size_t at(const std::string& id) const;  // throws std::out_of_range

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> positions_;
};

struct SparseEntry {
    std::size_t index = 0;
    double value = 0.0;

    bool operator==(const SparseEntry&) const = default;
};

// Column j holds contributor shares of library j's window commits.
class NormalizedContributionMatrix {
public:
    NormalizedContributionMatrix() = default;
    NormalizedContributionMatrix(std::size_t contributors, std::size_t libraries);

    std::size_t contributors() const { return by_contributor_.size(); }
    std::size_t libraries() const { return by_library_.size(); }

    // Sets share (i, j). Entries are kept sorted by index in both directions.
    void set(std::size_t contributor, std::size_t library, double share);
    double share(std::size_t contributor, std::size_t library) const;

    const std::vector<SparseEntry>& column(std::size_t library) const { return by_library_.at(library); }
    const std::vector<SparseEntry>& row(std::size_t contributor) const { return by_contributor_.at(contributor); }
    bool has_contributors(std::size_t library) const { return !by_library_.at(library).empty(); }

private:
    std::vector<std::vector<SparseEntry>> by_library_;
    std::vector<std::vector<SparseEntry>> by_contributor_;
};

// Column j holds library j's share of dependency on each upstream i.
// Weights are general; the snapshot builder uses 1/k for k upstreams.
class NormalizedDependencyMatrix {
public:
    NormalizedDependencyMatrix() = default;
    explicit NormalizedDependencyMatrix(std::size_t libraries);

    std::size_t libraries() const { return upstreams_.size(); }

    void set(std::size_t upstream, std::size_t downstream, double share);  // rejects self-loops
    double share(std::size_t upstream, std::size_t downstream) const;

    const std::vector<SparseEntry>& upstreams(std::size_t library) const { return upstreams_.at(library); }
    const std::vector<std::size_t>& downstreams(std::size_t library) const { return downstreams_.at(library); }
    bool has_upstreams(std::size_t library) const { return !upstreams_.at(library).empty(); }

private:
    std::vector<std::vector<SparseEntry>> upstreams_;
    std::vector<std::vector<std::size_t>> downstreams_;
};

struct TopologicalOrder {
    std::vector<std::size_t> order;  // upstreams before downstreams
    std::size_t depth = 0;           // edges on the longest path
};

NormalizedContributionMatrix build_contribution_matrix(const EcosystemSnapshot& s);
NormalizedDependencyMatrix build_dependency_matrix(const EcosystemSnapshot& s);  // throws ModelError on a cycle

// Kahn's algorithm with a min-heap, so ties go to the smallest index.
TopologicalOrder topological_order(const NormalizedDependencyMatrix& d);  // throws ModelError on a cycle

// Everything the engine needs from a validated snapshot, in dense index form.
struct EcosystemModel {
    IdIndex libraries;
    IdIndex contributors;
    NormalizedContributionMatrix contribution;
    NormalizedDependencyMatrix dependency;
    TopologicalOrder topology;
    std::vector<std::uint64_t> downloads;       // by library index
    std::vector<std::uint64_t> stars;           // by library index
    std::vector<Timestamp> created_at;          // by library index
    std::vector<std::uint64_t> library_commits; // N_j, window commits per library
    std::vector<std::uint64_t> contributor_commits;
};

EcosystemModel build_model(const EcosystemSnapshot& s);

enum class DependencyDirection { downstream, upstream };

// Direct dependents (downstream) or direct dependencies (upstream) per library.
std::vector<std::size_t> direct_dependency_counts(const NormalizedDependencyMatrix& d,
                                                  DependencyDirection direction);

// Number of distinct libraries reachable through one or more edges.
std::vector<std::size_t> transitive_dependency_counts(const NormalizedDependencyMatrix& d,
                                                      DependencyDirection direction);

// Libraries reachable downstream from `seeds`, seeds included, ascending index.
std::vector<std::size_t> downstream_cone(const NormalizedDependencyMatrix& d,
                                         const std::vector<std::size_t>& seeds);

} // namespace ossrisk
