#include "ossrisk/model.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

#include "ossrisk/error.hpp"

namespace ossrisk {

namespace {

void upsert(std::vector<SparseEntry>& entries, std::size_t index, double value) {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const SparseEntry& e, std::size_t key) { return e.index < key; });
    if (it != entries.end() && it->index == index) {
        if (value == 0.0)
            entries.erase(it);
        else
            it->value = value;
    } else if (value != 0.0) {
        entries.insert(it, SparseEntry{index, value});
    }
}

double lookup(const std::vector<SparseEntry>& entries, std::size_t index) {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const SparseEntry& e, std::size_t key) { return e.index < key; });
    return it != entries.end() && it->index == index ? it->value : 0.0;
}

IdIndex library_index(const EcosystemSnapshot& s) {
    std::vector<std::string> ids;
    ids.reserve(s.libraries.size());
    for (const auto& l : s.libraries) ids.push_back(l.id);
    return IdIndex(std::move(ids));
}

IdIndex contributor_index(const EcosystemSnapshot& s) {
    std::vector<std::string> ids;
    ids.reserve(s.contributors.size());
    for (const auto& c : s.contributors) ids.push_back(c.id);
    return IdIndex(std::move(ids));
}

} // namespace

IdIndex::IdIndex(std::vector<std::string> sorted_ids) : ids_(std::move(sorted_ids)) {
    if (!std::is_sorted(ids_.begin(), ids_.end())) std::sort(ids_.begin(), ids_.end());
    positions_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!positions_.emplace(ids_[i], i).second) throw std::invalid_argument("duplicate id '" + ids_[i] + "'");
    }
}

std::optional<std::size_t> IdIndex::find(const std::string& id) const {
    auto it = positions_.find(id);
    if (it == positions_.end()) return std::nullopt;
    return it->second;
}

std::size_t IdIndex::at(const std::string& id) const {
    auto it = positions_.find(id);
    if (it == positions_.end()) throw std::out_of_range("unknown id '" + id + "'");
    return it->second;
}

NormalizedContributionMatrix::NormalizedContributionMatrix(std::size_t contributors, std::size_t libraries)
    : by_library_(libraries), by_contributor_(contributors) {}

void NormalizedContributionMatrix::set(std::size_t contributor, std::size_t library, double share) {
    if (!(share >= 0.0 && share <= 1.0)) throw ModelError("contribution share outside [0,1]");
    upsert(by_library_.at(library), contributor, share);
    upsert(by_contributor_.at(contributor), library, share);
}

double NormalizedContributionMatrix::share(std::size_t contributor, std::size_t library) const {
    return lookup(by_library_.at(library), contributor);
}

NormalizedDependencyMatrix::NormalizedDependencyMatrix(std::size_t libraries)
    : upstreams_(libraries), downstreams_(libraries) {}

void NormalizedDependencyMatrix::set(std::size_t upstream, std::size_t downstream, double share) {
    if (upstream == downstream) throw ModelError("self-dependency of library index " + std::to_string(upstream));
    if (!(share >= 0.0 && share <= 1.0)) throw ModelError("dependency share outside [0,1]");
    upsert(upstreams_.at(downstream), upstream, share);
    auto& down = downstreams_.at(upstream);
    auto it = std::lower_bound(down.begin(), down.end(), downstream);
    bool present = it != down.end() && *it == downstream;
    if (share == 0.0 && present)
        down.erase(it);
    else if (share != 0.0 && !present)
        down.insert(it, downstream);
}

double NormalizedDependencyMatrix::share(std::size_t upstream, std::size_t downstream) const {
    return lookup(upstreams_.at(downstream), upstream);
}

NormalizedContributionMatrix build_contribution_matrix(const EcosystemSnapshot& s) {
    IdIndex libs = library_index(s);
    IdIndex people = contributor_index(s);
    NormalizedContributionMatrix c(people.size(), libs.size());

    std::vector<std::uint64_t> totals(libs.size(), 0);
    for (const auto& [key, count] : s.commit_counts) totals[libs.at(key.second)] += count;
    for (const auto& [key, count] : s.commit_counts) {
        if (count == 0) continue;
        std::size_t j = libs.at(key.second);
        c.set(people.at(key.first), j, static_cast<double>(count) / static_cast<double>(totals[j]));
    }
    return c;
}

NormalizedDependencyMatrix build_dependency_matrix(const EcosystemSnapshot& s) {
    IdIndex libs = library_index(s);
    NormalizedDependencyMatrix d(libs.size());
    std::vector<std::vector<std::size_t>> upstreams(libs.size());
    for (const auto& e : s.dependency_edges) {
        auto dependent = libs.find(e.dependent);
        auto dependency = libs.find(e.dependency);
        if (!dependent || !dependency)
            throw ModelError("dependency edge references unknown library: " + e.dependent + " -> " + e.dependency);
        if (*dependent == *dependency) throw ModelError("self-dependency of library '" + e.dependent + "'");
        upstreams[*dependent].push_back(*dependency);
    }
    for (std::size_t j = 0; j < upstreams.size(); ++j) {
        const double share = upstreams[j].empty() ? 0.0 : 1.0 / static_cast<double>(upstreams[j].size());
        for (std::size_t i : upstreams[j]) d.set(i, j, share);
    }
    topological_order(d);  // rejects cycles
    return d;
}

TopologicalOrder topological_order(const NormalizedDependencyMatrix& d) {
    const std::size_t n = d.libraries();
    std::vector<std::size_t> indegree(n), level(n, 0);
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t j = 0; j < n; ++j) {
        indegree[j] = d.upstreams(j).size();
        if (indegree[j] == 0) ready.push(j);
    }
    TopologicalOrder topo;
    topo.order.reserve(n);
    while (!ready.empty()) {
        std::size_t i = ready.top();
        ready.pop();
        topo.order.push_back(i);
        topo.depth = std::max(topo.depth, level[i]);
        for (std::size_t j : d.downstreams(i)) {
            level[j] = std::max(level[j], level[i] + 1);
            if (--indegree[j] == 0) ready.push(j);
        }
    }
    if (topo.order.size() != n) throw ModelError("dependency graph contains a cycle");
    return topo;
}

EcosystemModel build_model(const EcosystemSnapshot& s) {
    if (!validate_snapshot(s).accepted()) throw ModelError("snapshot failed validation");
    EcosystemModel m;
    m.libraries = library_index(s);
    m.contributors = contributor_index(s);
    m.contribution = build_contribution_matrix(s);
    m.dependency = build_dependency_matrix(s);
    m.topology = topological_order(m.dependency);

    const std::size_t n = m.libraries.size();
    m.downloads.resize(n);
    m.stars.resize(n);
    m.created_at.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& lib = s.libraries[j];
        m.downloads[j] = lib.downloads;
        m.stars[j] = lib.stars;
        m.created_at[j] = lib.created_at;
    }
    m.library_commits.assign(n, 0);
    m.contributor_commits.assign(m.contributors.size(), 0);
    for (const auto& [key, count] : s.commit_counts) {
        m.library_commits[m.libraries.at(key.second)] += count;
        m.contributor_commits[m.contributors.at(key.first)] += count;
    }
    return m;
}

std::vector<std::size_t> direct_dependency_counts(const NormalizedDependencyMatrix& d, DependencyDirection direction) {
    std::vector<std::size_t> counts(d.libraries());
    for (std::size_t j = 0; j < counts.size(); ++j)
        counts[j] = direction == DependencyDirection::downstream ? d.downstreams(j).size() : d.upstreams(j).size();
    return counts;
}

std::vector<std::size_t> transitive_dependency_counts(const NormalizedDependencyMatrix& d,
                                                      DependencyDirection direction) {
    const std::size_t n = d.libraries();
    std::vector<std::size_t> counts(n, 0), stamp(n, n), frontier;
    for (std::size_t root = 0; root < n; ++root) {
        frontier.assign(1, root);
        stamp[root] = root;
        std::size_t reached = 0;
        while (!frontier.empty()) {
            std::size_t v = frontier.back();
            frontier.pop_back();
            auto visit = [&](std::size_t w) {
                if (stamp[w] == root) return;
                stamp[w] = root;
                ++reached;
                frontier.push_back(w);
            };
            if (direction == DependencyDirection::downstream) {
                for (std::size_t w : d.downstreams(v)) visit(w);
            } else {
                for (const auto& e : d.upstreams(v)) visit(e.index);
            }
        }
        counts[root] = reached;
    }
    return counts;
}

std::vector<std::size_t> downstream_cone(const NormalizedDependencyMatrix& d, const std::vector<std::size_t>& seeds) {
    std::vector<char> seen(d.libraries(), 0);
    std::vector<std::size_t> cone, frontier;
    for (std::size_t s : seeds) {
        if (!seen.at(s)) {
            seen[s] = 1;
            frontier.push_back(s);
        }
    }
    while (!frontier.empty()) {
        std::size_t v = frontier.back();
        frontier.pop_back();
        cone.push_back(v);
        for (std::size_t w : d.downstreams(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                frontier.push_back(w);
            }
        }
    }
    std::sort(cone.begin(), cone.end());
    return cone;
}

} // namespace ossrisk
