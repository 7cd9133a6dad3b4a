#pragma once

#include <cstddef>
#include <vector>

#include "ossrisk/model.hpp"
#include "ossrisk/production.hpp"

namespace ossrisk {

// S^C: 1 = active, 0 = departed, fractions allowed.
struct ContributorState {
    std::vector<double> values;

    static ContributorState all_active(std::size_t contributors);
};

// S^L: entry j is the survival probability of library j.
struct LibraryState {
    std::vector<double> values;

    static LibraryState all_healthy(std::size_t libraries);
};

// X: extra upstream-health input from allocated developers. An empty vector means zero.
struct SurplusVector {
    std::vector<double> values;

    double at(std::size_t library) const { return values.empty() ? 0.0 : values[library]; }
    bool empty() const;  // true when every entry is zero
};

// Libraries whose state is pinned to 1. Default-constructed set is empty.
class ImmunizedSet {
public:
    ImmunizedSet() = default;
    explicit ImmunizedSet(std::size_t libraries) : flags_(libraries, 0) {}

    void insert(std::size_t library);
    void erase(std::size_t library);
    bool contains(std::size_t library) const { return library < flags_.size() && flags_[library] != 0; }
    bool empty() const;

private:
    std::vector<char> flags_;
};

struct CascadeOptions {
    double tolerance = 1e-12;  // max-norm change that counts as converged
    std::size_t max_iter = 0;  // 0: max(depth + 8, 64)
};

std::size_t default_max_iter(const TopologicalOrder& order);

struct CascadeResult {
    LibraryState final_state;
    // n such that the returned state is S_n; S_{n+1} differs by less than the tolerance.
    std::size_t iterations = 0;
    // applications of the update, including the one that confirmed convergence
    std::size_t steps = 0;
    bool converged = false;
};

// Read-only view of the model pieces and scenario parameters shared by every step.
struct CascadeSystem {
    const NormalizedContributionMatrix& contribution;
    const NormalizedDependencyMatrix& dependency;
    const ProductionFunction& production;
    const SurplusVector& surplus;
    const ImmunizedSet& immunized;
};

// One application of the update. For each library j:
//   c = 1 - sum_i (1 - S^C_i) C(i,j), or 1 when j has no contributors
//   d = min(1, 1 - sum_i (1 - S^L_i) D(i,j) + X_j), or 1 when j has no upstreams
//   S^L_j = survival(c, d), or 1 when j is immunized
// The deficit form equals sum_i S_i M(i,j) for columns summing to one, and maps
// the healthy state to exactly 1.
LibraryState single_step(const LibraryState& state, const ContributorState& contributors,
                         const CascadeSystem& system);

// Iterates single_step from the all-healthy state until the max-norm change
// drops below the tolerance or max_iter steps have run.
CascadeResult propagate(const ContributorState& contributors, const CascadeSystem& system,
                        const CascadeOptions& options, std::size_t max_iter_default);

CascadeResult propagate(const ContributorState& contributors, const CascadeSystem& system,
                        const TopologicalOrder& order, const CascadeOptions& options = {});

// One pass in topological order. Uses the direct weighted sums
// sum_i S^C_i C(i,j) and sum_i S^L_i D(i,j) + X_j instead of the deficit form,
// with the same corrections, cap and immunization. On a DAG this is the fixed
// point, so it serves as an independent check on propagate.
LibraryState evaluate_topological(const ContributorState& contributors, const CascadeSystem& system,
                                  const TopologicalOrder& order);

// Runs the iteration only over the downstream cone of libraries touched by
// departed contributors; everything outside the cone stays exactly 1.
// Holds a scratch state, so use one evaluator per thread.
class ConeEvaluator {
public:
    ConeEvaluator(const CascadeSystem& system, const TopologicalOrder& order, CascadeOptions options = {});

    // Single removal of `contributor`. Returns the scenario result over the full library set.
    CascadeResult remove_contributor(std::size_t contributor);
    CascadeResult run(const ContributorState& contributors);

    // Sum over libraries of (1 - S^L_j) * weights[j] for the single removal.
    double weighted_risk_of_removal(std::size_t contributor, const std::vector<double>& weights);

private:
    struct ConeRun {
        std::vector<std::size_t> cone;
        std::size_t iterations = 0;
        std::size_t steps = 0;
        bool converged = false;
    };

    ConeRun iterate(const ContributorState& contributors, std::vector<std::size_t> seeds);
    void reset(const std::vector<std::size_t>& cone);

    CascadeSystem system_;
    CascadeOptions options_;
    std::size_t max_iter_;
    std::vector<double> state_;
    std::vector<double> next_;
    ContributorState single_;
};

} // namespace ossrisk
