#include "ossrisk/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ossrisk/error.hpp"

namespace ossrisk {

namespace {

void check_inputs(const ContributorState& contributors, const CascadeSystem& system) {
    const std::size_t libraries = system.dependency.libraries();
    if (system.contribution.libraries() != libraries)
        throw ModelError("contribution matrix has " + std::to_string(system.contribution.libraries()) +
                         " libraries, dependency matrix has " + std::to_string(libraries));
    if (contributors.values.size() != system.contribution.contributors())
        throw ModelError("contributor state has " + std::to_string(contributors.values.size()) + " entries, expected " +
                         std::to_string(system.contribution.contributors()));
    for (double v : contributors.values)
        if (!(v >= 0.0 && v <= 1.0)) throw ModelError("contributor state entry outside [0,1]");
    if (!system.surplus.values.empty() && system.surplus.values.size() != libraries)
        throw ModelError("surplus vector has " + std::to_string(system.surplus.values.size()) + " entries, expected " +
                         std::to_string(libraries));
    for (double x : system.surplus.values)
        if (!(x >= 0.0)) throw ModelError("negative surplus entry");
}

// Survival of library j given the current state, deficit form.
double update_library(std::size_t j, const std::vector<double>& state, const ContributorState& contributors,
                      const CascadeSystem& system) {
    if (system.immunized.contains(j)) return 1.0;

    double c = 1.0;
    const auto& column = system.contribution.column(j);
    if (!column.empty()) {
        double deficit = 0.0;
        for (const auto& e : column) deficit += (1.0 - contributors.values[e.index]) * e.value;
        c = std::clamp(1.0 - deficit, 0.0, 1.0);
    }

    double d = 1.0;
    const auto& upstreams = system.dependency.upstreams(j);
    if (!upstreams.empty()) {
        double deficit = 0.0;
        for (const auto& e : upstreams) deficit += (1.0 - state[e.index]) * e.value;
        d = std::clamp(1.0 - deficit + system.surplus.at(j), 0.0, 1.0);
    }

    return std::clamp(system.production.survival(c, d), 0.0, 1.0);
}

} // namespace

ContributorState ContributorState::all_active(std::size_t contributors) {
    return ContributorState{std::vector<double>(contributors, 1.0)};
}

LibraryState LibraryState::all_healthy(std::size_t libraries) { return LibraryState{std::vector<double>(libraries, 1.0)}; }

bool SurplusVector::empty() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; });
}

void ImmunizedSet::insert(std::size_t library) {
    if (library >= flags_.size()) flags_.resize(library + 1, 0);
    flags_[library] = 1;
}

void ImmunizedSet::erase(std::size_t library) {
    if (library < flags_.size()) flags_[library] = 0;
}

bool ImmunizedSet::empty() const {
    return std::none_of(flags_.begin(), flags_.end(), [](char f) { return f != 0; });
}

std::size_t default_max_iter(const TopologicalOrder& order) { return std::max<std::size_t>(order.depth + 8, 64); }

LibraryState single_step(const LibraryState& state, const ContributorState& contributors, const CascadeSystem& system) {
    check_inputs(contributors, system);
    const std::size_t n = system.dependency.libraries();
    if (state.values.size() != n)
        throw ModelError("library state has " + std::to_string(state.values.size()) + " entries, expected " +
                         std::to_string(n));
    for (double v : state.values)
        if (!(v >= 0.0 && v <= 1.0)) throw ModelError("library state entry outside [0,1]");

    LibraryState next;
    next.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) next.values[j] = update_library(j, state.values, contributors, system);
    return next;
}

CascadeResult propagate(const ContributorState& contributors, const CascadeSystem& system,
                        const CascadeOptions& options, std::size_t max_iter_default) {
    check_inputs(contributors, system);
    if (!(options.tolerance > 0.0)) throw ModelError("tolerance must be positive");
    const std::size_t n = system.dependency.libraries();
    const std::size_t max_iter = options.max_iter ? options.max_iter : max_iter_default;

    CascadeResult result;
    std::vector<double> state(n, 1.0), next(n, 1.0);
    for (std::size_t step = 1; step <= max_iter; ++step) {
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            next[j] = update_library(j, state, contributors, system);
            delta = std::max(delta, std::abs(next[j] - state[j]));
        }
        state.swap(next);
        result.steps = step;
        if (delta < options.tolerance) {
            result.converged = true;
            result.iterations = step - 1;
            break;
        }
    }
    if (!result.converged) result.iterations = result.steps;
    result.final_state.values = std::move(state);
    return result;
}

CascadeResult propagate(const ContributorState& contributors, const CascadeSystem& system,
                        const TopologicalOrder& order, const CascadeOptions& options) {
    return propagate(contributors, system, options, default_max_iter(order));
}

LibraryState evaluate_topological(const ContributorState& contributors, const CascadeSystem& system,
                                  const TopologicalOrder& order) {
    check_inputs(contributors, system);
    const std::size_t n = system.dependency.libraries();
    if (order.order.size() != n) throw ModelError("topological order does not cover every library");

    std::vector<double> state(n, 1.0);
    std::vector<char> done(n, 0);
    for (std::size_t j : order.order) {
        if (system.immunized.contains(j)) {
            state[j] = 1.0;
            done[j] = 1;
            continue;
        }
        double c = 1.0;
        const auto& column = system.contribution.column(j);
        if (!column.empty()) {
            double active = 0.0;
            for (const auto& e : column) active += contributors.values[e.index] * e.value;
            c = std::min(active, 1.0);
        }
        double d = 1.0;
        const auto& upstreams = system.dependency.upstreams(j);
        if (!upstreams.empty()) {
            double healthy = 0.0;
            for (const auto& e : upstreams) {
                if (!done[e.index]) throw ModelError("order places a library before one of its upstreams");
                healthy += state[e.index] * e.value;
            }
            d = std::min(healthy + system.surplus.at(j), 1.0);
        }
        state[j] = std::clamp(system.production.survival(c, d), 0.0, 1.0);
        done[j] = 1;
    }
    return LibraryState{std::move(state)};
}

ConeEvaluator::ConeEvaluator(const CascadeSystem& system, const TopologicalOrder& order, CascadeOptions options)
    : system_(system),
      options_(options),
      max_iter_(options.max_iter ? options.max_iter : default_max_iter(order)),
      state_(system.dependency.libraries(), 1.0),
      next_(system.dependency.libraries(), 1.0),
      single_(ContributorState::all_active(system.contribution.contributors())) {
    check_inputs(single_, system_);
    if (!(options_.tolerance > 0.0)) throw ModelError("tolerance must be positive");
}

ConeEvaluator::ConeRun ConeEvaluator::iterate(const ContributorState& contributors, std::vector<std::size_t> seeds) {
    ConeRun run;
    run.cone = downstream_cone(system_.dependency, seeds);
    for (std::size_t step = 1; step <= max_iter_; ++step) {
        double delta = 0.0;
        for (std::size_t j : run.cone) {
            next_[j] = update_library(j, state_, contributors, system_);
            delta = std::max(delta, std::abs(next_[j] - state_[j]));
        }
        for (std::size_t j : run.cone) state_[j] = next_[j];
        run.steps = step;
        if (delta < options_.tolerance) {
            run.converged = true;
            run.iterations = step - 1;
            break;
        }
    }
    if (!run.converged) run.iterations = run.steps;
    return run;
}

void ConeEvaluator::reset(const std::vector<std::size_t>& cone) {
    for (std::size_t j : cone) state_[j] = next_[j] = 1.0;
}

CascadeResult ConeEvaluator::run(const ContributorState& contributors) {
    check_inputs(contributors, system_);
    std::vector<std::size_t> seeds;
    for (std::size_t i = 0; i < contributors.values.size(); ++i) {
        if (contributors.values[i] == 1.0) continue;
        for (const auto& e : system_.contribution.row(i)) seeds.push_back(e.index);
    }
    ConeRun r = iterate(contributors, std::move(seeds));
    CascadeResult result{LibraryState{state_}, r.iterations, r.steps, r.converged};
    reset(r.cone);
    return result;
}

CascadeResult ConeEvaluator::remove_contributor(std::size_t contributor) {
    single_.values.at(contributor) = 0.0;
    std::vector<std::size_t> seeds;
    for (const auto& e : system_.contribution.row(contributor)) seeds.push_back(e.index);
    ConeRun r = iterate(single_, std::move(seeds));
    single_.values[contributor] = 1.0;
    CascadeResult result{LibraryState{state_}, r.iterations, r.steps, r.converged};
    reset(r.cone);
    return result;
}

double ConeEvaluator::weighted_risk_of_removal(std::size_t contributor, const std::vector<double>& weights) {
    single_.values.at(contributor) = 0.0;
    std::vector<std::size_t> seeds;
    for (const auto& e : system_.contribution.row(contributor)) seeds.push_back(e.index);
    ConeRun r = iterate(single_, std::move(seeds));
    single_.values[contributor] = 1.0;
    if (!r.converged) {
        reset(r.cone);
        throw ModelError("cascade did not converge within " + std::to_string(max_iter_) + " steps");
    }
    double total = 0.0;
    for (std::size_t j : r.cone) total += (1.0 - state_[j]) * weights[j];
    reset(r.cone);
    return total;
}

} // namespace ossrisk
