#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ossrisk/metrics.hpp"
#include "ossrisk/model.hpp"

namespace ossrisk {

struct RankingStrategy {
    enum class Kind { transitive_dependents, downloads, age, stars, random, risk_transmission };

    Kind kind = Kind::risk_transmission;
    std::uint64_t seed = 0;  // used by random only
    DependencyDirection transitive_direction = DependencyDirection::downstream;

    // "transitive", "downloads", "age", "stars", "random", "rts"
    static RankingStrategy from_name(std::string_view name, std::uint64_t seed = 0);
    std::string name() const;
};

// Library ids, most deserving first. Ties by ascending id. `rts` is required
// for risk_transmission and ignored otherwise (std::invalid_argument if missing).
std::vector<std::string> rank_libraries(const EcosystemModel& model, const RankingStrategy& strategy,
                                        const RtsTable* rts = nullptr);

// Reproducible permutation of 0..n-1 from a seed: Fisher-Yates driven by
// mt19937_64 with rejection sampling, so it does not depend on the standard
// library's distribution implementations.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct InterventionConfig {
    double developer_commits = 5.0 / 7.0 * 365.0;  // e
    std::vector<std::size_t> k_values;             // strictly ascending, positive

    // e = 5/7 x window length in days
    static double developer_commits_for_window(double window_days) { return 5.0 / 7.0 * window_days; }
    void validate(std::size_t library_count) const;  // throws std::invalid_argument
};

// X_i = e / N_i for allocated libraries, 1 when N_i = 0, zero elsewhere.
SurplusVector build_surplus(const EcosystemModel& model, const std::vector<std::string>& allocated,
                            double developer_commits);

struct InterventionCurve {
    std::string strategy;
    double baseline = 0.0;                             // G with no allocation (k = 0)
    std::vector<std::pair<std::size_t, double>> points; // (k, G_k), ascending k
};

// For each k, allocates one developer to each of the top-k ranked libraries and
// recomputes G. `rts` as for rank_libraries; computed at baseline when required and null.
InterventionCurve intervention_sweep(const EcosystemModel& model, const RankingStrategy& strategy,
                                     const InterventionConfig& config, const RiskSettings& settings,
                                     const RtsTable* rts = nullptr);

// Trapezoidal area between the baseline and the curve from the first recorded
// k up to `k`, over baseline * (k - k_first). For k == k_first returns
// (baseline - G_k) / baseline. Zero when the baseline is zero.
// Throws std::invalid_argument when k is outside the recorded range.
double cumulative_reduction(const InterventionCurve& curve, std::size_t k);

} // namespace ossrisk
