#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ossrisk/cascade.hpp"
#include "ossrisk/model.hpp"
#include "ossrisk/production.hpp"

namespace ossrisk {

struct RiskVector {
    std::vector<double> values;
    bool weighted = false;

    double sum() const;
};

struct ScoredId {
    std::string id;
    double value = 0.0;

    bool operator==(const ScoredId&) const = default;
};

// Descending value, ascending id on ties.
std::vector<ScoredId> ranked(std::vector<ScoredId> entries);

struct ImpactTable {
    std::vector<ScoredId> impacts;  // contributor index order
    double global = 0.0;            // G, summed in index order
};

struct RtsTable {
    std::vector<ScoredId> scores;  // candidate libraries, library index order
    double baseline = 0.0;         // G without immunization

    std::optional<double> score(const std::string& library_id) const;
};

// Engine settings shared by every scenario of a metric computation.
struct RiskSettings {
    ProductionFunction production = ProductionFunction::cobb_douglas();
    CascadeOptions cascade;
    unsigned jobs = 1;  // worker threads; results do not depend on it
};

// R_i = 1 - S^L_Fin(i). Throws ModelError for a non-converged result.
RiskVector library_risks(const CascadeResult& result);

// dl_i / sum_j dl_j. Throws ModelError when all downloads are zero.
std::vector<double> download_shares(std::span<const std::uint64_t> downloads);

RiskVector download_weighted_risks(const RiskVector& risks, std::span<const std::uint64_t> downloads);

// I_j: sum of download-weighted risks after removing contributor `contributor_id` alone.
// Throws std::out_of_range for an unknown id.
double contributor_impact(const EcosystemModel& model, const std::string& contributor_id,
                          const RiskSettings& settings, const SurplusVector& surplus = {},
                          const ImmunizedSet& immunized = {});

// Impacts of the given contributor indices, in that order, computed over the
// downstream cone of each removal. Zero-commit contributors get 0.
std::vector<double> removal_impacts(const EcosystemModel& model, const RiskSettings& settings,
                                    const SurplusVector& surplus, const ImmunizedSet& immunized,
                                    std::span<const std::size_t> contributors);

// Contributors whose removal cone can reach any of `libraries`: everyone with
// commits to one of them or to one of their transitive upstreams. Ascending.
std::vector<std::size_t> contributors_reaching(const EcosystemModel& model, std::span<const std::size_t> libraries);

// I_j for every contributor plus G = sum_j I_j. Contributors without window
// commits get an exact zero without running a cascade.
ImpactTable all_contributor_impacts(const EcosystemModel& model, const RiskSettings& settings,
                                    const SurplusVector& surplus = {}, const ImmunizedSet& immunized = {});

// RTS_i = G - G_i, where G_i is G with library i immunized. Only scenarios whose
// downstream cone contains i can change, so only those are rerun; the score is
// accumulated as a sum of per-scenario differences. candidates: library ids,
// all libraries when absent. Throws std::out_of_range for an unknown id.
RtsTable risk_transmission_scores(const EcosystemModel& model, const RiskSettings& settings,
                                  const std::optional<std::vector<std::string>>& candidates = std::nullopt);

// Same quantity computed by rerunning every removal with each candidate
// immunized. Quadratic; used to cross-check the pruned path.
RtsTable risk_transmission_scores_naive(const EcosystemModel& model, const RiskSettings& settings,
                                        const std::optional<std::vector<std::string>>& candidates = std::nullopt);

// Share of the total held by the k largest values. Throws std::invalid_argument
// for k == 0, empty input or a zero total.
double top_share(const std::map<std::string, double>& values, std::size_t k);

// Spearman's rho with average ranks for ties (Pearson correlation of ranks).
// Throws std::invalid_argument for mismatched keys or fewer than 3 keys.
double spearman_rank_correlation(const std::map<std::string, double>& a, const std::map<std::string, double>& b);

// Average ranks, 1-based, ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

} // namespace ossrisk
