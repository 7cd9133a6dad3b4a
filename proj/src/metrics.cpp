#include "ossrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "ossrisk/error.hpp"
#include "parallel.hpp"

namespace ossrisk {

namespace {

CascadeSystem system_for(const EcosystemModel& model, const RiskSettings& settings, const SurplusVector& surplus,
                         const ImmunizedSet& immunized) {
    return CascadeSystem{model.contribution, model.dependency, settings.production, surplus, immunized};
}

std::vector<std::size_t> candidate_indices(const EcosystemModel& model,
                                           const std::optional<std::vector<std::string>>& candidates) {
    std::vector<std::size_t> out;
    if (!candidates) {
        out.resize(model.libraries.size());
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    for (const auto& id : *candidates) out.push_back(model.libraries.at(id));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

double RiskVector::sum() const {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

std::vector<ScoredId> ranked(std::vector<ScoredId> entries) {
    std::sort(entries.begin(), entries.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.id < b.id;
    });
    return entries;
}

std::optional<double> RtsTable::score(const std::string& library_id) const {
    for (const auto& s : scores)
        if (s.id == library_id) return s.value;
    return std::nullopt;
}

RiskVector library_risks(const CascadeResult& result) {
    if (!result.converged) throw ModelError("library risks need a converged cascade");
    RiskVector r;
    r.values.reserve(result.final_state.values.size());
    for (double s : result.final_state.values) r.values.push_back(1.0 - s);
    return r;
}

std::vector<double> download_shares(std::span<const std::uint64_t> downloads) {
    long double total = 0;
    for (auto dl : downloads) total += static_cast<long double>(dl);
    if (total == 0) throw ModelError("download weights undefined: every library has zero downloads");
    std::vector<double> shares;
    shares.reserve(downloads.size());
    for (auto dl : downloads) shares.push_back(static_cast<double>(static_cast<long double>(dl) / total));
    return shares;
}

RiskVector download_weighted_risks(const RiskVector& risks, std::span<const std::uint64_t> downloads) {
    if (risks.values.size() != downloads.size()) throw ModelError("risk vector and downloads differ in length");
    auto shares = download_shares(downloads);
    RiskVector out{std::vector<double>(risks.values.size()), true};
    for (std::size_t i = 0; i < shares.size(); ++i) out.values[i] = risks.values[i] * shares[i];
    return out;
}

double contributor_impact(const EcosystemModel& model, const std::string& contributor_id, const RiskSettings& settings,
                          const SurplusVector& surplus, const ImmunizedSet& immunized) {
    std::size_t r = model.contributors.at(contributor_id);
    auto state = ContributorState::all_active(model.contributors.size());
    state.values[r] = 0.0;
    auto result = propagate(state, system_for(model, settings, surplus, immunized), model.topology, settings.cascade);
    return download_weighted_risks(library_risks(result), model.downloads).sum();
}

std::vector<double> removal_impacts(const EcosystemModel& model, const RiskSettings& settings,
                                    const SurplusVector& surplus, const ImmunizedSet& immunized,
                                    std::span<const std::size_t> contributors) {
    const auto weights = download_shares(model.downloads);
    const CascadeSystem system = system_for(model, settings, surplus, immunized);
    std::vector<double> impacts(contributors.size(), 0.0);
    detail::parallel_for(contributors.size(), settings.jobs, [&] {
        return [&, evaluator = ConeEvaluator(system, model.topology, settings.cascade)](std::size_t k) mutable {
            std::size_t r = contributors[k];
            if (model.contributor_commits.at(r) == 0) return;
            impacts[k] = evaluator.weighted_risk_of_removal(r, weights);
        };
    });
    return impacts;
}

std::vector<std::size_t> contributors_reaching(const EcosystemModel& model, std::span<const std::size_t> libraries) {
    std::vector<char> seen(model.libraries.size(), 0);
    std::vector<std::size_t> frontier;
    for (std::size_t j : libraries) {
        if (!seen.at(j)) {
            seen[j] = 1;
            frontier.push_back(j);
        }
    }
    std::vector<char> chosen(model.contributors.size(), 0);
    while (!frontier.empty()) {
        std::size_t v = frontier.back();
        frontier.pop_back();
        for (const auto& e : model.contribution.column(v)) chosen[e.index] = 1;
        for (const auto& e : model.dependency.upstreams(v)) {
            if (!seen[e.index]) {
                seen[e.index] = 1;
                frontier.push_back(e.index);
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < chosen.size(); ++i)
        if (chosen[i]) out.push_back(i);
    return out;
}

ImpactTable all_contributor_impacts(const EcosystemModel& model, const RiskSettings& settings,
                                    const SurplusVector& surplus, const ImmunizedSet& immunized) {
    std::vector<std::size_t> everyone(model.contributors.size());
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    auto impacts = removal_impacts(model, settings, surplus, immunized, everyone);

    ImpactTable table;
    table.impacts.reserve(impacts.size());
    for (std::size_t r = 0; r < impacts.size(); ++r) {
        table.impacts.push_back({model.contributors.id(r), impacts[r]});
        table.global += impacts[r];
    }
    return table;
}

RtsTable risk_transmission_scores(const EcosystemModel& model, const RiskSettings& settings,
                                  const std::optional<std::vector<std::string>>& candidates) {
    const auto libraries = candidate_indices(model, candidates);
    const auto weights = download_shares(model.downloads);

    std::vector<std::size_t> everyone(model.contributors.size());
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    const SurplusVector no_surplus;
    const auto baseline = removal_impacts(model, settings, no_surplus, ImmunizedSet{}, everyone);

    RtsTable table;
    for (double v : baseline) table.baseline += v;

    std::vector<double> scores(libraries.size(), 0.0);
    detail::parallel_for(libraries.size(), settings.jobs, [&] {
        // the evaluator's system refers to this set, so it must not move
        auto immunized = std::make_shared<ImmunizedSet>(model.libraries.size());
        auto evaluator = std::make_shared<ConeEvaluator>(system_for(model, settings, no_surplus, *immunized),
                                                         model.topology, settings.cascade);
        return [&, immunized, evaluator](std::size_t k) {
            const std::size_t single[] = {libraries[k]};
            immunized->insert(libraries[k]);
            double score = 0.0;
            for (std::size_t r : contributors_reaching(model, single)) {
                if (model.contributor_commits[r] == 0) continue;
                score += baseline[r] - evaluator->weighted_risk_of_removal(r, weights);
            }
            immunized->erase(libraries[k]);
            scores[k] = score;
        };
    });

    for (std::size_t k = 0; k < libraries.size(); ++k)
        table.scores.push_back({model.libraries.id(libraries[k]), scores[k]});
    return table;
}

RtsTable risk_transmission_scores_naive(const EcosystemModel& model, const RiskSettings& settings,
                                        const std::optional<std::vector<std::string>>& candidates) {
    RtsTable table;
    table.baseline = all_contributor_impacts(model, settings).global;
    for (std::size_t lib : candidate_indices(model, candidates)) {
        ImmunizedSet immunized(model.libraries.size());
        immunized.insert(lib);
        double g = 0.0;
        for (std::size_t r = 0; r < model.contributors.size(); ++r)
            g += contributor_impact(model, model.contributors.id(r), settings, SurplusVector{}, immunized);
        table.scores.push_back({model.libraries.id(lib), table.baseline - g});
    }
    return table;
}

double top_share(const std::map<std::string, double>& values, std::size_t k) {
    if (k == 0) throw std::invalid_argument("top_share needs k >= 1");
    if (values.empty()) throw std::invalid_argument("top_share needs at least one value");
    std::vector<ScoredId> entries;
    double total = 0.0;
    for (const auto& [id, v] : values) {
        entries.push_back({id, v});
        total += v;
    }
    if (total == 0.0) throw std::invalid_argument("top_share undefined for a zero total");
    entries = ranked(std::move(entries));
    double top = 0.0;
    for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) top += entries[i].value;
    return top / total;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman_rank_correlation(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman: key sets differ");
    if (a.size() < 3) throw std::invalid_argument("spearman: need at least 3 keys");
    std::vector<double> xa, xb;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first) throw std::invalid_argument("spearman: key sets differ");
        xa.push_back(ia->second);
        xb.push_back(ib->second);
    }
    auto ra = average_ranks(xa);
    auto rb = average_ranks(xb);
    const double n = static_cast<double>(ra.size());
    const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - mean) * (rb[i] - mean);
        saa += (ra[i] - mean) * (ra[i] - mean);
        sbb += (rb[i] - mean) * (rb[i] - mean);
    }
    if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("spearman: a ranking is constant");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

} // namespace ossrisk
