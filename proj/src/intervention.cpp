#include "ossrisk/intervention.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ossrisk {

namespace {

// Indices sorted by `better(a, b)`, falling back to ascending index (= ascending id).
template <class Better>
std::vector<std::size_t> sorted_indices(std::size_t n, Better better) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), better);
    return idx;
}

std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t range) {
    // reject the low 2^64 mod range outputs so every residue is equally likely
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
        std::uint64_t r = gen();
        if (r >= threshold) return r % range;
    }
}

} // namespace

RankingStrategy RankingStrategy::from_name(std::string_view name, std::uint64_t seed) {
    RankingStrategy s;
    s.seed = seed;
    if (name == "transitive")
        s.kind = Kind::transitive_dependents;
    else if (name == "downloads")
        s.kind = Kind::downloads;
    else if (name == "age")
        s.kind = Kind::age;
    else if (name == "stars")
        s.kind = Kind::stars;
    else if (name == "random")
        s.kind = Kind::random;
    else if (name == "rts")
        s.kind = Kind::risk_transmission;
    else
        throw std::invalid_argument("unknown ranking strategy '" + std::string(name) + "'");
    return s;
}

std::string RankingStrategy::name() const {
    switch (kind) {
    case Kind::transitive_dependents: return "transitive";
    case Kind::downloads: return "downloads";
    case Kind::age: return "age";
    case Kind::stars: return "stars";
    case Kind::random: return "random";
    case Kind::risk_transmission: return "rts";
    }
    return "?";
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::mt19937_64 gen(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[bounded(gen, i)]);
    return p;
}

std::vector<std::string> rank_libraries(const EcosystemModel& model, const RankingStrategy& strategy,
                                        const RtsTable* rts) {
    const std::size_t n = model.libraries.size();
    std::vector<std::size_t> order;
    switch (strategy.kind) {
    case RankingStrategy::Kind::transitive_dependents: {
        auto counts = transitive_dependency_counts(model.dependency, strategy.transitive_direction);
        order = sorted_indices(n, [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
        break;
    }
    case RankingStrategy::Kind::downloads:
        order = sorted_indices(n, [&](std::size_t a, std::size_t b) { return model.downloads[a] > model.downloads[b]; });
        break;
    case RankingStrategy::Kind::age:
        order = sorted_indices(n, [&](std::size_t a, std::size_t b) { return model.created_at[a] < model.created_at[b]; });
        break;
    case RankingStrategy::Kind::stars:
        order = sorted_indices(n, [&](std::size_t a, std::size_t b) { return model.stars[a] > model.stars[b]; });
        break;
    case RankingStrategy::Kind::random:
        order = seeded_permutation(n, strategy.seed);
        break;
    case RankingStrategy::Kind::risk_transmission: {
        if (!rts) throw std::invalid_argument("risk transmission ranking needs an RTS table");
        // libraries outside the candidate set score 0
        std::vector<double> score(n, 0.0);
        for (const auto& s : rts->scores) score[model.libraries.at(s.id)] = s.value;
        order = sorted_indices(n, [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
        break;
    }
    }
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t j : order) ids.push_back(model.libraries.id(j));
    return ids;
}

void InterventionConfig::validate(std::size_t library_count) const {
    if (!(developer_commits > 0.0)) throw std::invalid_argument("developer commit volume e must be positive");
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        if (k_values[i] == 0) throw std::invalid_argument("k values must be positive");
        if (i > 0 && k_values[i] <= k_values[i - 1]) throw std::invalid_argument("k values must be strictly ascending");
        if (k_values[i] > library_count)
            throw std::invalid_argument("k = " + std::to_string(k_values[i]) + " exceeds the library count " +
                                        std::to_string(library_count));
    }
}

SurplusVector build_surplus(const EcosystemModel& model, const std::vector<std::string>& allocated,
                            double developer_commits) {
    if (!(developer_commits > 0.0)) throw std::invalid_argument("developer commit volume e must be positive");
    SurplusVector x{std::vector<double>(model.libraries.size(), 0.0)};
    for (const auto& id : allocated) {
        std::size_t j = model.libraries.at(id);
        const std::uint64_t commits = model.library_commits[j];
        x.values[j] = commits == 0 ? 1.0 : developer_commits / static_cast<double>(commits);
    }
    return x;
}

InterventionCurve intervention_sweep(const EcosystemModel& model, const RankingStrategy& strategy,
                                     const InterventionConfig& config, const RiskSettings& settings,
                                     const RtsTable* rts) {
    config.validate(model.libraries.size());

    std::vector<std::size_t> everyone(model.contributors.size());
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    const auto baseline = removal_impacts(model, settings, SurplusVector{}, ImmunizedSet{}, everyone);

    InterventionCurve curve;
    curve.strategy = strategy.name();
    for (double v : baseline) curve.baseline += v;

    RtsTable computed;
    if (strategy.kind == RankingStrategy::Kind::risk_transmission && !rts) {
        computed = risk_transmission_scores(model, settings);
        rts = &computed;
    }
    const auto ranking = rank_libraries(model, strategy, rts);

    for (std::size_t k : config.k_values) {
        std::vector<std::string> allocated(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
        const SurplusVector surplus = build_surplus(model, allocated, config.developer_commits);

        // removals whose cone misses every allocated library keep their baseline impact
        std::vector<std::size_t> allocated_idx;
        for (const auto& id : allocated) allocated_idx.push_back(model.libraries.at(id));
        const auto affected = contributors_reaching(model, allocated_idx);
        const auto updated = removal_impacts(model, settings, surplus, ImmunizedSet{}, affected);

        std::vector<double> impacts = baseline;
        for (std::size_t a = 0; a < affected.size(); ++a) impacts[affected[a]] = updated[a];
        double g = 0.0;
        for (double v : impacts) g += v;
        curve.points.emplace_back(k, g);
    }
    return curve;
}

double cumulative_reduction(const InterventionCurve& curve, std::size_t k) {
    if (curve.points.empty()) throw std::invalid_argument("empty intervention curve");
    const std::size_t first = curve.points.front().first;
    const std::size_t last = curve.points.back().first;
    if (k < first || k > last)
        throw std::invalid_argument("k = " + std::to_string(k) + " outside the recorded range [" +
                                    std::to_string(first) + ", " + std::to_string(last) + "]");
    if (curve.baseline <= 0.0) return 0.0;
    const double base = curve.baseline;
    if (k == first) return (base - curve.points.front().second) / base;

    double area = 0.0;
    for (std::size_t p = 1; p < curve.points.size(); ++p) {
        const auto [k0, g0] = curve.points[p - 1];
        auto [k1, g1] = curve.points[p];
        if (k0 >= k) break;
        if (k1 > k) {
            const double t = static_cast<double>(k - k0) / static_cast<double>(k1 - k0);
            g1 = g0 + t * (g1 - g0);
            k1 = k;
        }
        area += 0.5 * ((base - g0) + (base - g1)) * static_cast<double>(k1 - k0);
    }
    return area / (base * static_cast<double>(k - first));
}

} // namespace ossrisk
