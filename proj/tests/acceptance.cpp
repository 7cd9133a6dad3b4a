// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails. Criteria that need the public dataset run
// when OSSRISK_DATASET_DIR points at a directory with libraries.csv,
// dependencies.csv, commits.csv and optionally bots.csv; otherwise they SKIP.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../tools/cli.hpp"
#include "ossrisk/cascade.hpp"
#include "ossrisk/intervention.hpp"
#include "ossrisk/metrics.hpp"
#include "support.hpp"

using namespace ossrisk;
using Clock = std::chrono::steady_clock;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

int failures = 0;

void report(int number, const std::string& title, const Verdict& v) {
    const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
    if (v.outcome == Outcome::fail) ++failures;
    std::cout << tag << "  " << number << ". " << title << ": " << v.detail << std::endl;
}

template <class F>
void criterion(int number, const std::string& title, F check) {
    try {
        report(number, title, check());
    } catch (const std::exception& e) {
        report(number, title, {Outcome::fail, std::string("exception: ") + e.what()});
    }
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct Instance {
    EcosystemModel model;
    ProductionFunction production = ProductionFunction::cobb_douglas();
    SurplusVector surplus;
    ImmunizedSet immunized;
    ContributorState contributors;

    CascadeSystem system() const { return {model.contribution, model.dependency, production, surplus, immunized}; }
};

// Random DAG, random single removal, random surplus in [0,1], random immunization,
// production function cycling through the three forms.
std::vector<Instance> random_instances(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ProductionFunction pfs[] = {ProductionFunction::cobb_douglas(), ProductionFunction::leontief(),
                                      ProductionFunction::linear()};
    std::vector<Instance> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        Instance in{build_model(testing::random_snapshot(rng, 12, 8)), pfs[t % 3]};
        const auto n = in.model.libraries.size();
        if (t % 2 == 1) {
            in.surplus.values.resize(n);
            for (auto& x : in.surplus.values) x = unit(rng);
        }
        in.immunized = ImmunizedSet(n);
        if (t % 4 >= 2)
            for (std::size_t j = 0; j < n; ++j)
                if (unit(rng) < 0.2) in.immunized.insert(j);
        in.contributors = ContributorState::all_active(in.model.contributors.size());
        in.contributors.values[rng() % in.contributors.values.size()] = 0.0;
        out.push_back(std::move(in));
    }
    return out;
}

const std::vector<std::string> kStrategies{"rts", "downloads", "transitive", "stars", "age", "random"};

std::optional<std::filesystem::path> dataset_dir() {
    const char* env = std::getenv("OSSRISK_DATASET_DIR");
    if (!env || !*env) return std::nullopt;
    return std::filesystem::path(env);
}

EcosystemModel load_dataset(const std::filesystem::path& dir) {
    SnapshotFiles files{dir / "libraries.csv", dir / "dependencies.csv", dir / "commits.csv", std::nullopt};
    if (std::filesystem::exists(dir / "bots.csv")) files.bots = dir / "bots.csv";
    auto snapshot = load_snapshot(files);
    break_cycles(snapshot);
    return build_model(snapshot);
}

Verdict toy_exactness() {
    auto m = build_model(testing::toy_snapshot());
    const auto pf = ProductionFunction::cobb_douglas();
    SurplusVector none;
    ImmunizedSet nobody;
    CascadeSystem sys{m.contribution, m.dependency, pf, none, nobody};
    auto sc = ContributorState::all_active(3);
    sc.values[m.contributors.at("c2")] = 0.0;

    const std::vector<std::vector<double>> expected{
        {0.0, std::sqrt(0.75), 1.0, 1.0},
        {0.0, 0.0, std::sqrt((std::sqrt(3.0) + 2.0) / 4.0), 0.0},
        {0.0, 0.0, 0.0, 0.0},
    };
    auto s1 = single_step(LibraryState::all_healthy(4), sc, sys);
    auto s2 = single_step(s1, sc, sys);

    std::vector<double> runtimes;
    CascadeResult fin;
    for (int r = 0; r < 101; ++r) {
        auto start = Clock::now();
        fin = propagate(sc, sys, m.topology);
        runtimes.push_back(seconds_since(start));
    }
    std::nth_element(runtimes.begin(), runtimes.begin() + 50, runtimes.end());
    const double median = runtimes[50];

    double worst = 0.0;
    const std::vector<const LibraryState*> got{&s1, &s2, &fin.final_state};
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(got[k]->values[j] - expected[k][j]));
    bool ok = fin.converged && worst <= 1e-12 && median < 1e-3;
    return {ok ? Outcome::pass : Outcome::fail,
            "max deviation " + fmt(worst) + " (tol 1e-12), median runtime " + fmt(median * 1e6) + " us (limit 1000 us)"};
}

Verdict production_spots() {
    auto cd = ProductionFunction::cobb_douglas(0.5);
    const double a = cd.failure(0.5, 2.0 / 3.0), b = cd.survival(1.0, 0.6);
    const double ea = 1.0 - std::sqrt(1.0 / 3.0);
    bool ok = std::abs(a - ea) <= 1e-9 && std::abs(a - 0.42265) <= 5e-6 && std::abs(b - 0.77460) <= 5e-6 &&
              std::abs(b - std::sqrt(0.6)) <= 1e-9;
    return {ok ? Outcome::pass : Outcome::fail,
            "failure(1/2, 2/3) = " + fmt(a) + ", survival(1, 0.6) = " + fmt(b) + " (tol 1e-9 against closed forms)"};
}

Verdict oracle_equivalence(const std::vector<Instance>& instances) {
    auto start = Clock::now();
    double worst = 0.0;
    std::size_t unconverged = 0;
    for (const auto& in : instances) {
        auto sys = in.system();
        auto fixed = propagate(in.contributors, sys, in.model.topology);
        auto oracle = evaluate_topological(in.contributors, sys, in.model.topology);
        unconverged += !fixed.converged;
        for (std::size_t j = 0; j < oracle.values.size(); ++j)
            worst = std::max(worst, std::abs(fixed.final_state.values[j] - oracle.values[j]));
    }
    const double elapsed = seconds_since(start);
    bool ok = instances.size() >= 1000 && worst <= 1e-9 && unconverged == 0 && elapsed < 30.0;
    return {ok ? Outcome::pass : Outcome::fail,
            std::to_string(instances.size()) + " cases, max deviation " + fmt(worst) + " (tol 1e-9), " +
                std::to_string(unconverged) + " unconverged, " + fmt(elapsed) + " s (limit 30 s)"};
}

Verdict monotonicity(const std::vector<Instance>& instances) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t violations = 0, checks = 0;
    double min_rts = 0.0;
    auto record = [&](bool ok) {
        ++checks;
        violations += !ok;
    };

    for (const auto& in : instances) {
        const auto n = in.model.libraries.size();
        const auto& order = in.model.topology;
        auto base = propagate(in.contributors, in.system(), order).final_state.values;

        auto lower = in.contributors;
        for (auto& v : lower.values) v *= unit(rng);
        auto lowered = propagate(lower, in.system(), order).final_state.values;

        Instance raised_in{in.model, in.production, in.surplus, in.immunized, in.contributors};
        raised_in.surplus.values.resize(n, 0.0);
        for (auto& x : raised_in.surplus.values) x = std::min(1.0, x + unit(rng));
        auto raised = propagate(in.contributors, raised_in.system(), order).final_state.values;

        Instance immune_in{in.model, in.production, in.surplus, in.immunized, in.contributors};
        immune_in.immunized.insert(rng() % n);
        auto immune = propagate(in.contributors, immune_in.system(), order).final_state.values;

        for (std::size_t j = 0; j < n; ++j) {
            record(lowered[j] <= base[j] + 1e-12);
            record(raised[j] >= base[j] - 1e-12);
            record(immune[j] >= base[j] - 1e-12);
        }

        RiskSettings settings;
        settings.production = in.production;
        auto rts = risk_transmission_scores(in.model, settings);
        for (const auto& s : rts.scores) {
            min_rts = std::min(min_rts, s.value);
            record(s.value >= -1e-9);
        }

        InterventionConfig config;
        for (std::size_t k = 1; k <= n; ++k) config.k_values.push_back(k);
        for (const auto& name : kStrategies) {
            auto curve = intervention_sweep(in.model, RankingStrategy::from_name(name, 5), config, settings, &rts);
            double previous = curve.baseline;
            for (const auto& [k, g] : curve.points) {
                record(g <= previous + 1e-12);
                previous = g;
            }
        }
    }
    return {violations == 0 ? Outcome::pass : Outcome::fail,
            std::to_string(checks) + " checks over " + std::to_string(instances.size()) + " instances, " +
                std::to_string(violations) + " violations, min RTS " + fmt(min_rts)};
}

Verdict convergence(const std::vector<Instance>& instances) {
    std::size_t over_depth = 0, over_cap = 0, zero_surplus = 0;
    for (const auto& in : instances) {
        auto r = propagate(in.contributors, in.system(), in.model.topology);
        if (in.surplus.empty()) {
            ++zero_surplus;
            over_depth += !(r.converged && r.steps <= in.model.topology.depth + 2);
        } else {
            over_cap += !(r.converged && r.steps <= default_max_iter(in.model.topology));
        }
    }
    std::string detail = std::to_string(zero_surplus) + " runs with X = 0, " + std::to_string(over_depth) +
                         " beyond depth + 2; " + std::to_string(instances.size() - zero_surplus) +
                         " runs with surplus, " + std::to_string(over_cap) + " beyond max_iter";
    bool ok = over_depth == 0 && over_cap == 0;

    if (auto dir = dataset_dir()) {
        auto model = load_dataset(*dir);
        const auto pf = ProductionFunction::cobb_douglas();
        SurplusVector none;
        ImmunizedSet nobody;
        CascadeSystem sys{model.contribution, model.dependency, pf, none, nobody};
        ConeEvaluator cone(sys, model.topology);
        std::size_t worst = 0, unconverged = 0;
        for (std::size_t c = 0; c < model.contributors.size(); ++c) {
            auto r = cone.remove_contributor(c);
            worst = std::max(worst, r.iterations);
            unconverged += !r.converged;
        }
        ok = ok && worst <= 40 && unconverged == 0;
        detail += "; dataset: max " + std::to_string(worst) + " iterations per scenario (limit 40)";
    } else {
        detail += "; dataset part skipped (OSSRISK_DATASET_DIR unset)";
    }
    return {ok ? Outcome::pass : Outcome::fail, detail};
}

Verdict scale_invariance() {
    std::mt19937_64 rng(1000);
    double worst = 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
    auto compare = [&](const EcosystemSnapshot& s) {
        auto scaled = s;
        for (auto& lib : scaled.libraries) lib.downloads *= 1000;
        auto a = build_model(s), b = build_model(scaled);
        RiskSettings settings;
        auto ia = all_contributor_impacts(a, settings), ib = all_contributor_impacts(b, settings);
        for (std::size_t c = 0; c < ia.impacts.size(); ++c)
            if (ia.impacts[c].value != 0.0) worst = std::max(worst, rel(ia.impacts[c].value, ib.impacts[c].value));
            else worst = std::max(worst, std::abs(ib.impacts[c].value));
        if (ia.global != 0.0) worst = std::max(worst, rel(ia.global, ib.global));
        auto ra = risk_transmission_scores(a, settings), rb = risk_transmission_scores(b, settings);
        for (std::size_t i = 0; i < ra.scores.size(); ++i)
            if (ra.scores[i].value != 0.0) worst = std::max(worst, rel(ra.scores[i].value, rb.scores[i].value));
            else worst = std::max(worst, std::abs(rb.scores[i].value));
    };
    compare(testing::toy_snapshot(37));
    for (int t = 0; t < 300; ++t) compare(testing::random_snapshot(rng, 12, 8));
    return {worst <= 1e-9 ? Outcome::pass : Outcome::fail,
            "toy + 300 random ecosystems, max relative change " + fmt(worst) + " (tol 1e-9)"};
}

Verdict full_data_reproduction() {
    auto dir = dataset_dir();
    if (!dir) return {Outcome::skip, "needs the published snapshot (set OSSRISK_DATASET_DIR)"};
    auto model = load_dataset(*dir);
    RiskSettings settings;
    settings.jobs = std::max(1u, std::thread::hardware_concurrency());

    std::vector<std::string> notes;
    bool ok = true;
    auto within = [&](const std::string& what, double got, double want, double tol) {
        const bool hit = std::abs(got - want) <= tol;
        ok = ok && hit;
        notes.push_back(what + " " + fmt(got) + (hit ? "" : " (expected " + fmt(want) + ")"));
    };

    auto impacts = all_contributor_impacts(model, settings);
    std::map<std::string, double> impact_map;
    for (const auto& s : impacts.impacts) impact_map[s.id] = s.value;
    within("top-10 contributor share", top_share(impact_map, 10), 0.43, 0.03);

    auto rts = risk_transmission_scores(model, settings);
    std::map<std::string, double> rts_map;
    for (const auto& s : rts.scores) rts_map[s.id] = s.value;
    within("top-10 RTS share", top_share(rts_map, 10), 0.22, 0.03);

    auto direct = direct_dependency_counts(model.dependency, DependencyDirection::downstream);
    auto transitive = transitive_dependency_counts(model.dependency, DependencyDirection::downstream);
    std::vector<std::size_t> by_direct(model.libraries.size());
    std::iota(by_direct.begin(), by_direct.end(), std::size_t{0});
    std::stable_sort(by_direct.begin(), by_direct.end(),
                     [&](std::size_t a, std::size_t b) { return transitive[a] > transitive[b]; });
    by_direct.resize(std::min<std::size_t>(1000, by_direct.size()));
    std::map<std::string, double> r, d, t, s;
    for (std::size_t j : by_direct) {
        const auto& id = model.libraries.id(j);
        r[id] = rts_map[id];
        d[id] = static_cast<double>(direct[j]);
        t[id] = static_cast<double>(transitive[j]);
        s[id] = static_cast<double>(model.stars[j]);
    }
    within("rho(RTS, direct)", spearman_rank_correlation(r, d), 0.56, 0.05);
    within("rho(RTS, transitive)", spearman_rank_correlation(r, t), 0.54, 0.05);
    within("rho(RTS, stars)", spearman_rank_correlation(r, s), 0.42, 0.05);

    InterventionConfig config;
    for (std::size_t k : {1, 2, 5, 10, 20, 50, 100, 250, 500, 1000})
        if (k <= model.libraries.size()) config.k_values.push_back(k);
    std::map<std::string, InterventionCurve> curves;
    for (const auto& name : kStrategies)
        curves[name] = intervention_sweep(model, RankingStrategy::from_name(name, 1), config, settings, &rts);
    const std::vector<std::string> expected_order{"rts", "downloads", "transitive", "stars", "age", "random"};
    for (std::size_t k : {10, 100, 1000}) {
        if (k > config.k_values.back()) continue;
        for (std::size_t i = 0; i + 1 < expected_order.size(); ++i) {
            const double hi = cumulative_reduction(curves[expected_order[i]], k);
            const double lo = cumulative_reduction(curves[expected_order[i + 1]], k);
            if (hi < lo) {
                ok = false;
                notes.push_back(expected_order[i] + " < " + expected_order[i + 1] + " at k=" + std::to_string(k));
            }
        }
    }
    if (config.k_values.back() >= 1000) {
        const double random_k = cumulative_reduction(curves["random"], 1000);
        ok = ok && random_k <= 0.005;
        notes.push_back("random at k=1000 " + fmt(random_k));
    }
    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
    return {ok ? Outcome::pass : Outcome::fail, detail};
}

Verdict determinism() {
    testing::TempDir a, b, c;
    auto toy = testing::fixture("toy");
    auto args = [&](const testing::TempDir& dir, const std::string& jobs) {
        return std::vector<std::string>{"intervene",
                                        "--libraries", (toy / "libraries.csv").string(),
                                        "--dependencies", (toy / "dependencies.csv").string(),
                                        "--commits", (toy / "commits.csv").string(),
                                        "--strategy", "rts,downloads,transitive,stars,age,random",
                                        "--k", "1,2,3,4",
                                        "--seed", "7",
                                        "--jobs", jobs,
                                        "--output-dir", dir.path().string()};
    };
    std::ostringstream out, err;
    for (auto [dir, jobs] : {std::pair{&a, "1"}, std::pair{&b, "1"}, std::pair{&c, "4"}})
        if (ossrisk::cli::execute(args(*dir, jobs), out, err) != 0)
            return {Outcome::fail, "intervene failed: " + err.str()};

    std::size_t compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
        if (entry.path().extension() != ".csv") continue;
        const auto name = entry.path().filename();
        const auto bytes = testing::read_file(entry.path());
        if (bytes != testing::read_file(b.path() / name) || bytes != testing::read_file(c.path() / name))
            return {Outcome::fail, name.string() + " differs between runs"};
        ++compared;
    }
    // a second random ranking on a larger ecosystem
    std::mt19937_64 rng(8);
    auto m = build_model(testing::random_snapshot(rng, 12, 8));
    auto random = RankingStrategy::from_name("random", 12345);
    const bool same_ranking = rank_libraries(m, random) == rank_libraries(m, random);
    bool ok = compared > 0 && same_ranking;
    return {ok ? Outcome::pass : Outcome::fail,
            std::to_string(compared) + " CSV file(s) byte-identical across 3 runs (seed 7, jobs 1/1/4)"};
}

} // namespace

int main() {
    const auto instances = random_instances(1200, 20240101);

    criterion(1, "toy ecosystem exactness", toy_exactness);
    criterion(2, "production function spot values", production_spots);
    criterion(3, "oracle equivalence on random DAGs", [&] { return oracle_equivalence(instances); });
    criterion(4, "monotonicity suite", [&] { return monotonicity(instances); });
    criterion(5, "convergence bound", [&] { return convergence(instances); });
    criterion(6, "download scale invariance", scale_invariance);
    criterion(7, "full-data reproduction", full_data_reproduction);
    criterion(8, "intervene determinism", determinism);

    std::cout << (failures == 0 ? "all criteria met or skipped" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
