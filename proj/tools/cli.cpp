#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "ossrisk/cascade.hpp"
#include "ossrisk/csv.hpp"
#include "ossrisk/error.hpp"
#include "ossrisk/intervention.hpp"
#include "ossrisk/manifest.hpp"
#include "ossrisk/metrics.hpp"
#include "ossrisk/model.hpp"
#include "ossrisk/snapshot.hpp"

namespace ossrisk::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Validation failed; the report has already been printed.
struct Rejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string libraries;
    std::string dependencies;
    std::string commits;
    std::string bots;
    std::string window_start;
    std::string window_end;
    bool raw_commits = false;
    bool break_cycles = false;
    std::string production = "cobb-douglas";
    double cd_exponent = 0.5;
    double tolerance = 1e-12;
    std::size_t max_iter = 0;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::string output_dir = ".";
    std::string transitive_direction = "downstream";
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--libraries", o.libraries, "libraries.csv: id,name,created_at,downloads,stars")->required();
    cmd.add_option("--dependencies", o.dependencies, "dependencies.csv: dependent_id,dependency_id")->required();
    cmd.add_option("--commits", o.commits, "commits.csv: contributor_id,library_id,commit_count")->required();
    cmd.add_option("--bots", o.bots, "bots.csv: contributor_id");
    cmd.add_option("--window-start", o.window_start, "ISO-8601 window start (inclusive)");
    cmd.add_option("--window-end", o.window_end, "ISO-8601 window end (exclusive)");
    cmd.add_flag("--raw-commits", o.raw_commits, "commits file is contributor_id,library_id,timestamp");
    cmd.add_flag("--break-cycles", o.break_cycles, "drop the smallest edge of each dependency cycle");
    cmd.add_option("--production", o.production, "cobb-douglas | leontief | linear")
        ->check(CLI::IsMember({"cobb-douglas", "leontief", "linear"}));
    cmd.add_option("--cd-exponent", o.cd_exponent, "Cobb-Douglas contributor exponent in (0,1)");
    cmd.add_option("--tolerance", o.tolerance, "max-norm convergence tolerance")->check(CLI::PositiveNumber);
    cmd.add_option("--max-iter", o.max_iter, "iteration cap (0: max(depth + 8, 64))");
    cmd.add_option("--seed", o.seed, "seed for the random ranking");
    cmd.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd.add_option("--output-dir", o.output_dir, "directory for output files");
    cmd.add_option("--transitive-direction", o.transitive_direction, "downstream | upstream")
        ->check(CLI::IsMember({"downstream", "upstream"}));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::optional<Timestamp> window_bound(const std::string& text, const char* flag) {
    if (text.empty()) return std::nullopt;
    auto t = parse_iso8601(text);
    if (!t) throw UsageError(std::string(flag) + ": not an ISO-8601 timestamp: " + text);
    return t;
}

struct Loaded {
    EcosystemSnapshot snapshot;
    ValidationReport report;
    RunManifest manifest;
};

Loaded load(const CommonOptions& o, const std::string& command, bool allow_dangling) {
    Loaded l;
    LoadOptions lo;
    lo.window.start = window_bound(o.window_start, "--window-start");
    lo.window.end = window_bound(o.window_end, "--window-end");
    lo.raw_commits = o.raw_commits;
    lo.allow_dangling = allow_dangling;

    SnapshotFiles files{o.libraries, o.dependencies, o.commits, std::nullopt};
    if (!o.bots.empty()) files.bots = fs::path(o.bots);
    l.snapshot = load_snapshot(files, lo);
    if (o.break_cycles) break_cycles(l.snapshot);
    l.report = validate_snapshot(l.snapshot);

    RunManifest& m = l.manifest;
    m.command = command;
    m.add_input("libraries", files.libraries);
    m.add_input("dependencies", files.dependencies);
    m.add_input("commits", files.commits);
    if (files.bots) m.add_input("bots", *files.bots);
    if (lo.window.start) m.window_start = format_iso8601(*lo.window.start);
    if (lo.window.end) m.window_end = format_iso8601(*lo.window.end);
    m.raw_commits = o.raw_commits;
    m.production = o.production;
    m.contributor_exponent = o.cd_exponent;
    m.tolerance = o.tolerance;
    m.max_iter = o.max_iter;
    m.seed = o.seed;
    if (o.break_cycles) {
        auto& broken = m.extra["broken_cycle_edges"] = ordered_json::array();
        for (const auto& e : l.report.broken_edges) broken.push_back({e.dependent, e.dependency});
    }
    return l;
}

void print_report(const ValidationReport& r, std::ostream& out) {
    out << (r.accepted() ? "snapshot accepted" : "snapshot rejected") << '\n';
    out << "cycle edges: " << r.cycle_edges.size() << '\n';
    for (const auto& e : r.cycle_edges) out << "  " << e.dependent << " -> " << e.dependency << '\n';
    out << "dangling references: " << r.dangling_refs.size() << '\n';
    for (const auto& id : r.dangling_refs) out << "  " << id << '\n';
    if (!r.broken_edges.empty()) {
        out << "edges dropped to break cycles: " << r.broken_edges.size() << '\n';
        for (const auto& e : r.broken_edges) out << "  " << e.dependent << " -> " << e.dependency << '\n';
    }
    out << "dropped bot contributors: " << r.dropped_bot_contributors << '\n';
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

ordered_json report_json(const ValidationReport& r) {
    auto edges = [](const std::vector<DependencyEdge>& list) {
        auto a = ordered_json::array();
        for (const auto& e : list) a.push_back({e.dependent, e.dependency});
        return a;
    };
    return {{"accepted", r.accepted()},
            {"cycle_edges", edges(r.cycle_edges)},
            {"dangling_refs", r.dangling_refs},
            {"broken_edges", edges(r.broken_edges)},
            {"dropped_bot_contributors", r.dropped_bot_contributors},
            {"warnings", r.warnings}};
}

EcosystemModel accepted_model(const Loaded& l, std::ostream& err) {
    if (!l.report.accepted()) {
        print_report(l.report, err);
        throw Rejected("snapshot failed validation");
    }
    return build_model(l.snapshot);
}

RiskSettings settings_from(const CommonOptions& o) {
    RiskSettings s;
    try {
        s.production = ProductionFunction::from_name(o.production, o.cd_exponent);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    s.cascade.tolerance = o.tolerance;
    s.cascade.max_iter = o.max_iter;
    s.jobs = o.jobs;
    return s;
}

DependencyDirection direction_from(const CommonOptions& o) {
    return o.transitive_direction == "upstream" ? DependencyDirection::upstream : DependencyDirection::downstream;
}

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        written_.push_back(name);
        return f;
    }

    void write_json(const std::string& name, const ordered_json& j) {
        auto f = open(name);
        f << j.dump(2) << '\n';
    }

    void write_manifest(RunManifest manifest) {
        auto& outputs = manifest.extra["outputs"] = ordered_json::array();
        for (const auto& w : written_) outputs.push_back(w);
        written_.push_back("manifest.json");
        write_json("manifest.json", manifest.to_json());
    }

    const std::vector<std::string>& written() const { return written_; }
    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

using csv::format_double;

void write_scores(std::ostream& f, const std::string& id_col, const std::string& value_col,
                  const std::vector<ScoredId>& rows) {
    csv::write_row(f, {id_col, value_col});
    for (const auto& r : ranked(rows)) csv::write_row(f, {r.id, format_double(r.value)});
}

// --- subcommands ---------------------------------------------------------

int cmd_validate(const CommonOptions& o, std::ostream& out, bool write_files) {
    Loaded l = load(o, "validate", true);
    print_report(l.report, out);
    if (write_files) {
        OutputDir dir(o.output_dir);
        dir.write_json("validation.json", report_json(l.report));
        dir.write_manifest(l.manifest);
    }
    return l.report.accepted() ? 0 : 1;
}

ContributorState read_state_file(const std::string& path, const EcosystemModel& model) {
    auto rows = csv::expect_header(csv::read_file(path), {"contributor_id", "state"}, path);
    auto state = ContributorState::all_active(model.contributors.size());
    for (const auto& row : rows) {
        auto idx = model.contributors.find(row.fields[0]);
        if (!idx) throw InputError(path, row.line, 1, "unknown contributor id '" + row.fields[0] + "'");
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(row.fields[1], &used);
            if (used != row.fields[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError(path, row.line, 2, "expected a number, found '" + row.fields[1] + "'");
        }
        if (!(v >= 0.0 && v <= 1.0)) throw InputError(path, row.line, 2, "state outside [0,1]");
        state.values[*idx] = v;
    }
    return state;
}

int cmd_simulate(const CommonOptions& o, const std::string& remove, const std::string& state_file,
                 std::ostream& out, std::ostream& err) {
    if (remove.empty() == state_file.empty()) throw UsageError("simulate needs exactly one of --remove or --state");
    Loaded l = load(o, "simulate", false);
    EcosystemModel model = accepted_model(l, err);
    RiskSettings settings = settings_from(o);

    ContributorState state = ContributorState::all_active(model.contributors.size());
    if (!remove.empty()) {
        auto ids = split_list(remove);
        std::sort(ids.begin(), ids.end());
        for (const auto& id : ids) {
            auto idx = model.contributors.find(id);
            if (!idx) throw UsageError("--remove: unknown contributor '" + id + "'");
            state.values[*idx] = 0.0;
        }
        l.manifest.extra["removed"] = ids;
    } else {
        state = read_state_file(state_file, model);
        l.manifest.add_input("contributor_state", state_file);
    }

    SurplusVector surplus;
    ImmunizedSet immunized;
    CascadeSystem system{model.contribution, model.dependency, settings.production, surplus, immunized};
    CascadeResult result = propagate(state, system, model.topology, settings.cascade);
    if (!result.converged) err << "cascade did not converge within the iteration cap\n";

    RiskVector risks;
    for (double v : result.final_state.values) risks.values.push_back(1.0 - v);
    RiskVector weighted = download_weighted_risks(risks, model.downloads);

    OutputDir dir(o.output_dir);
    {
        auto f = dir.open("final_state.csv");
        csv::write_row(f, {"library_id", "state", "risk", "download_weighted_risk"});
        for (std::size_t j = 0; j < model.libraries.size(); ++j)
            csv::write_row(f, {model.libraries.id(j), format_double(result.final_state.values[j]),
                               format_double(risks.values[j]), format_double(weighted.values[j])});
    }
    l.manifest.extra["converged"] = result.converged;
    l.manifest.extra["iterations"] = result.iterations;
    l.manifest.extra["download_weighted_risk"] = weighted.sum();
    dir.write_manifest(l.manifest);

    out << "iterations: " << result.iterations << (result.converged ? "" : " (not converged)") << '\n';
    out << "download-weighted risk: " << format_double(weighted.sum()) << '\n';
    out << "wrote " << dir.path("final_state.csv").string() << '\n';
    return result.converged ? 0 : 1;
}

int cmd_rank_contributors(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    Loaded l = load(o, "rank-contributors", false);
    EcosystemModel model = accepted_model(l, err);
    ImpactTable table = all_contributor_impacts(model, settings_from(o));

    OutputDir dir(o.output_dir);
    {
        auto f = dir.open("contributor_impacts.csv");
        write_scores(f, "contributor_id", "impact", table.impacts);
    }
    l.manifest.extra["global_risk"] = table.global;
    dir.write_manifest(l.manifest);
    out << "global systemic risk G: " << format_double(table.global) << '\n';
    out << "wrote " << dir.path("contributor_impacts.csv").string() << '\n';
    return 0;
}

std::optional<std::vector<std::string>> candidate_list(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return split_list(text);
}

RtsTable compute_rts(const EcosystemModel& model, const RiskSettings& settings, const std::string& candidates) {
    auto list = candidate_list(candidates);
    if (list)
        for (const auto& id : *list)
            if (!model.libraries.find(id)) throw UsageError("--candidates: unknown library '" + id + "'");
    return risk_transmission_scores(model, settings, list);
}

int cmd_rank_libraries(const CommonOptions& o, const std::string& method, const std::string& candidates,
                       std::ostream& out, std::ostream& err) {
    Loaded l = load(o, "rank-libraries", false);
    EcosystemModel model = accepted_model(l, err);
    RiskSettings settings = settings_from(o);
    l.manifest.extra["method"] = method;

    std::vector<ScoredId> rows;
    std::string column;
    const std::size_t n = model.libraries.size();
    if (method == "rts") {
        RtsTable rts = compute_rts(model, settings, candidates);
        rows = rts.scores;
        column = "rts";
        l.manifest.extra["global_risk"] = rts.baseline;
    } else if (method == "transitive") {
        auto counts = transitive_dependency_counts(model.dependency, direction_from(o));
        for (std::size_t j = 0; j < n; ++j) rows.push_back({model.libraries.id(j), static_cast<double>(counts[j])});
        column = o.transitive_direction == "upstream" ? "transitive_dependencies" : "transitive_dependents";
    } else if (method == "downloads") {
        for (std::size_t j = 0; j < n; ++j) rows.push_back({model.libraries.id(j), static_cast<double>(model.downloads[j])});
        column = "downloads";
    } else if (method == "stars") {
        for (std::size_t j = 0; j < n; ++j) rows.push_back({model.libraries.id(j), static_cast<double>(model.stars[j])});
        column = "stars";
    }

    OutputDir dir(o.output_dir);
    const std::string name = "library_ranking_" + method + ".csv";
    {
        auto f = dir.open(name);
        if (method == "age") {
            csv::write_row(f, {"library_id", "created_at"});
            for (const auto& id : rank_libraries(model, RankingStrategy::from_name("age")))
                csv::write_row(f, {id, format_iso8601(model.created_at[model.libraries.at(id)])});
        } else {
            write_scores(f, "library_id", column, rows);
        }
    }
    dir.write_manifest(l.manifest);
    out << "wrote " << dir.path(name).string() << '\n';
    return 0;
}

std::vector<std::size_t> parse_k_values(const std::string& text, std::size_t library_count) {
    std::vector<std::size_t> ks;
    if (text.empty()) {
        for (std::size_t k : {1, 2, 5, 10, 20, 50, 100, 250, 500, 1000})
            if (k <= library_count) ks.push_back(k);
        return ks;
    }
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        unsigned long long k = 0;
        try {
            k = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw UsageError("--k: not a positive integer: " + item);
        ks.push_back(static_cast<std::size_t>(k));
    }
    return ks;
}

int cmd_intervene(const CommonOptions& o, const std::string& strategies_text, const std::string& k_text,
                  std::optional<double> developer_commits, const std::string& candidates, std::ostream& out,
                  std::ostream& err) {
    Loaded l = load(o, "intervene", false);
    EcosystemModel model = accepted_model(l, err);
    RiskSettings settings = settings_from(o);

    std::vector<RankingStrategy> strategies;
    const auto names = strategies_text.empty()
                           ? std::vector<std::string>{"rts", "downloads", "transitive", "stars", "age", "random"}
                           : split_list(strategies_text);
    for (const auto& name : names) {
        try {
            RankingStrategy s = RankingStrategy::from_name(name, o.seed.value_or(0));
            s.transitive_direction = direction_from(o);
            strategies.push_back(s);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (std::any_of(strategies.begin(), strategies.end(),
                    [](const auto& s) { return s.kind == RankingStrategy::Kind::random; }) &&
        !o.seed)
        throw UsageError("the random strategy needs --seed");

    InterventionConfig config;
    if (developer_commits) {
        config.developer_commits = *developer_commits;
    } else if (auto days = l.snapshot.window.days()) {
        config.developer_commits = InterventionConfig::developer_commits_for_window(*days);
    }
    config.k_values = parse_k_values(k_text, model.libraries.size());
    try {
        config.validate(model.libraries.size());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::optional<RtsTable> rts;
    if (std::any_of(strategies.begin(), strategies.end(),
                    [](const auto& s) { return s.kind == RankingStrategy::Kind::risk_transmission; }))
        rts = compute_rts(model, settings, candidates);

    std::vector<InterventionCurve> curves;
    for (const auto& s : strategies)
        curves.push_back(intervention_sweep(model, s, config, settings, rts ? &*rts : nullptr));

    OutputDir dir(o.output_dir);
    {
        auto f = dir.open("intervention.csv");
        csv::write_row(f, {"strategy", "k", "global_risk", "cumulative_reduction"});
        for (const auto& c : curves) {
            csv::write_row(f, {c.strategy, "0", format_double(c.baseline), "0"});
            for (const auto& [k, g] : c.points)
                csv::write_row(f, {c.strategy, std::to_string(k), format_double(g),
                                   format_double(cumulative_reduction(c, k))});
        }
    }

    ordered_json config_json = {{"developer_commits", config.developer_commits},
                                {"k_values", config.k_values},
                                {"integration", "trapezoidal over the recorded k grid, from the first k"},
                                {"seed", o.seed ? ordered_json(*o.seed) : nullptr},
                                {"production", settings.production.name()},
                                {"cd_exponent", settings.production.contributor_exponent()},
                                {"tolerance", settings.cascade.tolerance},
                                {"transitive_direction", o.transitive_direction}};
    ordered_json report;
    report["config"] = config_json;
    auto& jc = report["curves"] = ordered_json::array();
    for (const auto& c : curves) {
        ordered_json points = ordered_json::array();
        for (const auto& [k, g] : c.points)
            points.push_back({{"k", k}, {"global_risk", g}, {"cumulative_reduction", cumulative_reduction(c, k)}});
        jc.push_back({{"strategy", c.strategy}, {"baseline", c.baseline}, {"points", points}});
    }
    report["manifest"] = l.manifest.to_json();
    dir.write_json("intervention.json", report);
    l.manifest.extra["intervention"] = config_json;
    dir.write_manifest(l.manifest);

    for (const auto& c : curves) {
        out << c.strategy << ": baseline " << format_double(c.baseline);
        if (!c.points.empty()) {
            const auto k = c.points.back().first;
            out << ", cumulative reduction at k=" << k << ": " << format_double(cumulative_reduction(c, k));
        }
        out << '\n';
    }
    out << "wrote " << dir.path("intervention.csv").string() << '\n';
    return 0;
}

int cmd_report(const CommonOptions& o, std::size_t top_k, std::size_t top_libraries, std::size_t table_size,
               const std::string& candidates, std::ostream& out, std::ostream& err) {
    Loaded l = load(o, "report", false);
    EcosystemModel model = accepted_model(l, err);
    RiskSettings settings = settings_from(o);
    const std::size_t n = model.libraries.size();

    ImpactTable impacts = all_contributor_impacts(model, settings);
    RtsTable rts = compute_rts(model, settings, candidates);
    std::vector<double> rts_by_lib(n, 0.0);
    for (const auto& s : rts.scores) rts_by_lib[model.libraries.at(s.id)] = s.value;

    const auto direct = direct_dependency_counts(model.dependency, DependencyDirection::downstream);
    const auto transitive = transitive_dependency_counts(model.dependency, DependencyDirection::downstream);

    OutputDir dir(o.output_dir);
    {
        auto f = dir.open("contributor_impacts.csv");
        write_scores(f, "contributor_id", "impact", impacts.impacts);
    }
    {
        auto f = dir.open("library_rts.csv");
        write_scores(f, "library_id", "rts", rts.scores);
    }

    // concentration of systemic risk
    {
        auto f = dir.open("concentration.csv");
        csv::write_row(f, {"metric", "k", "top_share"});
        std::map<std::string, double> by_contributor, by_library;
        for (const auto& s : impacts.impacts) by_contributor[s.id] = s.value;
        for (const auto& s : rts.scores) by_library[s.id] = s.value;
        auto emit = [&](const std::string& metric, const std::map<std::string, double>& values) {
            double total = 0.0;
            for (const auto& [id, v] : values) total += v;
            std::string share = total > 0.0 && !values.empty() ? format_double(top_share(values, top_k)) : "";
            csv::write_row(f, {metric, std::to_string(top_k), share});
            out << metric << " top-" << top_k << " share: " << (share.empty() ? "undefined" : share) << '\n';
        };
        emit("contributor_impact", by_contributor);
        emit("library_rts", by_library);
    }

    // rank correlations among the libraries with the most downstream dependents
    std::vector<std::size_t> by_dependents(n);
    std::iota(by_dependents.begin(), by_dependents.end(), std::size_t{0});
    std::stable_sort(by_dependents.begin(), by_dependents.end(),
                     [&](std::size_t a, std::size_t b) { return transitive[a] > transitive[b]; });
    by_dependents.resize(std::min(top_libraries, n));
    {
        auto f = dir.open("correlations.csv");
        csv::write_row(f, {"comparison", "libraries", "spearman"});
        std::map<std::string, double> a, b_direct, b_transitive, b_stars;
        for (std::size_t j : by_dependents) {
            const auto& id = model.libraries.id(j);
            a[id] = rts_by_lib[j];
            b_direct[id] = static_cast<double>(direct[j]);
            b_transitive[id] = static_cast<double>(transitive[j]);
            b_stars[id] = static_cast<double>(model.stars[j]);
        }
        auto emit = [&](const std::string& name, const std::map<std::string, double>& other) {
            std::string rho;
            try {
                rho = format_double(spearman_rank_correlation(a, other));
            } catch (const std::invalid_argument&) {
                rho = "";
            }
            csv::write_row(f, {name, std::to_string(a.size()), rho});
            out << "spearman " << name << ": " << (rho.empty() ? "undefined" : rho) << '\n';
        };
        emit("rts_vs_direct_dependents", b_direct);
        emit("rts_vs_transitive_dependents", b_transitive);
        emit("rts_vs_stars", b_stars);
    }

    // libraries in the top `table_size` by either RTS or transitive dependents
    {
        auto rank_of = [&](const std::vector<double>& score) {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return score[x] > score[y]; });
            std::vector<std::size_t> rank(n);
            for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r + 1;
            return rank;
        };
        std::vector<double> trans_score(transitive.begin(), transitive.end());
        auto rts_rank = rank_of(rts_by_lib);
        auto trans_rank = rank_of(trans_score);
        auto f = dir.open("rank_comparison.csv");
        csv::write_row(f, {"library_id", "rts_rank", "transitive_rank", "rts", "transitive_dependents"});
        for (std::size_t j = 0; j < n; ++j) {
            if (rts_rank[j] > table_size && trans_rank[j] > table_size) continue;
            csv::write_row(f, {model.libraries.id(j), std::to_string(rts_rank[j]), std::to_string(trans_rank[j]),
                               format_double(rts_by_lib[j]), std::to_string(transitive[j])});
        }
    }

    l.manifest.extra["global_risk"] = impacts.global;
    l.manifest.extra["report"] = {{"top_k", top_k}, {"correlation_libraries", top_libraries}, {"table_size", table_size}};
    dir.write_manifest(l.manifest);
    out << "global systemic risk G: " << format_double(impacts.global) << '\n';
    return 0;
}

int cmd_export(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    Loaded l = load(o, "export-matrices", false);
    EcosystemModel model = accepted_model(l, err);
    OutputDir dir(o.output_dir);
    {
        auto f = dir.open("contribution_matrix.csv");
        csv::write_row(f, {"row_id", "col_id", "value"});
        for (std::size_t i = 0; i < model.contributors.size(); ++i)
            for (const auto& e : model.contribution.row(i))
                csv::write_row(f, {model.contributors.id(i), model.libraries.id(e.index), format_double(e.value)});
    }
    {
        auto f = dir.open("dependency_matrix.csv");
        csv::write_row(f, {"row_id", "col_id", "value"});
        for (std::size_t i = 0; i < model.libraries.size(); ++i)
            for (std::size_t j : model.dependency.downstreams(i))
                csv::write_row(f, {model.libraries.id(i), model.libraries.id(j),
                                   format_double(model.dependency.share(i, j))});
    }
    dir.write_manifest(l.manifest);
    out << "wrote " << dir.path("contribution_matrix.csv").string() << " and "
        << dir.path("dependency_matrix.csv").string() << '\n';
    return 0;
}

} // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Systemic risk analysis for software ecosystems", "ossrisk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonOptions common;
    std::map<CLI::App*, std::function<int()>> actions;

    auto* validate = app.add_subcommand("validate", "check a snapshot for cycles and dangling references");
    add_common(*validate, common);
    bool validate_write = false;
    validate->add_flag("--write", validate_write, "also write validation.json and manifest.json to --output-dir");
    actions[validate] = [&] { return cmd_validate(common, out, validate_write); };

    auto* simulate = app.add_subcommand("simulate", "propagate failures for one contributor state");
    add_common(*simulate, common);
    std::string remove, state_file;
    simulate->add_option("--remove", remove, "comma-separated contributor ids to remove");
    simulate->add_option("--state", state_file, "contributor_id,state CSV; unlisted contributors stay at 1");
    actions[simulate] = [&] { return cmd_simulate(common, remove, state_file, out, err); };

    auto* rank_c = app.add_subcommand("rank-contributors", "contributor impact I_j and global risk G");
    add_common(*rank_c, common);
    actions[rank_c] = [&] { return cmd_rank_contributors(common, out, err); };

    auto* rank_l = app.add_subcommand("rank-libraries", "rank libraries by a single method");
    add_common(*rank_l, common);
    std::string method = "rts", rank_candidates;
    rank_l->add_option("--method", method, "rts | transitive | downloads | stars | age")
        ->check(CLI::IsMember({"rts", "transitive", "downloads", "stars", "age"}));
    rank_l->add_option("--candidates", rank_candidates, "comma-separated library ids to score (rts only)");
    actions[rank_l] = [&] { return cmd_rank_libraries(common, method, rank_candidates, out, err); };

    auto* intervene = app.add_subcommand("intervene", "allocate developers to top-k libraries and sweep k");
    add_common(*intervene, common);
    std::string strategies, k_text, int_candidates;
    std::optional<double> developer_commits;
    intervene->add_option("--strategy", strategies, "comma-separated: rts,downloads,transitive,stars,age,random");
    intervene->add_option("--k", k_text, "comma-separated ascending k values");
    intervene->add_option("--developer-commits", developer_commits,
                          "commit volume e of one allocated developer (default 5/7 x window days, or 5/7 x 365)")
        ->check(CLI::PositiveNumber);
    intervene->add_option("--candidates", int_candidates, "restrict RTS scoring to these library ids");
    actions[intervene] = [&] {
        return cmd_intervene(common, strategies, k_text, developer_commits, int_candidates, out, err);
    };

    auto* report = app.add_subcommand("report", "concentration and rank-correlation tables");
    add_common(*report, common);
    std::size_t top_k = 10, top_libraries = 1000, table_size = 20;
    std::string rep_candidates;
    report->add_option("--top", top_k, "k for top-k shares")->check(CLI::PositiveNumber);
    report->add_option("--correlation-libraries", top_libraries,
                       "number of libraries (by transitive dependents) used for rank correlations")
        ->check(CLI::PositiveNumber);
    report->add_option("--table-size", table_size, "rank comparison covers the top N by either ranking")
        ->check(CLI::PositiveNumber);
    report->add_option("--candidates", rep_candidates, "restrict RTS scoring to these library ids");
    actions[report] = [&] { return cmd_report(common, top_k, top_libraries, table_size, rep_candidates, out, err); };

    auto* exporter = app.add_subcommand("export-matrices", "write normalized matrices as row_id,col_id,value");
    add_common(*exporter, common);
    actions[exporter] = [&] { return cmd_export(common, out, err); };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        for (auto* sub : app.get_subcommands()) return actions.at(sub)();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Rejected& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace ossrisk::cli
