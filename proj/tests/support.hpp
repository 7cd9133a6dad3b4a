#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "ossrisk/model.hpp"
#include "ossrisk/snapshot.hpp"
#include "ossrisk/timeutil.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(OSSRISK_FIXTURE_DIR) / name; }

inline ossrisk::SnapshotFiles toy_files() {
    auto dir = fixture("toy");
    return {dir / "libraries.csv", dir / "dependencies.csv", dir / "commits.csv", std::nullopt};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ossrisk-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// In-memory snapshot construction; ids are sorted on build().
class SnapshotBuilder {
public:
    SnapshotBuilder& library(const std::string& id, std::uint64_t downloads = 1, std::uint64_t stars = 0,
                             const std::string& created = "2020-01-01") {
        s_.libraries.push_back({id, id, *ossrisk::parse_iso8601(created), downloads, stars});
        return *this;
    }
    SnapshotBuilder& edge(const std::string& dependent, const std::string& dependency) {
        s_.dependency_edges.insert({dependent, dependency});
        return *this;
    }
    SnapshotBuilder& commits(const std::string& contributor, const std::string& library, std::uint64_t count) {
        s_.commit_counts[{contributor, library}] = count;
        contributors_.push_back(contributor);
        return *this;
    }
    SnapshotBuilder& contributor(const std::string& id) {
        contributors_.push_back(id);
        return *this;
    }
    ossrisk::EcosystemSnapshot build() const {
        ossrisk::EcosystemSnapshot s = s_;
        std::sort(s.libraries.begin(), s.libraries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        auto ids = contributors_;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (const auto& id : ids) s.contributors.push_back({id, false});
        return s;
    }

private:
    ossrisk::EcosystemSnapshot s_;
    std::vector<std::string> contributors_;
};

// Toy ecosystem: lib2 and lib4 depend on lib1, lib3 on lib2 and lib4.
// c1 has half of lib2; c2 all of lib1 and a quarter of lib2; c3 a quarter of lib2 and all of lib3, lib4.
inline ossrisk::EcosystemSnapshot toy_snapshot(std::uint64_t downloads = 100) {
    return SnapshotBuilder{}
        .library("lib1", downloads, 40, "2015-03-01")
        .library("lib2", downloads, 10, "2016-07-15")
        .library("lib3", downloads, 25, "2019-01-20")
        .library("lib4", downloads, 5, "2018-11-02")
        .edge("lib2", "lib1")
        .edge("lib4", "lib1")
        .edge("lib3", "lib2")
        .edge("lib3", "lib4")
        .commits("c1", "lib2", 20)
        .commits("c2", "lib1", 13)
        .commits("c2", "lib2", 10)
        .commits("c3", "lib2", 10)
        .commits("c3", "lib3", 8)
        .commits("c3", "lib4", 31)
        .build();
}

inline std::string lib_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "L%02zu", i);
    return buf;
}

// Random acyclic ecosystem. Library ids are permuted against the generation
// order so index order is not a topological order.
inline ossrisk::EcosystemSnapshot random_snapshot(std::mt19937_64& rng, std::size_t max_libraries = 12,
                                                  std::size_t max_contributors = 8) {
    auto uniform = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
    auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

    const std::size_t n = uniform(1, max_libraries);
    const std::size_t m = uniform(1, max_contributors);
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = i;
    std::shuffle(label.begin(), label.end(), rng);

    SnapshotBuilder b;
    bool any_downloads = false;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t dl = chance(0.2) ? 0 : uniform(1, 1000);
        any_downloads |= dl > 0;
        b.library(lib_name(label[i]), dl, uniform(0, 500),
                  "20" + std::to_string(10 + uniform(0, 12)) + "-0" + std::to_string(uniform(1, 9)) + "-1" +
                      std::to_string(uniform(0, 9)));
    }
    if (!any_downloads) b.library("L99", 1);

    const double density = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (chance(density)) b.edge(lib_name(label[j]), lib_name(label[i]));

    for (std::size_t c = 0; c < m; ++c) {
        std::string id = "dev" + std::to_string(c);
        b.contributor(id);
        for (std::size_t j = 0; j < n; ++j)
            if (chance(0.3)) b.commits(id, lib_name(label[j]), uniform(0, 40));
    }
    return b.build();
}

} // namespace testing
