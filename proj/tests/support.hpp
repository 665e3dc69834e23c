#pragma once

// Shared fixtures for the unit and acceptance suites.

#include "perfminer/commit.hpp"
#include "perfminer/errors.hpp"
#include "perfminer/llm_gateway.hpp"
#include "perfminer/rng.hpp"
#include "perfminer/subprocess.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace perfminer::testsupport {

// Separable synthetic commit-message corpus: the first half talks about
// performance work, the second half about everything else. Every tenth
// message is a bridge that mixes vocabulary from both sides (as real commit
// logs do), which keeps labeling-function votes from splitting into
// disconnected polarity islands.
inline std::vector<std::string> synthetic_corpus(std::size_t total, std::uint64_t seed) {
    static const char* perf_templates[] = {
        "speed up %s by caching results",
        "optimize %s to cut cpu usage",
        "reduce memory allocations in %s",
        "fix slow %s with a faster lookup",
        "improve throughput and latency of %s pipeline",
        "avoid redundant computation in %s",
    };
    static const char* other_templates[] = {
        "update documentation for %s readme",
        "fix typo in %s docs",
        "add unit tests and rename %s helper",
        "upgrade %s dependency and update changelog",
        "translate %s docs to spanish",
        "revert %s formatting changes",
    };
    static const char* perf_bridge = "speed up %s and update docs";
    static const char* other_bridge = "fix typo in fast %s docs";
    static const char* subjects[] = {"parser", "scheduler", "renderer", "indexer", "router",
                                     "encoder", "planner",  "resolver",  "store",   "worker"};
    Rng rng(seed);
    std::vector<std::string> corpus;
    corpus.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        bool perf = i < total / 2;
        const char* tmpl = i % 10 == 9
                               ? (perf ? perf_bridge : other_bridge)
                               : (perf ? perf_templates[rng.bounded(6)]
                                       : other_templates[rng.bounded(6)]);
        const char* subject = subjects[rng.bounded(10)];
        char buf[160];
        std::snprintf(buf, sizeof(buf), tmpl, subject);
        // Unique ticket suffix keeps every message distinct.
        corpus.emplace_back(std::string(buf) + " (t" + std::to_string(i) + ")");
    }
    return corpus;
}

inline bool oracle_is_performance(const std::string& message) {
    for (const char* marker : {"speed up", "optimize", "allocations", "slow", "throughput",
                               "redundant computation"})
        if (message.find(marker) != std::string::npos) return true;
    return false;
}

// Deterministic teacher backed by the corpus oracle.
inline MockGateway oracle_teacher() {
    return MockGateway(GatewayConfig{}, keyword_oracle_handler([](const std::string& message) {
                           return oracle_is_performance(message)
                                      ? std::string("performance")
                                      : std::string("non-performance");
                       }));
}

// ------------------------------------------------------------ git fixture ----

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline void git(const std::filesystem::path& repo, const std::vector<std::string>& args) {
    std::vector<std::string> argv = {"git", "-C", repo.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    CommandResult r = run_command(argv);
    if (!r.ok()) throw IoError("fixture git " + args.front() + " failed: " + r.err);
}

inline void commit_all(const std::filesystem::path& repo, const std::string& message) {
    git(repo, {"add", "-A"});
    git(repo, {"commit", "-q", "--no-gpg-sign", "-m", message});
}

// Builds the ten-commit fixture repository:
//   3 single-function performance commits (the ones the miner must emit),
//   2 performance commits touching two functions (tangled, excluded),
//   5 non-performance commits.
inline std::filesystem::path build_fixture_repo(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    git(dir, {"init", "-q", "-b", "main"});
    git(dir, {"config", "user.email", "fixture@example.com"});
    git(dir, {"config", "user.name", "Fixture"});

    // Spacer keeps lookup and scale hunks from merging under -U3.
    const std::string spacer =
        "// index helpers\n"
        "// lookup scans linearly; callers are expected to keep the vector\n"
        "// sorted if they need anything faster. scale applies the fixed\n"
        "// display zoom factor.\n"
        "// Both are exercised by the smoke tests.\n"
        "// Keep signatures stable; external tools link against them.\n"
        "// ---------------------------------------------------------------\n";

    const std::string lookup_v1 =
        "int lookup(const std::vector<int>& xs, int key) {\n"
        "    for (int i = 0; i < (int)xs.size(); ++i) {\n"
        "        if (xs[i] == key) return i;\n"
        "    }\n"
        "    return -1;\n"
        "}\n";
    const std::string lookup_v2 =
        "int lookup(const std::vector<int>& xs, int key) {\n"
        "    static int last_key = -1;\n"
        "    static int last_index = -1;\n"
        "    if (key == last_key) return last_index;\n"
        "    for (int i = 0; i < (int)xs.size(); ++i) {\n"
        "        if (xs[i] == key) { last_key = key; last_index = i; return i; }\n"
        "    }\n"
        "    return -1;\n"
        "}\n";
    const std::string total_v1 =
        "int total(const std::vector<int>& xs) {\n"
        "    int acc = 0;\n"
        "    for (int x : xs) acc += x;\n"
        "    return acc;\n"
        "}\n";
    const std::string total_v2 =
        "int total(const std::vector<int>& xs) {\n"
        "    int acc = 0;\n"
        "    int n = (int)xs.size();\n"
        "    const int* p = xs.data();\n"
        "    for (int i = 0; i < n; ++i) acc += p[i];\n"
        "    return acc;\n"
        "}\n";
    auto engine = [&](const std::string& lookup, const std::string& scale_body,
                      const std::string& total) {
        std::string src = "#include <vector>\n\n" + lookup + "\n" + spacer + "\n" +
                          "int scale(int v) {\n    return " + scale_body + ";\n}\n";
        if (!total.empty()) src += "\n" + total;
        return src;
    };

    // 1. non-perf: initial layout
    write_file(dir / "util.py",
               "def slow_sum(items):\n"
               "    total = 0\n"
               "    for it in items:\n"
               "        total = total + it\n"
               "    return total\n"
               "\n"
               "def render(name):\n"
               "    return \"hello \" + name\n");
    write_file(dir / "engine.cc", engine(lookup_v1, "v * 2", ""));
    commit_all(dir, "initial import");

    // 2. perf, single function: KEEP
    write_file(dir / "util.py",
               "def slow_sum(items):\n"
               "    return sum(items)\n"
               "\n"
               "def render(name):\n"
               "    return \"hello \" + name\n");
    commit_all(dir, "speed up slow_sum with builtin sum");

    // 3. non-perf: docs
    write_file(dir / "README.md", "# fixture\n\nA tiny repository for tests.\n");
    commit_all(dir, "add readme");

    // 4. perf but touches two functions: tangled, excluded
    write_file(dir / "engine.cc", engine(lookup_v2, "v << 1", ""));
    commit_all(dir, "optimize lookup memoization and scale shifting");

    // 5. non-perf: functional fix
    write_file(dir / "util.py",
               "def slow_sum(items):\n"
               "    return sum(items)\n"
               "\n"
               "def render(name):\n"
               "    if name is None:\n"
               "        name = \"world\"\n"
               "    return \"hello \" + name\n");
    commit_all(dir, "handle missing name in render");

    // 6. non-perf: new helper function
    write_file(dir / "engine.cc", engine(lookup_v2, "v << 1", total_v1));
    commit_all(dir, "add total helper");

    // 7. perf, single function: KEEP
    write_file(dir / "util.py",
               "def slow_sum(items):\n"
               "    return sum(items)\n"
               "\n"
               "def render(name):\n"
               "    if name is None:\n"
               "        name = \"world\"\n"
               "    parts = []\n"
               "    parts.append(\"hello \")\n"
               "    parts.append(name)\n"
               "    return \"\".join(parts)\n");
    commit_all(dir, "optimize render string concatenation");

    // 8. non-perf: tests
    write_file(dir / "test_util.py",
               "from util import slow_sum\n"
               "\n"
               "def test_sum():\n"
               "    assert slow_sum([1, 2]) == 3\n");
    commit_all(dir, "add tests for slow_sum");

    // 9. perf but touches two functions: tangled, excluded
    write_file(dir / "util.py",
               "def slow_sum(items):\n"
               "    return sum(items) if items else 0\n"
               "\n"
               "def render(name):\n"
               "    if name is None:\n"
               "        name = \"world\"\n"
               "    return f\"hello {name}\"\n");
    commit_all(dir, "speed up slow_sum and render together");

    // 10. perf, single function: KEEP
    write_file(dir / "engine.cc", engine(lookup_v2, "v << 1", total_v2));
    commit_all(dir, "make total faster with raw pointer loop");

    return dir;
}

} // namespace perfminer::testsupport
