#pragma once

// Shared test fixtures: scratch directories, a small git repository, and a
// three-instance dataset wired to it.

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "swelabel/dataset.hpp"
#include "swelabel/util.hpp"
#include "swelabel/workspace.hpp"

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() /
                ("swelabel_" + tag + "_" + std::to_string(counter()++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    static int& counter() {
        static int n = 0;
        return n;
    }
    fs::path path_;
};

inline void write(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    swelabel::util::write_file(p, content);
}

inline std::string git(const std::vector<std::string>& args, const fs::path& cwd) {
    auto res = swelabel::workspace::run_git(args, cwd);
    if (res.exit_code != 0)
        throw std::runtime_error("git failed: " + res.output);
    return res.output;
}

// Small python project with a hub module everyone references.
inline std::string make_fixture_repo(const fs::path& dir) {
    fs::create_directories(dir);
    write(dir / "core.py",
          "class Engine:\n"
          "    def start(self):\n"
          "        return run_cycle()\n"
          "\n"
          "def run_cycle():\n"
          "    return 1\n");
    write(dir / "app.py",
          "from core import Engine, run_cycle\n"
          "\n"
          "def main():\n"
          "    engine = Engine()\n"
          "    engine.start()\n"
          "    run_cycle()\n"
          "    run_cycle()\n");
    write(dir / "util.py",
          "def helper():\n"
          "    return 42\n");
    git({"init", "-q"}, dir);
    git({"-c", "user.name=fixture", "-c", "user.email=fixture@example.com", "add", "."}, dir);
    git({"-c", "user.name=fixture", "-c", "user.email=fixture@example.com", "commit", "-q", "-m",
         "initial state"},
        dir);
    return swelabel::util::trim(git({"rev-parse", "HEAD"}, dir));
}

inline const std::string kGoldPatch =
    "diff --git a/core.py b/core.py\n"
    "--- a/core.py\n"
    "+++ b/core.py\n"
    "@@ -5,2 +5,2 @@\n"
    " def run_cycle():\n"
    "-    return 1\n"
    "+    return 2\n";

inline const std::string kTestPatch =
    "diff --git a/test_core.py b/test_core.py\n"
    "--- /dev/null\n"
    "+++ b/test_core.py\n"
    "@@ -0,0 +1,3 @@\n"
    "+from core import run_cycle\n"
    "+def test_cycle():\n"
    "+    assert run_cycle() == 2\n";

// Three instances pointed at the fixture repository.
inline fs::path make_fixture_dataset(const fs::path& dir, const std::string& repo_path,
                                     const std::string& sha) {
    std::string rows;
    const char* titles[] = {"Engine returns the wrong cycle count",
                            "Crash when helper is invoked twice",
                            "Counter drifts after restart"};
    const char* bodies[] = {
        "## Steps\n**run** the engine, observe `run_cycle()` returning 1.\nExpected: 2.",
        "Calling helper() twice crashes.\n<!-- template noise -->\nTraceback attached.",
        "After restart the counter drifts.\nSee https://example.com/logs for details."};
    for (int i = 0; i < 3; ++i) {
        nlohmann::json row;
        row["instance_id"] = "fixture-" + std::to_string(i + 1);
        row["repo"] = repo_path;  // local mirror key
        row["base_commit"] = sha;
        row["issue_title"] = titles[i];
        row["issue_body"] = bodies[i];
        row["patch"] = kGoldPatch;
        row["test_patch"] = kTestPatch;
        row["FAIL_TO_PASS"] = nlohmann::json::array({"test_core.py::test_cycle"});
        row["PASS_TO_PASS"] = nlohmann::json::array();
        rows += row.dump() + "\n";
    }
    const auto path = dir / "dataset.jsonl";
    write(path, rows);
    return path;
}

}  // namespace testsupport
