// Drives the clrlab executable end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = CLRLAB_CLI_PATH;
const fs::path kConfigs = CLRLAB_CONFIG_DIR;

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = kCli.string() + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string cfg(const std::string& name) { return (kConfigs / (name + ".ini")).string(); }

std::string first_line(const fs::path& p) {
    const auto text = test_util::read_file(p);
    return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("train writes the documented outputs and re-runs byte-identically") {
    const auto dir = test_util::scratch_dir("cli_train");
    REQUIRE(run("train -c " + cfg("train_clr") + " --out-dir " + (dir / "a").string(), dir / "log") == 0);
    REQUIRE(run("train -c " + cfg("train_clr") + " --out-dir " + (dir / "b").string(), dir / "log") == 0);
    CHECK(first_line(dir / "a" / "metrics.csv") == "iteration,lr,train_loss,test_loss,test_accuracy");
    for (const char* f : {"config.resolved", "plot.gp", "summary.txt"}) CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
    for (const char* f : {"metrics.csv", "snapshot_500.clr", "snapshot_2000.clr"}) {
        CHECK_MESSAGE(test_util::read_file(dir / "a" / f) == test_util::read_file(dir / "b" / f), f);
    }
}

TEST_CASE("config.resolved reproduces the run") {
    const auto dir = test_util::scratch_dir("cli_resolved");
    REQUIRE(run("train -c " + cfg("train_clr") + " --out-dir " + (dir / "a").string() +
                    " --set train.total_iters=300 --set train.snapshot_iters=300",
                dir / "log") == 0);
    REQUIRE(run("train -c " + (dir / "a" / "config.resolved").string() + " --out-dir " + (dir / "b").string(),
                dir / "log") == 0);
    CHECK(test_util::read_file(dir / "a" / "metrics.csv") == test_util::read_file(dir / "b" / "metrics.csv"));
}

TEST_CASE("identical snapshots interpolate to a flat same-basin curve") {
    const auto dir = test_util::scratch_dir("cli_flat");
    REQUIRE(run("train -c " + cfg("basin_seed1") + " --out-dir " + (dir / "t").string() +
                    " --set train.total_iters=200 --set train.snapshot_iters=200",
                dir / "log") == 0);
    const auto snap = (dir / "t" / "snapshot_200.clr").string();
    REQUIRE(run("interpolate -c " + cfg("distinct_minima") + " --out-dir " + (dir / "i").string() +
                    " --net1 " + snap + " --net2 " + snap,
                dir / "log") == 0);
    const auto curve = test_util::read_file(dir / "i" / "curve.csv");
    std::istringstream in(curve);
    std::string line, first;
    std::getline(in, line);
    CHECK(line == "alpha,train_loss,test_loss,test_accuracy");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto rest = line.substr(line.find(','));
        if (rows == 0) first = rest;
        CHECK(rest == first);
        ++rows;
    }
    CHECK(rows == 51);
    CHECK(test_util::read_file(dir / "i" / "verdict.txt").find("verdict = SameBasin") != std::string::npos);
}

TEST_CASE("two-seed recipe from the example configs gives distinct minima") {
    const auto dir = test_util::scratch_dir("cli_distinct");
    REQUIRE(run("train -c " + cfg("basin_seed1") + " --out-dir " + (dir / "s1").string(), dir / "log") == 0);
    REQUIRE(run("train -c " + cfg("basin_seed2") + " --out-dir " + (dir / "s2").string(), dir / "log") == 0);
    REQUIRE(run("interpolate -c " + cfg("distinct_minima") + " --out-dir " + (dir / "i").string() +
                    " --net1 " + (dir / "s1" / "snapshot_3000.clr").string() + " --net2 " +
                    (dir / "s2" / "snapshot_3000.clr").string(),
                dir / "log") == 0);
    const auto verdict = test_util::read_file(dir / "i" / "verdict.txt");
    CHECK(verdict.find("verdict = DistinctMinima") != std::string::npos);
    CHECK(verdict.find("test_min_alpha = ") != std::string::npos);
}

TEST_CASE("seed sweep writes one directory per seed") {
    const auto dir = test_util::scratch_dir("cli_sweep");
    REQUIRE(run("train -c " + cfg("train_clr") + " --set train.total_iters=100 --set train.snapshot_iters=100"
                " --seeds 3,4,5 --jobs 3 --out-dir " + dir.string(),
                dir / "log") == 0);
    for (int s : {3, 4, 5}) CHECK(fs::exists(dir / ("seed_" + std::to_string(s)) / "metrics.csv"));
    CHECK(test_util::read_file(dir / "seed_3" / "metrics.csv") != test_util::read_file(dir / "seed_4" / "metrics.csv"));
}

TEST_CASE("error paths map to distinct exit codes") {
    const auto dir = test_util::scratch_dir("cli_errors");
    CHECK(run("train -c /nonexistent/x.ini", dir / "log") == 2);
    CHECK(run("train -c " + cfg("train_clr") + " --set scheduel.kind=constant", dir / "log") == 2);
    CHECK(test_util::read_file(dir / "log").find("scheduel") != std::string::npos);
    CHECK(run("train -c " + cfg("train_clr") + " --set schedule.min_lr=0.5", dir / "log") == 2);
    CHECK(run("frobnicate", dir / "log") == 2);
    CHECK(run("train", dir / "log") == 2);

    test_util::write_file(dir / "bad.clr", "CLRLAB1 2,2 relu 6\nshort");
    CHECK(run("interpolate -c " + cfg("distinct_minima") + " --out-dir " + (dir / "i").string() +
                  " --net1 " + (dir / "bad.clr").string() + " --net2 " + (dir / "bad.clr").string(),
              dir / "log") == 3);

    test_util::write_file(dir / "blocker", "not a directory");
    CHECK(run("train -c " + cfg("train_clr") + " --set train.total_iters=10 --set train.snapshot_iters=10"
              " --out-dir " + (dir / "blocker" / "sub").string(),
              dir / "log") == 5);

    CHECK(run("--help", dir / "log") == 0);
    CHECK(test_util::read_file(dir / "log").find("Exit codes") != std::string::npos);
}

TEST_CASE("NaN during interpolation exits with the numeric code") {
    const auto dir = test_util::scratch_dir("cli_nan");
    // Huge weights overflow the logits to +-inf, so softmax yields NaN.
    std::string header = "CLRLAB1 2,2 relu 6\n";
    auto snapshot = [&](double v) {
        std::string s = header;
        for (int k = 0; k < 6; ++k) {
            const double x = k < 4 ? v : 0.0;
            s.append(reinterpret_cast<const char*>(&x), sizeof x);
        }
        return s;
    };
    test_util::write_file(dir / "a.clr", snapshot(1e308));
    test_util::write_file(dir / "b.clr", snapshot(-1e308));
    CHECK(run("interpolate -c " + cfg("distinct_minima") + " --out-dir " + (dir / "i").string() +
                  " --net1 " + (dir / "a.clr").string() + " --net2 " + (dir / "b.clr").string(),
              dir / "log") == 4);
}
