#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "slowmotion/cli.hpp"
#include "slowmotion/csv.hpp"

using namespace slowmotion;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("slowmotion_cli_" + name);
    fs::remove_all(p);
    return p;
}

/// Runs the installed binary through the shell and returns its exit status.
int run_binary(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(SLOWMOTION_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run_in_process(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "slowmotion");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST(Cli, EvolveDriftsTowardTheAttractingWall) {
    const fs::path dir = scratch("evolve");
    ASSERT_EQ(run_binary("evolve eps=0.08 a0=0.4 T=200 output_dir=" + dir.string()), 0);
    ASSERT_TRUE(fs::exists(dir / "trajectory.csv"));
    const auto tr = csv::read(dir / "trajectory.csv");
    ASSERT_FALSE(tr.rows.empty());
    // On the unit interval the zero crossing is lost within one time unit; the projected position carries the drift.
    EXPECT_NEAR(tr.number(0, "xi_zero"), 0.4, 1e-3);
    const auto summary = csv::read(dir / "evolve_summary.csv");
    EXPECT_LT(summary.number(0, "xi_final"), 0.4);
    EXPECT_EQ(summary.rows.at(0).at(summary.column("attractor")), "positive");
    EXPECT_LT(summary.number(0, "attractor_l2_distance"), 0.05);
}

TEST(Cli, ZeroStateSpectrum) {
    const fs::path dir = scratch("spectrum");
    ASSERT_EQ(run_in_process({"spectrum", "eps=0.1", "xi=0.5", "n=400", "state=zero", "k_max=3",
                              "output_dir=" + dir.string()}),
              0);
    const auto t = csv::read(dir / "spectrum.csv");
    ASSERT_EQ(t.rows.size(), 3u);
    const double pi = std::acos(-1.0);
    EXPECT_NEAR(t.number(0, "lambda"), 1.0 - 0.1 * pi * pi, 1e-3);
    EXPECT_TRUE(fs::exists(dir / "eigenfunctions.csv"));
    EXPECT_TRUE(fs::exists(dir / "h2report.csv"));
}

TEST(Cli, ConfigErrorsExitOneAndNameTheKey) {
    std::string err;
    EXPECT_EQ(run_in_process({"evolve", "eps=-1"}, &err), 1);
    EXPECT_NE(err.find("eps"), std::string::npos);
    EXPECT_EQ(run_in_process({"evolve", "bogus=1"}, &err), 1);
    EXPECT_EQ(run_in_process({"frobnicate"}, &err), 1);
    EXPECT_EQ(run_binary("evolve n=abc"), 1);
}

TEST(Cli, NumericalErrorsExitTwo) {
    std::string err;
    EXPECT_EQ(run_in_process({"spectrum", "eps=0.01", "n=50", "output_dir=" + scratch("unresolved").string()}, &err),
              2);
    EXPECT_NE(err.find("UnresolvedLayer"), std::string::npos);
}

TEST(Cli, ConfigFileAndFlagSpelling) {
    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "run.ini");
        f << "eps = 0.1\nxi0 = 0.4\nT = 10\n";
    }
    ASSERT_EQ(run_in_process({"reduce", "--config", (dir / "run.ini").string(), "--output_dir=" + dir.string()}), 0);
    const auto t = csv::read(dir / "reduced.csv");
    EXPECT_NEAR(std::stod(t.rows.back()[1]), 0.4 * std::exp(-1.0), 1e-8);
}

TEST(Cli, SweepIsOrderedAndIndependentOfThreadCount) {
    const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
    const std::string args = "sweep n=200 T=5 eps_list=0.1,0.08 xi_list=0.4 a0_list=0.3,0.6 track=false output_dir=";
    ASSERT_EQ(run_binary(args + a.string(), "SLOWMOTION_THREADS=1"), 0);
    ASSERT_EQ(run_binary(args + b.string(), "SLOWMOTION_THREADS=4"), 0);
    const auto t = csv::read(a / "summary.csv");
    ASSERT_EQ(t.rows.size(), 4u);
    const double eps[4] = {0.1, 0.1, 0.08, 0.08}, a0[4] = {0.3, 0.6, 0.3, 0.6};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(t.number(i, "cell"), static_cast<double>(i));
        EXPECT_EQ(t.number(i, "eps"), eps[i]);
        EXPECT_EQ(t.number(i, "a0"), a0[i]);
        EXPECT_EQ(t.rows[i][t.column("status")], "ok");
    }
    EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
    for (int i = 0; i < 4; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "cell_%04d/trajectory.csv", i);
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
}

TEST(Cli, RepeatedRunsAreBitwiseIdentical) {
    const fs::path a = scratch("repeat_a"), b = scratch("repeat_b");
    for (const auto& d : {a, b})
        ASSERT_EQ(run_in_process({"steady", "eps=0.02", "n=300", "output_dir=" + d.string()}), 0);
    for (const auto& e : fs::directory_iterator(a)) {
        const std::string s = slurp(e.path());
        EXPECT_EQ(s, slurp(b / e.path().filename())) << e.path();
        EXPECT_EQ(s.find('\r'), std::string::npos);
    }
}

TEST(Cli, BareAndDashedArgumentsAgree) {
    const char* argv[] = {"slowmotion", "evolve", "eps=0.08", "--a0=0.3"};
    const auto args = cli::normalise_arguments(4, argv);
    ASSERT_EQ(args.size(), 3u);
    EXPECT_EQ(args[0], "evolve");
    EXPECT_EQ(args[1], "--eps=0.08");
    EXPECT_EQ(args[2], "--a0=0.3");
}
