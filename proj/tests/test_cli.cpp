#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
    int status = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(SORTBOUND_CLI) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    std::array<char, 4096> buf{};
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
        r.out.append(buf.data(), got);
    }
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string data(const std::string& rel) { return std::string(SORTBOUND_TEST_DATA) + "/" + rel; }

}  // namespace

TEST(Cli, CountText) {
    const CliRun r = run("count " + data("fixtures/P16.poset"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "e = 113400\n");
}

TEST(Cli, CountJsonAgreesWithText) {
    const CliRun r = run("count --pairs --json " + data("four_element.poset"));
    ASSERT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["e"], 5);
    EXPECT_EQ(j["n"], 4);
    EXPECT_EQ(j["t"][0][2], 5);
    EXPECT_EQ(j["t"][3][0], 1);
    EXPECT_TRUE(j["t"][1][1].is_null());
    EXPECT_NE(run("count --pairs " + data("four_element.poset")).out.find("e = 5\n"), std::string::npos);
}

TEST(Cli, DecideExpect) {
    EXPECT_EQ(run("decide 5 7 --expect sortable").status, 0);
    EXPECT_EQ(run("decide 5 6 --expect sortable").status, 1);
    EXPECT_EQ(run("decide 5 6 --expect not-sortable").status, 0);
    const CliRun r = run("decide 5 6 --json");
    ASSERT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["verdict"], "NotSortable");
    EXPECT_EQ(j["phase"], "forward");
    EXPECT_EQ(j["first_empty"], 1);
}

TEST(Cli, DecideTouchBound) {
    const json j = json::parse(run("decide 4 5 --touch 2 4 4 --json").out);
    EXPECT_EQ(j["verdict"], "Sortable");
    EXPECT_EQ(j["touch"]["lo"], 4);
    EXPECT_EQ(run("decide 4 5 --touch 2 4 3").status, 2);
}

TEST(Cli, LongRunsNeedConfirmation) {
    EXPECT_EQ(run("decide 12 29").status, 2);
    EXPECT_EQ(run("decide 12 29 --yes-long --expect not-sortable").status, 0);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("decide 17 3").status, 2);
    EXPECT_EQ(run("decide 4").status, 2);
    EXPECT_EQ(run("count /nonexistent/file.poset").status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
    EXPECT_EQ(run("--help").status, 0);
    EXPECT_NE(run("--help").out.find("SORTBOUND_CHECKPOINT_DIR"), std::string::npos);
}

TEST(Cli, MalformedPosetIsAnInputError) {
    const fs::path bad = fs::temp_directory_path() / ("sortbound_cli_bad_" + std::to_string(::getpid()) + ".poset");
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("n=3\n0 < 1\n1 < 0\n", f);
    std::fclose(f);
    EXPECT_EQ(run("count " + bad.string()).status, 2);
    fs::remove(bad);
}

TEST(Cli, Bounds) {
    const CliRun r = run("bounds --max-n 16 --json");
    ASSERT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 16u);
    EXPECT_EQ(j["rows"][15]["C"], 45);
    EXPECT_EQ(j["rows"][15]["F"], 46);
    EXPECT_TRUE(j["rows"][15]["S"].is_null());
    EXPECT_EQ(j["rows"][11]["S"], 30);
    EXPECT_EQ(run("bounds --max-n 23").status, 2);
}

TEST(Cli, VerifyFixtures) {
    const CliRun r = run("verify-fixtures --json --data-dir " + std::string(SORTBOUND_TEST_DATA));
    EXPECT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["checks"].size(), 11u);
}

TEST(Cli, ExportDot) {
    const CliRun r = run("export-dot Q16a --data-dir " + std::string(SORTBOUND_TEST_DATA));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("digraph Q16a {", 0), 0u);
    EXPECT_NE(run("export-dot " + data("four_element.poset")).out.find("u1 -> u3;"), std::string::npos);
    const json j = json::parse(run("export-dot --json " + data("four_element.poset")).out);
    EXPECT_EQ(j["covers"], json::parse("[[0,2],[1,2],[1,3]]"));
    EXPECT_EQ(j["n"], 4);
}

TEST(Cli, SingleElementPoset) {
    const fs::path one = fs::temp_directory_path() / ("sortbound_cli_one_" + std::to_string(::getpid()) + ".poset");
    std::FILE* f = std::fopen(one.c_str(), "w");
    std::fputs("n=1\n", f);
    std::fclose(f);
    EXPECT_EQ(run("count " + one.string()).out, "e = 1\n");
    fs::remove(one);
}

TEST(Cli, SmallVerdicts) {
    EXPECT_EQ(run("decide 4 5 --expect sortable").status, 0);
    EXPECT_EQ(run("decide 3 2 --expect not-sortable").status, 0);
}

TEST(Cli, CheckpointAndResume) {
    const fs::path dir = fs::temp_directory_path() / ("sortbound_cli_ckpt_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    const json first = json::parse(run("decide 7 13 --json --checkpoint-dir " + dir.string()).out);
    ASSERT_TRUE(fs::exists(dir / "forward_13.sbnd"));
    // emulate a kill after forward step 9
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("backward_", 0) == 0 || std::stoi(name.substr(8)) > 9) {
            fs::remove(e.path());
        }
    }
    const CliRun again = run("decide 7 13 --json --resume --checkpoint-dir " + dir.string());
    ASSERT_EQ(again.status, 0);
    EXPECT_EQ(json::parse(again.out), first);
    EXPECT_EQ(run("decide 7 13 --resume").status, 2);
    fs::remove_all(dir);
}
