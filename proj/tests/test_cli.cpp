#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support/reference_sha256.hpp"

namespace fs = std::filesystem;

namespace {

struct Result
{
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test
{
  protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("nswstv-cli-" + std::to_string(::getpid()) + "-" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args) const
    {
        const auto err_path = dir_ / "stderr.txt";
        const std::string cmd = std::string(NSWSTV_CLI_PATH) + " " + args + " 2>" + err_path.string();
        Result r{};
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe) throw std::runtime_error("popen failed");
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
        const int status = ::pclose(pipe);
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = slurp(err_path);
        return r;
    }

    static std::string data(const std::string& name)
    {
        const std::string d = std::string(NSWSTV_DATA_DIR) + "/" + name;
        return "--manifest " + d + "/manifest.json --ballots " + d + "/ballots.csv";
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, CountLandslidePrintsWinner)
{
    const auto out = dir_ / "t.json";
    const auto r = run("count " + data("landslide") + " --seed-text 'dice 1' --out " + out.string());
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(r.out, "elected: A\n");
    EXPECT_EQ(nlohmann::json::parse(slurp(out))["elected"], nlohmann::json::array({"A"}));
}

TEST_F(Cli, CountToStdoutKeepsTranscriptClean)
{
    const auto r = run("count " + data("landslide") + " --seed-text 'dice 1'");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["format"], "nswstv-transcript-v1");
    EXPECT_EQ(r.err, "elected: A\n");
}

TEST_F(Cli, MalformedBallotRowExitsOneWithRowNumber)
{
    std::ofstream(dir_ / "m.json") << R"({"seats": 1, "candidates": ["A", "B"]})";
    std::ofstream(dir_ / "b.csv") << "A,B\nB\nA,C\n";
    const auto r = run("count --manifest " + (dir_ / "m.json").string() + " --ballots " + (dir_ / "b.csv").string() +
                       " --seed-text x");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("unknown candidate id C, row 3"), std::string::npos) << r.err;
}

TEST_F(Cli, GriffithPriorBlockShows182Papers)
{
    const auto out = dir_ / "t.json";
    const auto r = run("count " + data("griffith") + " --last-parcel pseudocode-1.4.14.2 --seed-text 'griffith' --out " +
                       out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["counts"][12]["action"]["papers_distributed"], 182);
    EXPECT_EQ(j["rules"]["last_parcel"], "pseudocode-1.4.14.2");
}

TEST_F(Cli, CountIsByteIdenticalAcrossRuns)
{
    const auto a = dir_ / "a.json", b = dir_ / "b.json";
    ASSERT_EQ(run("count " + data("griffith") + " --seed-text s --out " + a.string()).exit_code, 0);
    ASSERT_EQ(run("count " + data("griffith") + " --seed-text s --out " + b.string()).exit_code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(Cli, SeedCeremonyRecordAndReplay)
{
    const auto rec = dir_ / "seed.json";
    const auto r1 = run("seed --seed-text '146532 dice' --out " + rec.string());
    ASSERT_EQ(r1.exit_code, 0) << r1.err;
    const auto first = slurp(rec);
    const auto r2 = run("seed --seed-text '146532 dice' --out " + rec.string());
    EXPECT_EQ(slurp(rec), first);
    EXPECT_EQ(r1.out, r2.out);

    const auto digest = reference::sha256(std::string("146532 dice"));
    std::string hex;
    for (auto byte : digest) {
        char b[3];
        std::snprintf(b, sizeof b, "%02x", byte);
        hex += b;
    }
    EXPECT_EQ(r1.out, hex + "\n");
    const auto j = nlohmann::json::parse(first);
    EXPECT_EQ(j["derived_seed_hex"], hex);
    EXPECT_EQ(j["algorithm"], "sha256-ctr-v1");

    EXPECT_NE(run("seed --seed-text '146533 dice'").out, run("seed --seed-text '146532 dice'").out);
    EXPECT_EQ(run("seed --seed-text ''").exit_code, 1);

    // A count seeded from the record equals one seeded from the text.
    const auto t1 = dir_ / "t1.json", t2 = dir_ / "t2.json";
    ASSERT_EQ(run("count " + data("griffith") + " --seed-file " + rec.string() + " --out " + t1.string()).exit_code, 0);
    ASSERT_EQ(run("count " + data("griffith") + " --seed-text '146532 dice' --out " + t2.string()).exit_code, 0);
    EXPECT_EQ(slurp(t1), slurp(t2));
}

TEST_F(Cli, SimulateDeterministicFixture)
{
    const auto out = dir_ / "p.csv";
    const auto r = run("simulate " + data("landslide") + " --trials 100 --seed-text abc --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(slurp(out).starts_with("candidate,trials_elected,probability,mean_final_tally\nA,100,1.000000,12.000000\n"))
        << slurp(out);
    EXPECT_NE(r.out.find(R"("entropy_input":"abc")"), std::string::npos) << r.out;
}

TEST_F(Cli, CompareIdenticalConfigsHasZeroDeltas)
{
    const auto out = dir_ / "c.json";
    const auto r = run("compare " + data("griffith") +
                       " --variant-a clause-1.4.14.1 --variant-b clause-1.4.14.1 --trials 50 --seed-text x --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out));
    for (const auto& row : j["candidates"]) EXPECT_EQ(row["delta"], "0.000000");
    EXPECT_TRUE(j["first_divergence"].is_null());
}

TEST_F(Cli, CompareGwydirSurfacesParcelSizes)
{
    const auto out = dir_ / "c.json";
    const auto r = run("compare " + data("gwydir") + " --trials 50 --seed-text x --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_EQ(j["first_divergence"]["a"]["papers_distributed"], 110);
    EXPECT_EQ(j["first_divergence"]["b"]["papers_distributed"], 117);
    EXPECT_NE(r.out.find("papers distributed 110 (a) vs 117 (b)"), std::string::npos) << r.out;
}

TEST_F(Cli, UsageErrorsExitOne)
{
    EXPECT_EQ(run("count " + data("landslide")).exit_code, 1);
    EXPECT_EQ(run("count " + data("landslide") + " --seed-text a --seed-file b").exit_code, 1);
    EXPECT_EQ(run("count " + data("landslide") + " --seed-text a --last-parcel 1.4.14").exit_code, 1);
    EXPECT_EQ(run("count " + data("landslide") + " --seed-text a --decimals 13").exit_code, 1);
    EXPECT_EQ(run("simulate " + data("landslide") + " --seed-text a --trials 0").exit_code, 1);
    EXPECT_EQ(run("count --manifest /nonexistent --ballots /nonexistent --seed-text a").exit_code, 1);
    EXPECT_EQ(run("bogus").exit_code, 1);
    EXPECT_EQ(run("").exit_code, 1);
}
