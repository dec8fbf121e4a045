#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mirate/records.hpp"

namespace mirate {
namespace {

namespace fs = std::filesystem;

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "mirate");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mirate_cli_" +
                std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

TEST(Cli, NoArgumentsPrintsUsage) {
    const auto r = invoke({});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE((r.out + r.err).find("run"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndFlag) {
    EXPECT_EQ(invoke({"train"}).code, 2);
    EXPECT_EQ(invoke({"run", "--bogus"}).code, 2);
}

TEST(Cli, HelpSucceeds) { EXPECT_EQ(invoke({"--help"}).code, 0); }

TEST(Cli, ConfigKeysListsDefaults) {
    const auto r = invoke({"config-keys"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("probe_size"), std::string::npos);
}

TEST_F(CliTest, ConfigErrorNamesKey) {
    const auto r = invoke({"run", "--set", "blobs_dim=0", "-o", (dir_ / "x").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("blobs_dim"), std::string::npos);
    std::ofstream(dir_ / "bad.cfg") << "probe_sizee = 10\n";
    const auto f = invoke({"run", "-c", (dir_ / "bad.cfg").string()});
    EXPECT_EQ(f.code, 2);
    EXPECT_NE(f.err.find("probe_sizee"), std::string::npos);
}

TEST_F(CliTest, RunOneEpochWritesOneRecord) {
    std::ofstream(dir_ / "run.cfg") << "hidden = 8\nblobs_per_class = 40\nprobe_size = 64\n";
    const auto out = dir_ / "run";
    const auto r = invoke({"run", "-c", (dir_ / "run.cfg").string(), "--epochs", "1", "--seed",
                           "3", "--policy", "fixed", "-o", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(out / "epochs.csv");
    EXPECT_EQ(read_csv(in).size(), 1U);
}

TEST_F(CliTest, ResumeAndCompare) {
    const auto base = dir_ / "base";
    ASSERT_EQ(invoke({"run", "--set", "hidden=8", "--set", "blobs_per_class=40", "--probe-size",
                      "64", "--epochs", "2", "--set", "checkpoint_every=1", "-o", base.string()})
                  .code,
              0);
    const auto bs = dir_ / "bs";
    const auto r = invoke({"resume", "--set", "hidden=8", "--set", "blobs_per_class=40",
                           "--probe-size", "64", "--epochs", "3", "--checkpoint",
                           (base / "checkpoints" / "ckpt_0001.bin").string(), "--batch-size", "64",
                           "--window", "1", "-o", bs.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cmp = dir_ / "cmp.csv";
    EXPECT_EQ(invoke({"compare", base.string(), bs.string(), "-o", cmp.string()}).code, 0);
    std::ifstream in(cmp);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "run_name,epoch,metric,value");
}

TEST_F(CliTest, ResumeFromMissingCheckpointFails) {
    const auto r = invoke({"resume", "--checkpoint", (dir_ / "none.bin").string(), "-o",
                           (dir_ / "o").string()});
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, MiCurveOnGaussians) {
    const auto out = dir_ / "curve.csv";
    const auto r = invoke({"mi-curve", "--rho", "0.9", "--n", "1000", "--sizes", "100,400",
                           "--repeats", "3", "-o", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 3U);
    EXPECT_EQ(lines[0], "sample_size,mean_nats,std_nats,repeats");
    EXPECT_EQ(lines[1].rfind("100,", 0), 0U);
}

}  // namespace
}  // namespace mirate
