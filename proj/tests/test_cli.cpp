#include "spenra/classic.hpp"
#include "spenra/cli.hpp"
#include "spenra/csv_io.hpp"
#include "spenra/manifest.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using spenra::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("spenra_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST(Sha256, KnownVectors) {
    EXPECT_EQ(spenra::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(spenra::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_F(CliTest, GenerateMarkovIsDeterministic) {
    const auto a = invoke({"generate", "--system", "markov2", "--n", "1000", "--seed", "7", "--output", path("a.csv")});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto b = invoke({"generate", "--system", "markov2", "--n", "1000", "--seed", "7", "--output", path("b.csv")});
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    std::istringstream in(slurp(path("a.csv")));
    EXPECT_EQ(spenra::read_series_csv(in).size(), 1000u);
    EXPECT_NE(slurp(path("a.csv")).find("# seed=7\n# system=markov2\n"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("a.csv.manifest.json")));
}

TEST_F(CliTest, GenerateLorenzHasTimeColumn) {
    const auto r = invoke({"--quiet", "generate", "--system", "lorenz-iei", "--theta", "60", "--n", "50", "--seed", "7",
                           "-o", path("l.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(path("l.csv"));
    EXPECT_EQ(text.rfind("time,value\n", 0), 0u);
    EXPECT_NE(text.find("# theta=60\n"), std::string::npos);
    std::istringstream in(text);
    const auto s = spenra::read_series_csv(in);
    EXPECT_TRUE(s.has_timestamps());
    EXPECT_EQ(s.size(), 50u);
}

TEST_F(CliTest, ManifestEchoReproducesRun) {
    const auto r = invoke({"generate", "--system", "rossler-iei", "--n", "30", "--seed", "3", "-o", path("r.csv"),
                           "--manifest", path("m.json")});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(slurp(path("m.json")));
    EXPECT_EQ(j["seed"], 3);
    EXPECT_EQ(j["version"], SPENRA_VERSION);
    EXPECT_TRUE(j["wall_seconds"].get<double>() >= 0.0);
    EXPECT_EQ(j["config"]["theta"], "125");
    auto args = j["command_line"].get<std::vector<std::string>>();
    for (auto& a : args) {
        if (a == path("r.csv")) a = path("again.csv");
        if (a == path("m.json")) a = path("m2.json");
    }
    ASSERT_EQ(invoke(args).code, 0);
    EXPECT_EQ(slurp(path("r.csv")), slurp(path("again.csv")));
}

TEST_F(CliTest, ManifestRecordsInputDigest) {
    const auto in = write("c.csv", "value\n1\n1\n1\n1\n1\n1\n");
    const auto r = invoke({"estimate", "-i", in, "--p", "1", "--bandwidths", "1,1", "-o", path("e.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(path("e.csv.manifest.json")));
    EXPECT_EQ(j["input_sha256"], spenra::sha256_hex(slurp(in)));
}

TEST_F(CliTest, EstimateConstantSeries) {
    const auto in = write("c.csv", "value\n2\n2\n2\n2\n2\n2\n2\n2\n");
    const auto r = invoke({"estimate", "-i", in, "--p", "1", "--bandwidths", "1,1", "-o", path("e.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const double h = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    EXPECT_EQ(r.out, "time_averaged=" + spenra::format_short(h) + "\n");
    std::istringstream csv(slurp(path("e.csv")));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "t,time,value,h_specific");
    int rows = 0;
    while (std::getline(csv, line) && line[0] != '#') {
        const double v = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_NEAR(v, h, 1e-6);
        ++rows;
    }
    EXPECT_EQ(rows, 7);
}

TEST_F(CliTest, EstimateUsageErrors) {
    const auto in = write("c.csv", "value\n2\n3\n1\n5\n");
    EXPECT_EQ(invoke({"estimate", "-i", in}).code, 2);
    EXPECT_EQ(invoke({"estimate", "-i", in, "--p", "2", "--bandwidths", "1,1"}).code, 2);
    EXPECT_EQ(invoke({"estimate", "-i", in, "--p", "1", "--bandwidths", "1,x"}).code, 2);
    EXPECT_EQ(invoke({"estimate", "-i", in, "--auto", "--p", "1", "--bandwidths", "1,1"}).code, 2);
    const auto w = invoke({"estimate", "-i", in, "--p", "1", "--bandwidths", "1,1", "--window", "60"});
    EXPECT_EQ(w.code, 3);
    EXPECT_NE(w.err.find("MissingTimestamps"), std::string::npos);
}

TEST_F(CliTest, EstimateWindowColumn) {
    ASSERT_EQ(invoke({"generate", "--system", "lorenz-iei", "--n", "80", "--seed", "2", "-o", path("l.csv")}).code, 0);
    const auto r =
        invoke({"estimate", "-i", path("l.csv"), "--p", "1", "--bandwidths", "0.1,0.1", "--window", "60", "-o",
                path("e.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("e.csv")).rfind("t,time,value,h_specific,windowed\n", 0), 0u);
}

TEST_F(CliTest, SelectSingleOrder) {
    ASSERT_EQ(invoke({"generate", "--system", "markov2", "--n", "300", "--seed", "1", "-o", path("m.csv")}).code, 0);
    const auto r = invoke({"--quiet", "select", "-i", path("m.csv"), "--max-p", "1", "-o", path("s.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "chosen_order=1\n");
    const auto text = slurp(path("s.csv"));
    EXPECT_EQ(text.rfind("p,k0,k-1,cv0,cvl\n1,", 0), 0u);
    EXPECT_NE(text.find("# chosen_order=1\n"), std::string::npos);
}

TEST_F(CliTest, SelectShortInputFails) {
    const auto in = write("short.csv", "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
    const auto r = invoke({"select", "-i", in, "--l", "50", "-o", path("s.csv")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("InsufficientData"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("s.csv.manifest.json")));
}

TEST_F(CliTest, ClassicEstimators) {
    const auto flat = write("flat.csv", "value\n1\n1\n1\n1\n1\n1\n1\n1\n");
    const auto a = invoke({"classic", "-i", flat, "--estimator", "apen", "--r", "0.1"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, "apen,2,0.1,0\n");

    ASSERT_EQ(invoke({"generate", "--system", "markov2", "--n", "200", "--seed", "4", "-o", path("m.csv")}).code, 0);
    const auto s = invoke({"classic", "-i", path("m.csv"), "--estimator", "sampen", "--r", "1e-9"});
    EXPECT_EQ(s.code, 3);
    EXPECT_NE(s.err.find("NoMatches"), std::string::npos);

    std::istringstream in(slurp(path("m.csv")));
    const auto series = spenra::read_series_csv(in);
    const auto pn = invoke({"classic", "-i", path("m.csv"), "--estimator", "phi-norm", "--p", "2", "--r", "0.5"});
    ASSERT_EQ(pn.code, 0);
    EXPECT_EQ(pn.out, "phi-norm,2,0.5," + spenra::format_short(spenra::phi(series, 2, 0.5)) + "\n");

    const auto def = invoke({"classic", "-i", path("m.csv"), "--estimator", "sampen"});
    ASSERT_EQ(def.code, 0);
    EXPECT_EQ(def.out.rfind("sampen,2," + spenra::format_short(0.2 * spenra::sample_std(series.values())) + ",", 0),
              0u);

    EXPECT_EQ(invoke({"classic", "-i", flat, "--estimator", "apen"}).code, 2);
    const auto iso = write("iso.csv", "0\n10\n20\n30\n");
    EXPECT_EQ(invoke({"classic", "-i", iso, "--estimator", "loo-rate", "--p", "1", "--r", "1"}).code, 3);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"generate"}).code, 2);
    EXPECT_EQ(invoke({"generate", "--system", "henon"}).code, 2);
    EXPECT_EQ(invoke({"generate", "--system", "markov2", "--n", "abc"}).code, 2);
    EXPECT_EQ(invoke({"generate", "--system", "markov2", "--theta", "3"}).code, 2);
    EXPECT_EQ(invoke({"generate", "--system", "concat", "--n", "10"}).code, 2);
    EXPECT_EQ(invoke({"select", "-i", path("missing.csv")}).code, 2);
    EXPECT_EQ(invoke({"--threads", "0", "generate", "--system", "markov2"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}
