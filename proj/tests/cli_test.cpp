#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace spca::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "spca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spca_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  Result r = call({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
  EXPECT_EQ(call({"fit", "--help"}).code, kOk);
  EXPECT_EQ(call({}).code, kUsage);
  EXPECT_EQ(call({"nonsense"}).code, kUsage);
  EXPECT_EQ(call({"simulate", "--p", "abc", "--out", path("x.csv")}).code, kUsage);
  EXPECT_EQ(call({"simulate"}).code, kUsage);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::vector<std::string> base = {"simulate", "--p", "6", "--n", "20", "--burn-in", "10",
                                         "--seed", "4"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a.csv"), "--save-model", path("m.txt")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b.csv")});
  ASSERT_EQ(call(a).code, kOk);
  ASSERT_EQ(call(b).code, kOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("m.txt")).find("seed=4"), std::string::npos);

  // Reloading the saved model reproduces the same stretch.
  ASSERT_EQ(call({"simulate", "--model", path("m.txt"), "--n", "20", "--out", path("c.csv")}).code,
            kOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, SimulateRejectsInvalidModel) {
  EXPECT_EQ(call({"simulate", "--nu", "1.5", "--out", path("x.csv")}).code, kData);
  write("bad.txt", "p=4\nwhat=1\n");
  EXPECT_EQ(call({"simulate", "--model", path("bad.txt"), "--out", path("x.csv")}).code, kData);
}

TEST_F(CliTest, FitWritesEstimatesAndSummary) {
  ASSERT_EQ(call({"simulate", "--p", "12", "--n", "200", "--burn-in", "50", "--out", path("x.csv")}).code,
            kOk);
  Result r = call({"fit", "--input", path("x.csv"), "--penalty", "l1", "--lambda", "auto", "--out",
                   path("est.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("penalty=l1"), std::string::npos);
  EXPECT_NE(r.out.find("converged=true"), std::string::npos);
  EXPECT_NE(r.out.find("p=12"), std::string::npos);

  r = call({"fit", "--input", path("x.csv"), "--penalty", "all", "--out", path("all.csv"),
            "--summary", path("summary.txt")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const std::string csv = slurp(path("all.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "index,coordinate_label,l0_estimate,l1_estimate,standard_estimate");
  EXPECT_NE(slurp(path("summary.txt")).find("l0.support_size="), std::string::npos);

  EXPECT_EQ(call({"fit", "--input", path("x.csv"), "--lambda", "lots", "--out", path("e.csv")}).code,
            kUsage);
  EXPECT_EQ(call({"fit", "--input", path("x.csv"), "--lambda", "-1", "--out", path("e.csv")}).code,
            kData);
}

TEST_F(CliTest, FitRejectsMissingAndRaggedInput) {
  write("missing.csv", "1,2\n3,NA\n");
  Result r = call({"fit", "--input", path("missing.csv"), "--out", path("e.csv")});
  EXPECT_EQ(r.code, kData);
  EXPECT_NE(r.err.find("row 2, column 2"), std::string::npos);
  write("ragged.csv", "1,2\n3\n");
  EXPECT_EQ(call({"fit", "--input", path("ragged.csv"), "--out", path("e.csv")}).code, kData);
  EXPECT_EQ(call({"fit", "--input", path("none.csv"), "--out", path("e.csv")}).code, kData);
}

TEST_F(CliTest, Table1ByteIdenticalAcrossThreads) {
  const std::vector<std::string> base = {"table1", "--p", "10", "--n", "30", "--reps", "4",
                                         "--nus", "0.6,0.1", "--burn-in", "50", "--seed", "7"};
  auto a = base;
  a.insert(a.end(), {"--threads", "1", "--out", path("a.csv")});
  auto b = base;
  b.insert(b.end(), {"--threads", "3", "--out", path("b.csv")});
  const Result ra = call(a);
  ASSERT_EQ(ra.code, kOk) << ra.err;
  ASSERT_EQ(call(b).code, kOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(ra.out.find("Loss (Size)"), std::string::npos);
  EXPECT_EQ(call({"table1", "--out", path("c.csv"), "--loss", "huber"}).code, kData);
}

TEST_F(CliTest, RatesAndConcentration) {
  Result r = call({"rates", "--p", "8", "--burn-in", "20", "--n-list", "32,64", "--p-list", "8",
                   "--reps", "2", "--out", path("rates.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(slurp(path("rates.csv")).substr(0, 35), "n,p,s0,method,median_loss,rate_scal");

  r = call({"concentration", "--p", "4", "--burn-in", "20", "--n-list", "50,500", "--reps", "5",
            "--out", path("conc.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(slurp(path("conc.csv")).find("500,hessian_pd_rate"), std::string::npos);
}

TEST_F(CliTest, SpectrumAndDetrend) {
  write("d.csv", "a,b\n1,2\n3,1\n2,5\n4,3\n");
  ASSERT_EQ(call({"detrend", "--input", path("d.csv"), "--header", "--out", path("r.csv")}).code, kOk);
  const std::string detrended = slurp(path("r.csv"));
  EXPECT_EQ(detrended.substr(0, detrended.find('\n')), "a,b");
  Result r = call({"spectrum", "--input", path("d.csv"), "--header", "--k", "2", "--out", path("s.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(slurp(path("s.csv")).substr(0, 15), "rank,eigenvalue");
  EXPECT_EQ(call({"spectrum", "--input", path("d.csv"), "--header", "--k", "5", "--out", path("s.csv")}).code,
            kData);
}

TEST_F(CliTest, BoundsPrintsDefaultLambdas) {
  write("params.txt", "sigma_gap=1\neta=0.1\nC=3\n");
  Result r = call({"bounds", "--params", path("params.txt"), "--p", "512", "--n", "256"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("lambda0=0.0731054\n"), std::string::npos);
  EXPECT_NE(r.out.find("lambda1=0.0520347\n"), std::string::npos);
  EXPECT_NE(r.out.find("l0.delta_n="), std::string::npos);

  write("bad.txt", "eta=0.5\n");
  EXPECT_EQ(call({"bounds", "--params", path("bad.txt")}).code, kData);
}

}  // namespace
}  // namespace spca::cli
