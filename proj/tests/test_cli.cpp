#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(FPERTURB_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fperturb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").status, 0); }

TEST_F(Cli, EmptyMatrixFileIsParseError) {
  EXPECT_EQ(run("lu-normwise --matrix " + write("empty.csv", "") + " --delta 0.1").status, 2);
}

TEST_F(Cli, MissingMatrixFileIsParseError) {
  EXPECT_EQ(run("lu-normwise --matrix " + (dir_ / "absent.csv").string() + " --delta 0.1").status, 2);
}

TEST_F(Cli, ConfigErrorsExitOne) {
  EXPECT_EQ(run("lu-normwise --delta 0.1").status, 1);
  EXPECT_EQ(run("lu-normwise --kahan 4,0.3 --graded 4,1,1 --delta 0.1").status, 1);
  EXPECT_EQ(run("lu-normwise --kahan 4,0.3 --delta -1").status, 1);
  EXPECT_EQ(run("table 7").status, 1);
  EXPECT_EQ(run("verify --experiment cholesky --kahan 4,0.3 --delta 0.1").status, 1);
}

TEST_F(Cli, SingularLeadingMinorExitsThree) {
  EXPECT_EQ(run("lu-normwise --matrix " + write("s.csv", "0,1\n1,0\n") + " --delta 0.1").status, 3);
}

TEST_F(Cli, RankDeficientExitsThree) {
  EXPECT_EQ(run("qr-normwise --matrix " + write("r.csv", "1,2\n2,4\n") + " --delta 0.1").status, 3);
}

TEST_F(Cli, RequireApplicable) {
  const std::string id = write("id.csv", "1,0\n0,1\n");
  const CliResult bad = run("lu-normwise --matrix " + id + " --delta 0.3 --require-applicable");
  EXPECT_EQ(bad.status, 4);
  EXPECT_NE(bad.out.find("rigorous_dl,n/a"), std::string::npos);
  EXPECT_EQ(run("lu-normwise --matrix " + id + " --delta 0.1 --require-applicable").status, 0);
}

TEST_F(Cli, IdentityClosedForm) {
  const std::string id = write("id.csv", "1,0,0\n0,1,0\n0,0,1\n");
  const CliResult r = run("lu-normwise --matrix " + id + " --delta 0.1875");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("rigorous_dl,0.25,"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyIdentityHasNoViolations) {
  std::string rows;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) rows += (j ? "," : "") + std::string(i == j ? "1" : "0");
    rows += "\n";
  }
  const CliResult r = run("verify --experiment lu-normwise --matrix " + write("i10.csv", rows) +
                          " --delta 0.1 --trials 100 --output json");
  ASSERT_EQ(r.status, 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_EQ(j["config"]["trials"], 100);
}

TEST_F(Cli, QrComponentwiseNeedsEpsilon) {
  EXPECT_EQ(run("qr-componentwise --kahan 5,0.39269908169872414").status, 1);
  EXPECT_EQ(run("qr-componentwise --kahan 5,0.39269908169872414 --epsilon 1e-14").status, 0);
}

TEST_F(Cli, CMatrixFileIsChecked) {
  const std::string bad = write("c.csv", "2,0\n0,1\n");
  EXPECT_NE(run("qr-componentwise --kahan 2,0.5 --epsilon 1e-10 --c-matrix " + bad).status, 0);
  const std::string good = write("g.csv", "0.5,0\n0,1\n");
  EXPECT_EQ(run("qr-componentwise --kahan 2,0.5 --epsilon 1e-10 --c-matrix " + good).status, 0);
}

TEST_F(Cli, TableTwoMarkdown) {
  const CliResult r = run("table 2 --output markdown --deterministic");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("| n |"), std::string::npos);
  EXPECT_NE(r.out.find("| 25 |"), std::string::npos);
}

TEST_F(Cli, DeterministicOutputIsByteIdentical) {
  const std::string args = "verify --experiment qr-normwise --kahan 6,0.39269908169872414 --delta 1e-6 "
                           "--trials 50 --seed 5 --output json --deterministic --delta-halving 2";
  const CliResult a = run(args);
  const CliResult b = run(args);
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, OutFileMatchesStdout) {
  const std::string out = (dir_ / "t.csv").string();
  const CliResult to_stdout = run("table 2 --deterministic");
  ASSERT_EQ(run("table 2 --deterministic --out " + out).status, 0);
  std::ifstream in(out);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, to_stdout.out);
}
