#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kSamples = fs::path(LAMFAM_SOURCE_DIR) / "samples";

struct CliResult {
  int code;
  std::string err;
};

CliResult run(const std::string& args, const fs::path& out) {
  fs::create_directories(out);
  const fs::path err = out / "stderr.txt";
  const std::string cmd = std::string("\"") + LAMFAM_CLI_PATH + "\" " + args + " 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

class CliSmoke : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("lamfam_cli_smoke_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

}  // namespace

TEST_F(CliSmoke, SelfcheckSucceedsAndWritesPayloadAndLog) {
  const fs::path out = dir / "ok";
  const CliResult r = run("selfcheck --config \"" + (kSamples / "default.toml").string() + "\" --out \"" + out.string() + "\"", out);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "selfcheck.json"));
  EXPECT_TRUE(fs::exists(out / "lamfam.log"));
}

TEST_F(CliSmoke, OverridesAreAccepted) {
  const fs::path out = dir / "theta";
  const CliResult r = run("theta --config \"" + (kSamples / "default.toml").string() + "\" --out \"" + out.string() + "\" --qcap 40", out);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "cache"));
}

TEST_F(CliSmoke, ValidationFailureExitsTwo) {
  const fs::path out = dir / "invalid";
  const CliResult r = run("euler --config \"" + (kSamples / "invalid" / "p-inert.toml").string() + "\" --out \"" + out.string() + "\"", out);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("p-inert"), std::string::npos) << r.err;
}

TEST_F(CliSmoke, ParseFailuresExitThree) {
  const fs::path bad = dir / "bad.toml";
  std::ofstream(bad) << "prime = 5\nprecision = [\n";
  const fs::path out = dir / "parse";
  CliResult r = run("tate --config \"" + bad.string() + "\" --out \"" + out.string() + "\"", out);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("bad.toml:"), std::string::npos) << r.err;
  // missing --config and unknown verbs are command-line parse errors
  EXPECT_EQ(run("tate --out \"" + out.string() + "\"", out).code, 3);
  EXPECT_EQ(run("frobnicate", out).code, 3);
  EXPECT_EQ(run("theta --config \"" + (dir / "absent.toml").string() + "\"", out).code, 3);
}
