#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "tebc/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string fixture(const char* name) { return std::string(TEBC_FIXTURE_DIR) + "/" + name; }

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / ("tebc_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(TEBC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, ValidateProps) {
  const auto out = scratch() / "props.json";
  EXPECT_EQ(run("validate props --m 3 --n 4 --draws 5000 --seed 1 --json " + out.string()), 0);
  const auto j = tebc::json::parse(tebc::read_text_file(out.string()));
  EXPECT_TRUE(j.at("prop1").at("passed").get<bool>());
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_EQ(run("validate props --m 3 --n 4 --draws 10 --seed 1"), 2);
  EXPECT_EQ(run("validate props --m 1 --n 4 --draws 5000 --seed 1"), 1);
}

TEST(Cli, BenchSmoothingIsByteIdentical) {
  const auto dir = scratch();
  const auto a = dir / "a.csv", b = dir / "b.csv", j = dir / "a.json";
  const auto cfg = fixture("smoothing_small.json");
  ASSERT_EQ(run("bench smoothing --config " + cfg + " --out " + a.string() + " --json " + j.string()), 0);
  ASSERT_EQ(run("bench smoothing --config " + cfg + " --out " + b.string()), 0);
  const auto text = tebc::read_text_file(a.string());
  EXPECT_EQ(text, tebc::read_text_file(b.string()));
  EXPECT_EQ(text.rfind("dataset,method,criterion,mean_value,performance_score\n", 0), 0u);
  EXPECT_TRUE(tebc::json::parse(tebc::read_text_file(j.string())).contains("metadata"));
}

TEST(Cli, BenchConfigErrors) {
  const auto dir = scratch();
  write(dir / "bad.json", R"({"m": 20, "bogus": 1})");
  EXPECT_EQ(run("bench smoothing --config " + (dir / "bad.json").string() + " --out " + (dir / "x.csv").string()), 1);
  write(dir / "broken.json", "{");
  EXPECT_EQ(run("bench maxent --config " + (dir / "broken.json").string() + " --out " + (dir / "x.csv").string()), 1);
  write(dir / "wrong_track.json", R"({"methods": ["sme"]})");
  EXPECT_EQ(run("bench smoothing --config " + (dir / "wrong_track.json").string() + " --out " +
                (dir / "x.csv").string()),
            1);
  EXPECT_EQ(run("bench smoothing --config " + (dir / "absent.json").string() + " --out " + (dir / "x.csv").string()), 2);
}

TEST(Cli, BenchMaxent) {
  const auto out = scratch() / "m.csv";
  EXPECT_EQ(run("bench maxent --config " + fixture("maxent_small.json") + " --out " + out.string()), 0);
  EXPECT_NE(tebc::read_text_file(out.string()).find("uniform01,f-ml-tebc,jsd,"), std::string::npos);
}

TEST(Cli, Estimate) {
  const auto dir = scratch();
  write(dir / "c.txt", "3\n1\n0\n");
  const auto out = dir / "e.json";
  ASSERT_EQ(run("estimate --counts " + (dir / "c.txt").string() + " --method simplest-gt --out " + out.string()), 0);
  const auto p = tebc::json::parse(tebc::read_text_file(out.string())).at("estimate").at("p");
  EXPECT_NEAR(p[0].get<double>(), 0.5625, 1e-12);
  EXPECT_NEAR(p[2].get<double>(), 0.25, 1e-12);

  ASSERT_EQ(run("estimate --counts " + (dir / "c.txt").string() + " --method teb-lidstone --bias bayes --out " +
                out.string()),
            0);
  const auto j = tebc::json::parse(tebc::read_text_file(out.string()));
  EXPECT_EQ(j.at("bias").at("kind"), "bayesian_uniform");
  EXPECT_EQ(run("estimate --counts " + (dir / "c.txt").string() + " --method l22-tebc --bias naive --out " +
                out.string()),
            0);
  EXPECT_EQ(run("estimate --counts " + (dir / "c.txt").string() + " --method nope --out " + out.string()), 1);
  EXPECT_EQ(run("estimate --counts " + (dir / "c.txt").string() + " --method laplace --bias sideways --out " +
                out.string()),
            1);
  EXPECT_EQ(run("estimate --counts " + (dir / "none.txt").string() + " --method laplace --out " + out.string()), 2);
}
