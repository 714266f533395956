#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(LEAFGEO_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("leafgeo_cli_test_" + name);
}

}  // namespace

TEST(Cli, VerifyQuadraticPasses) {
  const CliRun r = run("verify --spec builtin:quadratic --n 1000");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("result: pass"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, VerifyIsDeterministic) {
  const CliRun a = run("verify --spec builtin:genus2 --n 100 --seed 7 --json");
  const CliRun b = run("verify --spec builtin:genus2 --n 100 --seed 7 --json");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("\"passed\": true"), std::string::npos);
}

TEST(Cli, ClassifyQuadraticLightlikeLeaf) {
  const CliRun r = run("classify --spec builtin:quadratic --c 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("genus: 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("punctures: 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("red_lines: [-0.772330009074, -0.29679705264"), std::string::npos) << r.out;
}

TEST(Cli, ClassifyJson) {
  const CliRun r = run("classify --spec builtin:linear --c 1 --json");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"genus\": 0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"punctures\": 2"), std::string::npos);
}

TEST(Cli, FlowCsvDecreases) {
  const CliRun r = run("flow --spec builtin:linear --c -1 --G z --start 1,-1,0 --steps 1000");
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 1002u);
  EXPECT_EQ(rows[0], "t,x,y,z,G,C,f,causal");
  double prev = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> cols;
    std::stringstream ss(rows[i]);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 8u);
    const double g = std::stod(cols[4]);
    EXPECT_LT(g, prev);
    prev = g;
    EXPECT_EQ(cols[7], "spacelike");
  }
}

TEST(Cli, FrameOnRedLine) {
  const CliRun r = run("frame --spec builtin:linear --c 0 --chart xz --x 1 --z 1 --G z --json");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"red_line\": true"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"radical_direction\""), std::string::npos);
  EXPECT_NE(r.out.find("\"tau_db\": null"), std::string::npos);
}

TEST(Cli, RedlinesAndPolylines) {
  const auto path = temp_file("poly.csv");
  const CliRun r = run("redlines --spec builtin:quadratic --c 0 --polylines " + path.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 3u) << r.out;
  std::ifstream in(path);
  std::string head;
  std::getline(in, head);
  EXPECT_EQ(head, "x,y,z");
  std::filesystem::remove(path);
}

TEST(Cli, MeshWritesObj) {
  const auto path = temp_file("leaf.obj");
  const CliRun r = run("mesh --spec builtin:quadratic --kind leaf --c 0 --res 24 --out " + path.string());
  EXPECT_EQ(r.code, 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("\nv "), std::string::npos);
  EXPECT_NE(ss.str().find("g lorentzian"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, SpecFromFileAndInline) {
  const auto path = temp_file("spec.txt");
  {
    std::ofstream out(path);
    out << "# a cubic structure function\nfamily=polynomial U=\"3*z^2 - 1\" V=\"0\"\n";
  }
  EXPECT_EQ(run("classify --spec " + path.string() + " --c 0").code, 0);
  EXPECT_EQ(run("classify --spec 'family=poisson-lie eta=0.5' --c 0.1").code, 0);
  std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("bogus").code, 1);
  EXPECT_EQ(run("classify --spec builtin:nope --c 0").code, 1);
  EXPECT_EQ(run("classify --spec 'family=polynomial U=\"3*z^^2\"' --c 0").code, 1);
  EXPECT_EQ(run("flow --spec builtin:linear --c 1 --G z --start 1,1").code, 1);
  EXPECT_EQ(run("mesh --spec builtin:linear --kind cone").code, 1);
  // Chart breakdown and off-leaf starts are numeric failures.
  EXPECT_EQ(run("frame --spec builtin:linear --c 1 --chart xz --x 0 --z 0").code, 3);
  EXPECT_EQ(run("flow --spec builtin:linear --c 1 --G z --start 1,2,0").code, 3);
  EXPECT_EQ(run("classify --spec builtin:linear --c 0 --zmin -1 --zmax 0").code, 3);
}
