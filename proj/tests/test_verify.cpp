#include <gtest/gtest.h>

#include <set>

#include "leafgeo/verify.hpp"

using namespace leafgeo;

TEST(Verify, BuiltinsPass) {
  VerifyOptions opt;
  opt.n = 300;
  for (const FunctionSpec& s : builtin_specs()) {
    const VerifyReport rep = run_verify(s, opt);
    EXPECT_TRUE(rep.passed()) << s.label();
    for (const CheckResult& c : rep.checks) {
      EXPECT_TRUE(c.passed()) << s.label() << ": " << c.module << " / " << c.name << " max=" << c.max_residual;
      EXPECT_GT(c.samples, 0) << c.name;
    }
  }
}

TEST(Verify, CoversEveryModule) {
  VerifyOptions opt;
  opt.n = 20;
  const VerifyReport rep = run_verify(builtin_spec("quadratic"), opt);
  std::set<std::string> modules, names;
  for (const auto& c : rep.checks) {
    modules.insert(c.module);
    names.insert(c.name);
  }
  EXPECT_EQ(modules, (std::set<std::string>{"funcspec", "ambient", "metriplectic", "chart"}));
  for (const char* n : {"Jacobi identity", "det g_ind = -f/x^2", "gradient identity", "orthogonality tau(d_G, X_G)",
                        "factorization M = -Pi g Pi"})
    EXPECT_TRUE(names.count(n)) << n;
}

TEST(Verify, Deterministic) {
  VerifyOptions opt;
  opt.n = 50;
  const VerifyReport a = run_verify(builtin_spec("genus2"), opt);
  const VerifyReport b = run_verify(builtin_spec("genus2"), opt);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) EXPECT_EQ(a.checks[i].max_residual, b.checks[i].max_residual);
}

TEST(Verify, CustomSpecs) {
  VerifyOptions opt;
  opt.n = 100;
  for (const char* text : {"family=polynomial U=\"3*z^2 - 1\" V=\"0.5\"", "family=poisson-lie eta=0.3",
                           "family=custom U=\"cos(z)\" V=\"0.2*sin(z)\""}) {
    const VerifyReport rep = run_verify(parse_spec(text), opt);
    for (const CheckResult& c : rep.checks) EXPECT_TRUE(c.passed()) << text << ": " << c.name << " " << c.max_residual;
  }
}
