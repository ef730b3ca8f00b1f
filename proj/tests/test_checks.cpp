#include <gtest/gtest.h>

#include <chrono>

#include "hxd/checks.hpp"

namespace {

TEST(Selfcheck, AllPassOnCleanBuild) {
  const auto start = std::chrono::steady_clock::now();
  const auto results = hxd::run_selfcheck({});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(results.size(), 5u);
  for (const auto& r : results) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
  EXPECT_LT(secs, 30.0);
}

TEST(Selfcheck, CorruptLayoutIsCaught) {
  const auto r = hxd::check_coefficient_layout(3, true);
  EXPECT_FALSE(r.pass) << r.detail;
  EXPECT_TRUE(hxd::check_coefficient_layout(3, false).pass);
}

}  // namespace
