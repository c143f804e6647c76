#include <gtest/gtest.h>

#include <cstdlib>
#include <vector>

#include "neurobif/parallel.hpp"

using namespace neurobif;

TEST(Parallel, MatchesSerialLoop)
{
    std::vector<double> a(1000), b(1000);
    parallel_for(a.size(), [&](std::size_t i) { a[i] = static_cast<double>(i * i) * 0.5; });
    for (std::size_t i = 0; i < b.size(); ++i)
        b[i] = static_cast<double>(i * i) * 0.5;
    EXPECT_EQ(a, b);
    parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(Parallel, ThreadCapFromEnvironment)
{
    ::setenv("NEUROBIF_THREADS", "1", 1);
    EXPECT_EQ(worker_count(), 1);
    ::unsetenv("NEUROBIF_THREADS");
    EXPECT_GE(worker_count(), 1);
}
