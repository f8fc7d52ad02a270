#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "boxinfer/log_prob.hpp"
#include "boxinfer/model.hpp"

using namespace boxinfer;

TEST(LogProb, ImpossibleIsAbsorbing) {
    const LogProb half = LogProb::from_prob(0.5);
    EXPECT_TRUE((half * LogProb::impossible()).is_impossible());
    EXPECT_TRUE((LogProb::impossible() * LogProb::certain()).is_impossible());
    EXPECT_EQ(LogProb::impossible().prob(), 0.0);
    EXPECT_EQ(LogProb::certain().prob(), 1.0);
}

TEST(LogProb, MultiplicationAddsLogs) {
    const LogProb p = LogProb::from_prob(0.25) * LogProb::from_prob(0.5);
    EXPECT_NEAR(p.prob(), 0.125, 1e-16);
    // Far below the double range in linear terms, still exact in logs.
    const LogProb tiny = LogProb::from_log(-2000.0) * LogProb::from_log(-3000.0);
    EXPECT_DOUBLE_EQ(tiny.log(), -5000.0);
    EXPECT_FALSE(tiny.is_impossible());
    EXPECT_EQ(tiny.prob(), 0.0);
}

TEST(LogProb, RejectsOutOfRange) {
    EXPECT_THROW(LogProb::from_prob(1.5), InvalidArgument);
    EXPECT_THROW(LogProb::from_prob(-0.1), InvalidArgument);
    EXPECT_THROW(LogProb::from_log(0.1), InvalidArgument);
    EXPECT_THROW(LogProb::from_log(std::nan("")), InvalidArgument);
    EXPECT_EQ(LogProb::from_log(1e-15).log(), 0.0);
}

TEST(LogSumExp, MatchesDirectSumAndHandlesAllImpossible) {
    const std::vector<double> v{std::log(0.1), std::log(0.2), std::log(0.3)};
    EXPECT_NEAR(log_sum_exp(v), std::log(0.6), 1e-15);
    const double ninf = -std::numeric_limits<double>::infinity();
    const std::vector<double> none{ninf, ninf};
    EXPECT_EQ(log_sum_exp(none), ninf);
    EXPECT_EQ(log_sum_exp(std::vector<double>{}), ninf);
    const std::vector<double> huge{-1000.0, -1000.0};
    EXPECT_NEAR(log_sum_exp(huge), -1000.0 + std::log(2.0), 1e-12);
}

TEST(Color, EncodingRoundTrips) {
    for (int v : {0, 1})
        EXPECT_EQ(to_int(color_from_int(v)), v);
    EXPECT_EQ(color_from_int(0), Color::Black);
    EXPECT_EQ(color_from_int(1), Color::White);
    EXPECT_THROW(color_from_int(2), InvalidArgument);
}

TEST(BoxModel, PropensitiesRunFromZeroToOne) {
    for (unsigned m : {1u, 2u, 5u, 17u}) {
        const BoxModel model(m);
        ASSERT_EQ(model.boxes(), m + 1);
        EXPECT_EQ(model.propensity(0), 0.0);
        EXPECT_EQ(model.propensity(m), 1.0);
        for (std::size_t i = 1; i <= m; ++i)
            EXPECT_LT(model.propensity(i - 1), model.propensity(i));
    }
    EXPECT_THROW(BoxModel(0), InvalidArgument);
    EXPECT_THROW(BoxModel(5).propensity(6), InvalidArgument);
}

TEST(SequenceSummary, RejectsMoreWhitesThanDraws) {
    EXPECT_THROW(SequenceSummary(3, 4), InvalidArgument);
    EXPECT_EQ(SequenceSummary(3, 1).blacks(), 2u);
}
