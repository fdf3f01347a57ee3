#include "lagdex/search.hpp"
#include "lagdex/signal.hpp"
#include "synthetic_data.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lagdex;

namespace {

MonthlySeries dev(std::vector<MonthlySeries::value_type> v) { return MonthlySeries("dev", MonthStamp(2011, 1), v); }

} // namespace

TEST(FindEpisodes, ResolvedPositiveEpisode)
{
    const double s = 2.0;
    const auto eps = find_episodes(dev({0.0, 0.0, 3 * s, 3 * s, 0.0, 0.0}), 2.0, 1.0, s);
    ASSERT_EQ(eps.size(), 1u);
    EXPECT_EQ(eps[0].start, MonthStamp(2011, 3));
    EXPECT_EQ(eps[0].end, MonthStamp(2011, 4));
    EXPECT_EQ(eps[0].sign, 1);
    EXPECT_EQ(eps[0].peak_deviation, 6.0);
    EXPECT_TRUE(eps[0].resolved);
}

TEST(FindEpisodes, FlatZeroHasNone)
{
    EXPECT_TRUE(find_episodes(dev(std::vector<MonthlySeries::value_type>(24, 0.0)), 2.0, 1.0, 1.0).empty());
    EXPECT_TRUE(find_episodes(dev(std::vector<MonthlySeries::value_type>(24, 0.0)), 2.0, 1.0, 0.0).empty());
}

TEST(FindEpisodes, OpenAtDataEndIsUnresolved)
{
    const auto eps = find_episodes(dev({0.0, 0.5, -1.0, -3.0}), 2.0, 1.0, 1.0);
    ASSERT_EQ(eps.size(), 1u);
    EXPECT_EQ(eps[0].sign, -1);
    EXPECT_EQ(eps[0].peak_deviation, -3.0);
    EXPECT_FALSE(eps[0].resolved);
    EXPECT_EQ(eps[0].start, eps[0].end);
}

TEST(FindEpisodes, HysteresisKeepsEpisodeOpenBetweenBands)
{
    // 1.5 sigma is inside the hysteresis band: neither opens nor closes.
    const auto eps = find_episodes(dev({2.5, 1.5, 1.5, 2.1, 0.9, 1.5, 1.9}), 2.0, 1.0, 1.0);
    ASSERT_EQ(eps.size(), 1u);
    EXPECT_EQ(eps[0].start, MonthStamp(2011, 1));
    EXPECT_EQ(eps[0].end, MonthStamp(2011, 4));
    EXPECT_EQ(eps[0].peak_deviation, 2.5);
    EXPECT_TRUE(eps[0].resolved);
}

TEST(FindEpisodes, SignCrossingClosesAndMayReopen)
{
    const auto eps = find_episodes(dev({3.0, -3.0, -0.2}), 2.0, 1.0, 1.0);
    ASSERT_EQ(eps.size(), 2u);
    EXPECT_EQ(eps[0].sign, 1);
    EXPECT_TRUE(eps[0].resolved);
    EXPECT_EQ(eps[1].sign, -1);
    EXPECT_EQ(eps[1].start, MonthStamp(2011, 2));
    EXPECT_TRUE(eps[1].resolved);
}

TEST(FindEpisodes, MissingMonthsSkipped)
{
    const auto eps = find_episodes(dev({3.0, std::nullopt, 2.5, std::nullopt, 0.0}), 2.0, 1.0, 1.0);
    ASSERT_EQ(eps.size(), 1u);
    EXPECT_EQ(eps[0].end, MonthStamp(2011, 3));
}

TEST(FindEpisodes, RejectsBadThresholds)
{
    EXPECT_THROW(find_episodes(dev({1.0}), 1.0, 1.0, 1.0), Error);
    EXPECT_THROW(find_episodes(dev({1.0}), 2.0, -1.0, 1.0), Error);
    EXPECT_THROW(find_episodes(dev({1.0}), 2.0, 1.0, -1.0), Error);
}

TEST(FindEpisodes, Properties)
{
    std::mt19937_64 rng(77);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MonthlySeries::value_type> v(120);
        double ar = 0.0;
        for (auto& e : v) {
            ar = 0.8 * ar + z(rng);
            e = (rng() % 20 == 0) ? std::nullopt : std::optional(ar);
        }
        const auto d = dev(v);
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        for (double enter : {1.2, 1.5, 2.0, 2.5, 3.0, 4.0}) {
            const auto eps = find_episodes(d, enter, 1.0, 1.0);
            ASSERT_LE(eps.size(), previous);
            previous = eps.size();
            for (std::size_t i = 0; i < eps.size(); ++i) {
                const auto& e = eps[i];
                ASSERT_LE(e.start, e.end);
                ASSERT_EQ(e.sign, e.peak_deviation > 0 ? 1 : -1);
                ASSERT_GE(std::abs(e.peak_deviation), enter);
                if (i > 0) {
                    ASSERT_LT(eps[i - 1].end, e.start);
                }
                if (!e.resolved) {
                    ASSERT_EQ(i + 1, eps.size());
                }
            }
        }
    }
}

TEST(DeviationSeries, Examples)
{
    synthetic::PanelOptions opt;
    opt.noise = 0.0;
    const auto reg = synthetic::make_registry(opt);
    const MonthInterval w{MonthStamp(2002, 4), MonthStamp(2012, 3)};
    const auto m = fit_key(reg, {"COAL", "PPI", 1, 1}, w);

    const auto zero = deviation_series(reg.target(), m, reg);
    for (const auto& v : zero.values()) EXPECT_NEAR(*v, 0.0, 1e-9);

    std::vector<double> shifted;
    for (const auto& v : reg.target().values()) shifted.push_back(*v + 5.0);
    const auto five = deviation_series(MonthlySeries("COP", reg.target().start(), shifted), m, reg);
    for (const auto& v : five.values()) EXPECT_NEAR(*v, 5.0, 1e-9);

    EXPECT_TRUE(find_episodes(zero, 2.0, 1.0, m.stats.rms).empty());
}

TEST(DeviationSeries, MeanZeroOverFitWindow)
{
    synthetic::PanelOptions opt;
    opt.seed = 4;
    opt.noise = 3.0;
    const auto reg = synthetic::make_registry(opt);
    const MonthInterval w{MonthStamp(2002, 4), MonthStamp(2012, 3)};
    const auto m = fit_key(reg, {"E", "OIL", 2, 0}, w);
    const auto d = deviation_series(reg.target(), m, reg);
    double sum = 0.0;
    std::size_t n = 0;
    for (auto mth = w.first; mth <= w.last; mth = mth + 1)
        if (auto v = d.at(mth)) {
            sum += *v;
            ++n;
        }
    EXPECT_EQ(n, m.stats.n_obs);
    EXPECT_NEAR(sum / static_cast<double>(n), 0.0, 1e-9);
}

TEST(ResolutionRate, Counts)
{
    EXPECT_FALSE(resolution_rate({}));
    std::vector<DeviationEpisode> eps(4);
    eps[0].resolved = eps[1].resolved = eps[2].resolved = true;
    EXPECT_EQ(resolution_rate(eps), 0.75);
}
