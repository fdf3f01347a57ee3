#pragma once

#include "lagdex/series.hpp"

#include <random>
#include <vector>

namespace lagdex::fixtures {

/// Continuous two-slope line: +0.65/yr up to the join, -1.52/yr after, value
/// 9 at the join month.
inline MonthlySeries two_slope(MonthStamp first, MonthStamp last, MonthStamp join, double noise = 0.0,
                               std::uint64_t seed = 0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> eps(0.0, noise > 0 ? noise : 1.0);
    const double tj = year_fraction(join).value;
    std::vector<double> v;
    for (auto m = first; m <= last; m = m + 1) {
        const double t = year_fraction(m).value;
        double y = t < tj ? 9.0 + 0.65 * (t - tj) : 9.0 - 1.52 * (t - tj);
        if (noise > 0) y += eps(rng);
        v.push_back(y);
    }
    return MonthlySeries("dCPI", first, v);
}

} // namespace lagdex::fixtures
