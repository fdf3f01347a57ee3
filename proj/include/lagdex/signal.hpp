#pragma once

#include "lagdex/error.hpp"
#include "lagdex/regress.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/series.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace lagdex {

inline constexpr double default_enter_multiple = 2.0;
inline constexpr double default_exit_multiple = 1.0;

/// A run of months during which the price stayed away from the model.
struct DeviationEpisode {
    MonthStamp start;
    MonthStamp end; ///< last month still outside the exit band
    int sign = 0;   ///< +1 above the model (overvalued), -1 below
    double peak_deviation = 0.0; ///< signed deviation of largest magnitude
    bool resolved = false;       ///< deviation came back inside the exit band before data end
};

/// observed - predicted wherever both exist.
template <class Model>
MonthlySeries deviation_series(const MonthlySeries& target, const Model& model, const SeriesRegistry& registry)
{
    const auto predicted = predict(model, registry, target.range());
    std::vector<MonthlySeries::value_type> out;
    out.reserve(target.size());
    bool any = false;
    for (auto m = target.start(); m <= target.end(); m = m + 1) {
        auto o = target.at(m);
        auto p = predicted.at(m);
        if (o && p) {
            out.emplace_back(*o - *p);
            any = true;
        } else {
            out.emplace_back(std::nullopt);
        }
    }
    if (!any) throw Error(ErrorKind::EmptyIntersection, "model prediction does not cover '" + target.id() + "'");
    return MonthlySeries(target.id() + ".deviation", target.start(), std::move(out));
}

/// Hysteresis episode detector: an episode opens when |dev| >= enter * rms and
/// closes at the first month with |dev| <= exit * rms or a sign change. Months
/// without a deviation value are skipped.
inline std::vector<DeviationEpisode> find_episodes(const MonthlySeries& dev, double enter, double exit, double rms)
{
    if (!(enter > exit) || !(exit >= 0.0) || !(rms >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "episode thresholds need enter > exit >= 0 and rms >= 0");
    const double open_at = enter * rms;
    const double close_at = exit * rms;

    std::vector<DeviationEpisode> episodes;
    std::optional<DeviationEpisode> current;
    for (auto m = dev.start(); m <= dev.end(); m = m + 1) {
        const auto v = dev.at(m);
        if (!v) continue;
        const double d = *v;
        if (current) {
            const bool crossed = (d > 0.0 ? 1 : d < 0.0 ? -1 : 0) == -current->sign;
            if (std::abs(d) <= close_at || crossed) {
                current->resolved = true;
                episodes.push_back(*current);
                current.reset();
            } else {
                current->end = m;
                if (std::abs(d) > std::abs(current->peak_deviation)) current->peak_deviation = d;
                continue;
            }
        }
        if (std::abs(d) >= open_at && d != 0.0) current = DeviationEpisode{m, m, d > 0.0 ? 1 : -1, d, false};
    }
    if (current) episodes.push_back(*current);
    return episodes;
}

/// Share of episodes that returned inside the exit band; nullopt when there
/// are none.
inline std::optional<double> resolution_rate(const std::vector<DeviationEpisode>& episodes)
{
    if (episodes.empty()) return std::nullopt;
    std::size_t resolved = 0;
    for (const auto& e : episodes) resolved += e.resolved ? 1 : 0;
    return static_cast<double>(resolved) / static_cast<double>(episodes.size());
}

} // namespace lagdex
