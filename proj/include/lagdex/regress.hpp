#pragma once

#include "lagdex/error.hpp"
#include "lagdex/lsq.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/series.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

namespace lagdex {

/// Number of free coefficients in the two-index lag model: b1, b2, c, d.
inline constexpr std::size_t lag_model_parameters = 4;
/// Extra observations demanded on top of the parameter count.
inline constexpr std::size_t min_extra_observations = 12;
inline constexpr int default_max_abs_lag = 13;
/// Origin of the linear time term, in calendar years.
inline constexpr double trend_origin_year = 2000.0;

struct FitOptions {
    double condition_limit = default_condition_limit;
    int max_abs_lag = default_max_abs_lag;
};

/// One regressor of the lag model: a named series read `lag` months in the
/// past (negative lag reads the future).
struct LagInput {
    std::string name;
    const MonthlySeries& series;
    int lag = 0;
};

struct LagTerm {
    std::string series_name;
    int lag = 0;
    double coefficient = 0.0;

    bool operator==(const LagTerm&) const = default;
};

struct FitStatistics {
    MonthInterval window;   ///< first to last month actually used
    MonthlySeries residuals; ///< observed - fitted, missing on skipped months
    double rms = 0.0;        ///< sqrt(SSE / J)
    double stderr_dof = 0.0; ///< sqrt(SSE / (J - parameters))
    std::size_t n_obs = 0;
    double condition = 0.0;
};

/// price(t) = b1 * X1(t - lag1) + b2 * X2(t - lag2) + c * (t - 2000) + d + e(t)
struct LagModel {
    std::string target_name;
    std::array<LagTerm, 2> terms;
    double trend_coeff = 0.0;
    double intercept = 0.0;
    FitStatistics stats;

    double value(double x1, double x2, MonthStamp m) const noexcept
    {
        return terms[0].coefficient * x1 + terms[1].coefficient * x2 +
               trend_coeff * (year_fraction(m).value - trend_origin_year) + intercept;
    }
};

/// price(t) = a + b * driver(t - lag), driver usually a difference of two
/// indices. A price leading the driver is a negative lag.
struct SimpleDiffModel {
    std::string target_name;
    std::string driver;     ///< id of the driver series
    std::string minuend;    ///< registry names when the driver is minuend - subtrahend
    std::string subtrahend;
    double slope = 0.0;
    double intercept = 0.0;
    int lag = 0;
    FitStatistics stats;

    double value(double x, MonthStamp) const noexcept { return intercept + slope * x; }
};

namespace detail {

inline void check_lag(int lag, const FitOptions& options)
{
    if (std::abs(lag) > options.max_abs_lag)
        throw Error(ErrorKind::InvalidArgument,
                    "lag " + std::to_string(lag) + " exceeds bound " + std::to_string(options.max_abs_lag));
}

inline FitStatistics make_statistics(const std::string& target_id, const std::vector<MonthStamp>& months,
                                     const std::vector<double>& residuals, std::size_t parameters, double condition)
{
    const MonthInterval used{months.front(), months.back()};
    std::vector<MonthlySeries::value_type> res(static_cast<std::size_t>(used.length()));
    double sse = 0.0;
    for (std::size_t i = 0; i < months.size(); ++i) {
        res[static_cast<std::size_t>(months[i] - used.first)] = residuals[i];
        sse += residuals[i] * residuals[i];
    }
    const auto j = static_cast<double>(months.size());
    return FitStatistics{used,
                         MonthlySeries(target_id + ".residual", used.first, std::move(res)),
                         std::sqrt(sse / j),
                         std::sqrt(sse / (j - static_cast<double>(parameters))),
                         months.size(),
                         condition};
}

} // namespace detail

/// Least-squares fit of the two-index lag model over the months of `window`
/// where the target and both lagged regressors are observed.
inline LagModel fit_lag_model(const MonthlySeries& target, const LagInput& x1, const LagInput& x2,
                              const MonthInterval& window, const FitOptions& options = {})
{
    detail::check_lag(x1.lag, options);
    detail::check_lag(x2.lag, options);

    std::vector<MonthStamp> months;
    std::vector<double> design;
    std::vector<double> y;
    std::vector<std::array<double, 2>> xs;
    const auto span = target.range().intersect(window);
    if (span) {
        months.reserve(static_cast<std::size_t>(span->length()));
        for (auto m = span->first; m <= span->last; m = m + 1) {
            auto p = target.at(m);
            auto a = x1.series.at(m - x1.lag);
            auto b = x2.series.at(m - x2.lag);
            if (!p || !a || !b) continue;
            months.push_back(m);
            y.push_back(*p);
            xs.push_back({*a, *b});
            design.insert(design.end(), {*a, *b, year_fraction(m).value - trend_origin_year, 1.0});
        }
    }
    const std::size_t needed = lag_model_parameters + min_extra_observations;
    if (months.size() < needed)
        throw Error(ErrorKind::InsufficientData, std::to_string(months.size()) + " usable months for " +
                                                     lagged_name(x1.name, x1.lag) + " and " +
                                                     lagged_name(x2.name, x2.lag) + " in " + window.to_string() +
                                                     ", need " + std::to_string(needed));

    const std::array<std::string, 4> columns{lagged_name(x1.name, x1.lag), lagged_name(x2.name, x2.lag),
                                             "trend(t-2000)", "intercept"};
    const auto sol = solve_least_squares(design, y, columns, options.condition_limit);

    LagModel model{target.id(),
                   {LagTerm{x1.name, x1.lag, sol.coefficients[0]}, LagTerm{x2.name, x2.lag, sol.coefficients[1]}},
                   sol.coefficients[2],
                   sol.coefficients[3],
                   FitStatistics{{months.front(), months.front()}, target, 0.0, 0.0, 0, 0.0}};
    std::vector<double> residuals(months.size());
    for (std::size_t i = 0; i < months.size(); ++i)
        residuals[i] = y[i] - model.value(xs[i][0], xs[i][1], months[i]);
    model.stats = detail::make_statistics(target.id(), months, residuals, lag_model_parameters, sol.condition);
    return model;
}

/// Least-squares a, b of price(t) = a + b * driver(t - lag).
inline SimpleDiffModel fit_simple_diff(const MonthlySeries& target, const MonthlySeries& driver, int lag,
                                       const MonthInterval& window, const FitOptions& options = {})
{
    detail::check_lag(lag, options);

    std::vector<MonthStamp> months;
    std::vector<double> design;
    std::vector<double> y;
    std::vector<double> xs;
    if (const auto span = target.range().intersect(window)) {
        for (auto m = span->first; m <= span->last; m = m + 1) {
            auto p = target.at(m);
            auto x = driver.at(m - lag);
            if (!p || !x) continue;
            months.push_back(m);
            y.push_back(*p);
            xs.push_back(*x);
            design.insert(design.end(), {*x, 1.0});
        }
    }
    const std::size_t needed = 2 + min_extra_observations;
    if (months.size() < needed)
        throw Error(ErrorKind::InsufficientData, std::to_string(months.size()) + " usable months for " +
                                                     lagged_name(driver.id(), lag) + " in " + window.to_string() +
                                                     ", need " + std::to_string(needed));

    const std::array<std::string, 2> columns{lagged_name(driver.id(), lag), "intercept"};
    const auto sol = solve_least_squares(design, y, columns, options.condition_limit);

    SimpleDiffModel model{target.id(), driver.id(), {}, {}, sol.coefficients[0], sol.coefficients[1], lag,
                          FitStatistics{{months.front(), months.front()}, target, 0.0, 0.0, 0, 0.0}};
    std::vector<double> residuals(months.size());
    for (std::size_t i = 0; i < months.size(); ++i) residuals[i] = y[i] - model.value(xs[i], months[i]);
    model.stats = detail::make_statistics(target.id(), months, residuals, 2, sol.condition);
    return model;
}

/// Fits the target of `registry` against minuend - subtrahend.
inline SimpleDiffModel fit_simple_diff(const SeriesRegistry& registry, const std::string& minuend,
                                       const std::string& subtrahend, int lag, const MonthInterval& window,
                                       const FitOptions& options = {})
{
    const auto driver = diff(registry.get(minuend), registry.get(subtrahend));
    auto model = fit_simple_diff(registry.target(), driver, lag, window, options);
    model.target_name = registry.target_name();
    model.minuend = minuend;
    model.subtrahend = subtrahend;
    return model;
}

/// Model value for every month of `months`. A month where a lagged regressor
/// is not observed is missing; nothing is extrapolated.
inline MonthlySeries predict(const LagModel& model, const SeriesRegistry& registry, const MonthInterval& months)
{
    const auto& s1 = registry.get(model.terms[0].series_name);
    const auto& s2 = registry.get(model.terms[1].series_name);
    std::vector<MonthlySeries::value_type> out;
    out.reserve(static_cast<std::size_t>(months.length()));
    for (auto m = months.first; m <= months.last; m = m + 1) {
        auto a = s1.at(m - model.terms[0].lag);
        auto b = s2.at(m - model.terms[1].lag);
        if (a && b)
            out.emplace_back(model.value(*a, *b, m));
        else
            out.emplace_back(std::nullopt);
    }
    return MonthlySeries(model.target_name + ".predicted", months.first, std::move(out));
}

inline MonthlySeries predict(const SimpleDiffModel& model, const SeriesRegistry& registry,
                             const MonthInterval& months)
{
    const auto driver = model.minuend.empty()
                            ? registry.get(model.driver)
                            : diff(registry.get(model.minuend), registry.get(model.subtrahend));
    std::vector<MonthlySeries::value_type> out;
    out.reserve(static_cast<std::size_t>(months.length()));
    for (auto m = months.first; m <= months.last; m = m + 1) {
        if (auto x = driver.at(m - model.lag))
            out.emplace_back(model.value(*x, m));
        else
            out.emplace_back(std::nullopt);
    }
    return MonthlySeries(model.target_name + ".predicted", months.first, std::move(out));
}

} // namespace lagdex
