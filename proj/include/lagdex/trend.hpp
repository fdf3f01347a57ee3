#pragma once

#include "lagdex/error.hpp"
#include "lagdex/series.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace lagdex {

inline constexpr int default_min_segment = 36;
inline constexpr std::size_t min_segment_observations = 24;

/// value(t) = intercept + slope * (t - 2000), t in fractional years.
struct TrendSegment {
    MonthStamp start;
    MonthStamp end;
    double intercept = 0.0; ///< index units at t = 2000.0
    double slope = 0.0;     ///< index units per year
    double sse = 0.0;
    std::size_t n_obs = 0;

    double value_at(double year) const noexcept { return intercept + slope * (year - 2000.0); }
    double value_at(MonthStamp m) const noexcept { return value_at(year_fraction(m).value); }
};

struct TrendFit {
    std::vector<TrendSegment> segments;
    /// First month of every segment after the first.
    std::vector<MonthStamp> breakpoints;
    double total_sse = 0.0;
};

struct SegmentationOptions {
    int max_breaks = 2;
    int min_segment = default_min_segment; ///< observations per segment
    int gap_max = 0;                       ///< unfitted transition months allowed at each break
};

namespace detail {

struct Observations {
    std::vector<MonthStamp> months;
    std::vector<double> u; ///< t - 2000
    std::vector<double> y;
};

inline Observations observed(const MonthlySeries& series, const MonthInterval& window)
{
    Observations obs;
    if (auto span = series.range().intersect(window)) {
        for (auto m = span->first; m <= span->last; m = m + 1) {
            if (auto v = series.at(m)) {
                obs.months.push_back(m);
                obs.u.push_back(year_fraction(m).value - 2000.0);
                obs.y.push_back(*v);
            }
        }
    }
    return obs;
}

inline TrendSegment fit_line(const Observations& obs, std::size_t begin, std::size_t end)
{
    const auto n = static_cast<double>(end - begin);
    double ubar = 0.0;
    double ybar = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        ubar += obs.u[i];
        ybar += obs.y[i];
    }
    ubar /= n;
    ybar /= n;
    double suu = 0.0;
    double suy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        suu += (obs.u[i] - ubar) * (obs.u[i] - ubar);
        suy += (obs.u[i] - ubar) * (obs.y[i] - ybar);
    }
    TrendSegment seg;
    seg.start = obs.months[begin];
    seg.end = obs.months[end - 1];
    seg.slope = suu > 0.0 ? suy / suu : 0.0;
    seg.intercept = ybar - seg.slope * ubar;
    seg.n_obs = end - begin;
    for (std::size_t i = begin; i < end; ++i) {
        const double r = obs.y[i] - seg.value_at(obs.u[i] + 2000.0);
        seg.sse += r * r;
    }
    return seg;
}

/// O(1) residual sum of squares of a straight-line fit over [i, j).
class SegmentCost {
public:
    explicit SegmentCost(const Observations& obs)
    {
        const std::size_t n = obs.y.size();
        long double um = 0;
        long double ym = 0;
        for (std::size_t i = 0; i < n; ++i) {
            um += obs.u[i];
            ym += obs.y[i];
        }
        um /= static_cast<long double>(n);
        ym /= static_cast<long double>(n);
        su_.assign(n + 1, 0);
        sy_ = suu_ = suy_ = syy_ = su_;
        for (std::size_t i = 0; i < n; ++i) {
            const long double u = obs.u[i] - um;
            const long double y = obs.y[i] - ym;
            su_[i + 1] = su_[i] + u;
            sy_[i + 1] = sy_[i] + y;
            suu_[i + 1] = suu_[i] + u * u;
            suy_[i + 1] = suy_[i] + u * y;
            syy_[i + 1] = syy_[i] + y * y;
        }
    }

    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        const auto m = static_cast<long double>(j - i);
        const long double su = su_[j] - su_[i];
        const long double sy = sy_[j] - sy_[i];
        const long double sxx = (suu_[j] - suu_[i]) - su * su / m;
        const long double sxy = (suy_[j] - suy_[i]) - su * sy / m;
        long double sse = (syy_[j] - syy_[i]) - sy * sy / m;
        if (sxx > 0) sse -= sxy * sxy / sxx;
        return sse > 0 ? static_cast<double>(sse) : 0.0;
    }

    /// Total sum of squares about the mean of all observations.
    double total() const noexcept { return static_cast<double>(syy_.back()); }

private:
    std::vector<long double> su_, sy_, suu_, suy_, syy_;
};

} // namespace detail

/// Least-squares line over the observed months of `window`, slope per year.
inline TrendSegment fit_segment(const MonthlySeries& series, const MonthInterval& window)
{
    const auto obs = detail::observed(series, window);
    if (obs.y.size() < min_segment_observations)
        throw Error(ErrorKind::InsufficientData, std::to_string(obs.y.size()) + " observations of '" + series.id() +
                                                     "' in " + window.to_string() + ", need " +
                                                     std::to_string(min_segment_observations));
    return detail::fit_line(obs, 0, obs.y.size());
}

/// Exact minimum-SSE piecewise linear segmentation with up to
/// `options.max_breaks` breaks. Among fits whose SSE is equal within a
/// relative 1e-10 of the total sum of squares, fewer breaks win, then the
/// lexicographically earliest breakpoint months.
inline TrendFit detect_breakpoints(const MonthlySeries& series, const SegmentationOptions& options = {})
{
    if (options.max_breaks < 0 || options.min_segment < 2 || options.gap_max < 0)
        throw Error(ErrorKind::InvalidArgument, "invalid segmentation options");
    const auto obs = detail::observed(series, series.range());
    const std::size_t n = obs.y.size();
    const auto max_breaks = static_cast<std::size_t>(options.max_breaks);
    const auto min_seg = static_cast<std::size_t>(options.min_segment);
    const auto gap_max = static_cast<std::size_t>(options.gap_max);
    if (n < (max_breaks + 1) * min_seg)
        throw Error(ErrorKind::InsufficientData,
                    std::to_string(n) + " observations of '" + series.id() + "' cannot hold " +
                        std::to_string(max_breaks + 1) + " segments of " + std::to_string(min_seg));

    const detail::SegmentCost cost(obs);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // best[k][i]: minimum SSE covering [i, n) with exactly k + 1 segments, the
    // first one starting at i.
    std::vector<std::vector<double>> best(max_breaks + 1, std::vector<double>(n + 1, inf));
    for (std::size_t i = 0; i + min_seg <= n; ++i) best[0][i] = cost(i, n);
    for (std::size_t k = 1; k <= max_breaks; ++k) {
        for (std::size_t i = 0; i + (k + 1) * min_seg <= n; ++i) {
            double b = inf;
            for (std::size_t e = i + min_seg; e + min_seg <= n; ++e) {
                const double head = cost(i, e);
                for (std::size_t g = 0; g <= gap_max && e + g + min_seg <= n; ++g)
                    b = std::min(b, head + best[k - 1][e + g]);
            }
            best[k][i] = b;
        }
    }

    double optimum = inf;
    for (std::size_t k = 0; k <= max_breaks; ++k) optimum = std::min(optimum, best[k][0]);
    const double tol = 1e-10 * cost.total() + 8 * std::numeric_limits<double>::epsilon() * optimum;
    std::size_t breaks = 0;
    while (best[breaks][0] > optimum + tol) ++breaks;

    // Earliest breakpoint set reaching the optimum for that break count.
    const double goal = best[breaks][0] + tol;
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    std::size_t begin = 0;
    double spent = 0.0;
    for (std::size_t k = breaks; k > 0; --k) {
        bool placed = false;
        for (std::size_t s = begin + min_seg; s + k * min_seg <= n && !placed; ++s) {
            for (std::size_t g = 0; g <= gap_max && !placed; ++g) {
                if (s < begin + min_seg + g) break;
                const std::size_t e = s - g;
                const double c = cost(begin, e);
                if (spent + c + best[k - 1][s] <= goal) {
                    bounds.emplace_back(begin, e);
                    spent += c;
                    begin = s;
                    placed = true;
                }
            }
        }
        if (!placed) throw Error(ErrorKind::InvalidArgument, "segmentation backtrack failed");
    }
    bounds.emplace_back(begin, n);

    TrendFit fit;
    for (const auto& [b, e] : bounds) {
        fit.segments.push_back(detail::fit_line(obs, b, e));
        fit.total_sse += fit.segments.back().sse;
    }
    for (std::size_t k = 1; k < fit.segments.size(); ++k) fit.breakpoints.push_back(fit.segments[k].start);
    return fit;
}

/// Next trend as the mirror image of `last`: slope negated, continuous with
/// `last` at `pivot`, spanning `horizon_months` months after the pivot.
inline TrendSegment mirror_forecast(const TrendSegment& last, MonthStamp pivot, int horizon_months)
{
    if (pivot < last.end)
        throw Error(ErrorKind::InvalidArgument, "pivot " + pivot.to_string() + " precedes segment end " +
                                                    last.end.to_string());
    if (horizon_months < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least one month");
    const double u = year_fraction(pivot).value - 2000.0;
    TrendSegment out;
    out.start = pivot;
    out.end = pivot + horizon_months;
    out.slope = -last.slope;
    out.intercept = last.value_at(pivot) - out.slope * u;
    return out;
}

} // namespace lagdex
