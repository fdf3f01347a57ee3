#pragma once

// Human-readable equations and tables, and plot-ready CSV.

#include "lagdex/ingest.hpp"
#include "lagdex/regress.hpp"
#include "lagdex/search.hpp"
#include "lagdex/signal.hpp"
#include "lagdex/trend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lagdex {

namespace detail {

inline std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

/// " + 1.2345" / " - 1.2345", or the bare signed number when leading.
inline std::string signed_term(double v, int decimals, bool leading)
{
    const auto s = fixed(v, decimals);
    if (leading) return s;
    return s.front() == '-' ? " - " + s.substr(1) : " + " + s;
}

inline std::string csv_value(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

} // namespace detail

inline std::string format_equation(const LagModel& m)
{
    std::string out = m.target_name + "(t) = ";
    out += detail::signed_term(m.terms[0].coefficient, 4, true) + lagged_name(m.terms[0].series_name, m.terms[0].lag);
    out += detail::signed_term(m.terms[1].coefficient, 4, false) + lagged_name(m.terms[1].series_name, m.terms[1].lag);
    out += detail::signed_term(m.trend_coeff, 4, false) + "(t-2000)";
    out += detail::signed_term(m.intercept, 3, false);
    out += "; sigma = $" + detail::fixed(m.stats.rms, 2) + " (rms), $" + detail::fixed(m.stats.stderr_dof, 2) +
           " (J-4), J = " + std::to_string(m.stats.n_obs);
    return out;
}

inline std::string format_equation(const SimpleDiffModel& m)
{
    std::string out = m.target_name + "(t) = ";
    out += detail::signed_term(m.slope, 4, true) + lagged_name(m.driver, m.lag);
    out += detail::signed_term(m.intercept, 3, false);
    out += "; sigma = $" + detail::fixed(m.stats.rms, 2) + " (rms), $" + detail::fixed(m.stats.stderr_dof, 2) +
           " (J-2), J = " + std::to_string(m.stats.n_obs);
    return out;
}

/// Fixed-width table; the first row is the header.
inline std::string format_table(const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        width.resize(std::max(width.size(), r.size()), 0);
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::ostringstream out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c > 0) line += "  ";
            line += std::string(width[c] - r[c].size(), ' ') + r[c];
        }
        out << line << '\n';
    }
    return out.str();
}

/// Month, CPI1, Lag1, b1, CPI2, Lag2, b2, c, d, then rms and the stability flag.
inline std::string format_ledger(const StabilityLedger& ledger)
{
    std::vector<std::vector<std::string>> rows{
        {"Month", "CPI1", "Lag1", "b1", "CPI2", "Lag2", "b2", "c", "d", "rms", "stable"}};
    for (const auto& r : ledger.rows) {
        if (!r.winner) {
            rows.push_back({r.end_month.to_string(), "-", "-", "-", "-", "-", "-", "-", "-", "-", "no"});
            continue;
        }
        const auto& w = *r.winner;
        rows.push_back({r.end_month.to_string(), w.key.name1, std::to_string(w.key.lag1), detail::fixed(w.b1, 4),
                        w.key.name2, std::to_string(w.key.lag2), detail::fixed(w.b2, 4),
                        detail::fixed(w.trend_coeff, 4), detail::fixed(w.intercept, 3), detail::fixed(w.rms, 3),
                        r.stable ? "yes" : "no"});
    }
    auto text = format_table(rows);
    text += std::string("stable over the last ") + std::to_string(ledger.depth) +
            " end months: " + (ledger.stable() ? "yes" : "no") + '\n';
    for (const auto& r : ledger.rows)
        if (!r.winner) text += r.end_month.to_string() + ": " + r.error + '\n';
    return text;
}

inline std::string format_comparison(const std::vector<NamedComparison>& rows, const std::string& target)
{
    std::ostringstream out;
    for (const auto& r : rows) {
        const auto& b = r.best;
        out << target << "(t) = " << detail::signed_term(b.b1, 3, true) << lagged_name(b.key.name1, b.key.lag1)
            << detail::signed_term(b.b2, 3, false) << lagged_name(b.key.name2, b.key.lag2)
            << detail::signed_term(b.trend_coeff, 2, false) << "(t-2000)" << detail::signed_term(b.intercept, 2, false)
            << "; sigma = $" << detail::fixed(b.rms, 2) << " (rms), $" << detail::fixed(b.stderr_dof, 2) << " (J-4)\n";
        out << "    reference lags " << lagged_name(r.reference.name1, r.reference.lag1) << ", "
            << lagged_name(r.reference.name2, r.reference.lag2) << " (quoted sigma $"
            << detail::fixed(r.reference.sigma, 2) << "): ";
        if (r.at_reference)
            out << "rms $" << detail::fixed(r.at_reference->rms, 2) << ", $" << detail::fixed(r.at_reference->stderr_dof, 2)
                << " (J-4)\n";
        else
            out << r.reference_error << '\n';
    }
    return out.str();
}

inline void write_ranking_csv(std::ostream& out, const SearchResult& r)
{
    out << "rank,series1,lag1,series2,lag2,b1,b2,c,d,rms,stderr_dof,n_obs\n";
    std::size_t rank = 0;
    for (const auto& e : r.ranking)
        out << ++rank << ',' << e.key.name1 << ',' << e.key.lag1 << ',' << e.key.name2 << ',' << e.key.lag2 << ','
            << format_double(e.b1) << ',' << format_double(e.b2) << ',' << format_double(e.trend_coeff) << ','
            << format_double(e.intercept) << ',' << format_double(e.rms) << ',' << format_double(e.stderr_dof) << ','
            << e.n_obs << '\n';
}

inline void write_episodes_csv(std::ostream& out, const std::vector<DeviationEpisode>& episodes)
{
    out << "start,end,sign,peak_deviation,resolved\n";
    for (const auto& e : episodes)
        out << e.start.to_string() << ',' << e.end.to_string() << ',' << e.sign << ','
            << format_double(e.peak_deviation) << ',' << (e.resolved ? "true" : "false") << '\n';
}

/// month, observed, predicted, residual over the span of `observed`.
inline void write_fit_csv(std::ostream& out, const MonthlySeries& observed, const MonthlySeries& predicted)
{
    out << "month,observed,predicted,residual\n";
    for (auto m = observed.start(); m <= observed.end(); m = m + 1) {
        const auto o = observed.at(m);
        const auto p = predicted.at(m);
        out << m.to_string() << ',' << detail::csv_value(o) << ',' << detail::csv_value(p) << ','
            << detail::csv_value(o && p ? std::optional(*o - *p) : std::nullopt) << '\n';
    }
}

/// month, value, fitted, segment_id. Months in no segment have an empty
/// fitted value and segment id; forecast rows follow with an empty value.
inline void write_trend_csv(std::ostream& out, const MonthlySeries& series, const TrendFit& fit,
                            const std::optional<TrendSegment>& forecast = std::nullopt)
{
    out << "month,value,fitted,segment_id\n";
    for (auto m = series.start(); m <= series.end(); m = m + 1) {
        out << m.to_string() << ',' << detail::csv_value(series.at(m)) << ',';
        std::size_t id = 0;
        for (; id < fit.segments.size(); ++id)
            if (fit.segments[id].start <= m && m <= fit.segments[id].end) break;
        if (id < fit.segments.size())
            out << format_double(fit.segments[id].value_at(m)) << ',' << id;
        else
            out << ',';
        out << '\n';
    }
    if (forecast)
        for (auto m = std::max(forecast->start, series.end() + 1); m <= forecast->end; m = m + 1)
            out << m.to_string() << ",," << format_double(forecast->value_at(m)) << ',' << fit.segments.size() << '\n';
}

} // namespace lagdex
