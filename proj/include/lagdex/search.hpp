#pragma once

#include "lagdex/error.hpp"
#include "lagdex/parallel.hpp"
#include "lagdex/regress.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace lagdex {

inline constexpr int max_search_lag = 13;
inline constexpr int default_stability_depth = 8;
/// Best-model rms values closer than this (relative) are ties.
inline constexpr double rms_tie_tolerance = 1e-12;
/// Absolute tie floor, as a fraction of the target's root mean square level.
inline constexpr double rms_tie_floor = 1e-12;

struct SearchSpec {
    std::vector<std::string> candidates;
    int lag_min = 0;
    int lag_max = max_search_lag;
    MonthInterval window;
    /// Optional; when set it must match the registry's target name.
    std::string target;
};

struct SearchOptions {
    unsigned workers = 1;
    FitOptions fit;
};

/// A (pair, lags) combination. Names are in lexicographic order and each lag
/// travels with its name.
struct ModelKey {
    std::string name1;
    std::string name2;
    int lag1 = 0;
    int lag2 = 0;

    auto tie() const { return std::tie(name1, name2, lag1, lag2); }
    bool operator==(const ModelKey& o) const { return tie() == o.tie(); }
    bool operator<(const ModelKey& o) const { return tie() < o.tie(); }
};

struct RankingEntry {
    ModelKey key;
    double rms = 0.0;
    double stderr_dof = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double trend_coeff = 0.0;
    double intercept = 0.0;
    std::size_t n_obs = 0;
};

struct SkippedModel {
    ModelKey key;
    ErrorKind reason;
    std::string message;
};

struct SearchResult {
    LagModel best;
    /// ranking.front() is the best model; the rest ascend by rms, then key.
    std::vector<RankingEntry> ranking;
    std::size_t grid_size = 0;
    std::size_t evaluated_count = 0;
    std::vector<SkippedModel> skipped;
};

inline RankingEntry summarize(const LagModel& m)
{
    return RankingEntry{ModelKey{m.terms[0].series_name, m.terms[1].series_name, m.terms[0].lag, m.terms[1].lag},
                        m.stats.rms,
                        m.stats.stderr_dof,
                        m.terms[0].coefficient,
                        m.terms[1].coefficient,
                        m.trend_coeff,
                        m.intercept,
                        m.stats.n_obs};
}

/// Fits one combination against the registry target.
inline LagModel fit_key(const SeriesRegistry& registry, const ModelKey& key, const MonthInterval& window,
                        const FitOptions& options = {})
{
    auto model = fit_lag_model(registry.target(), LagInput{key.name1, registry.get(key.name1), key.lag1},
                               LagInput{key.name2, registry.get(key.name2), key.lag2}, window, options);
    model.target_name = registry.target_name();
    return model;
}

/// Orders a ranking: ascending rms, ties by key; then the best entry (smallest
/// key among those within rms * (1 + rms_tie_tolerance) + floor of the
/// minimum) first.
inline void order_ranking(std::vector<RankingEntry>& ranking, double floor = 0.0)
{
    std::sort(ranking.begin(), ranking.end(), [](const RankingEntry& a, const RankingEntry& b) {
        if (a.rms != b.rms) return a.rms < b.rms;
        return a.key < b.key;
    });
    if (ranking.empty()) return;
    const double bound = ranking.front().rms * (1.0 + rms_tie_tolerance) + floor;
    auto best = ranking.begin();
    for (auto it = ranking.begin(); it != ranking.end() && it->rms <= bound; ++it)
        if (it->key < best->key) best = it;
    std::rotate(ranking.begin(), best, best + 1);
}

namespace detail {

/// rms_tie_floor times the root mean square of the target over `window`.
inline double tie_floor(const MonthlySeries& target, const MonthInterval& window)
{
    double sum = 0.0;
    std::size_t n = 0;
    if (auto span = target.range().intersect(window))
        for (auto m = span->first; m <= span->last; m = m + 1)
            if (auto v = target.at(m)) {
                sum += *v * *v;
                ++n;
            }
    return n ? rms_tie_floor * std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

inline void validate(const SearchSpec& spec, const SeriesRegistry& registry)
{
    if (spec.candidates.size() < 2) throw Error(ErrorKind::Config, "search needs at least two candidates");
    if (std::set<std::string>(spec.candidates.begin(), spec.candidates.end()).size() != spec.candidates.size())
        throw Error(ErrorKind::Config, "duplicate candidate in search spec");
    if (spec.lag_min > spec.lag_max || spec.lag_min < -max_search_lag || spec.lag_max > max_search_lag)
        throw Error(ErrorKind::Config, "lag grid " + std::to_string(spec.lag_min) + ".." +
                                           std::to_string(spec.lag_max) + " outside [-13, 13]");
    if (!spec.target.empty() && spec.target != registry.target_name())
        throw Error(ErrorKind::UnknownSeries, "registry target is '" + registry.target_name() + "', not '" +
                                                  spec.target + "'");
    registry.target();
    for (const auto& name : spec.candidates) registry.get(name);
}

} // namespace detail

/// Every unordered candidate pair and every lag pair of the grid, fitted by
/// least squares. Returns the global minimum-rms model.
inline SearchResult search(const SearchSpec& spec, const SeriesRegistry& registry, const SearchOptions& options = {})
{
    detail::validate(spec, registry);
    auto names = spec.candidates;
    std::sort(names.begin(), names.end());

    const auto lags = static_cast<std::size_t>(spec.lag_max - spec.lag_min + 1);
    std::vector<ModelKey> keys;
    keys.reserve(names.size() * (names.size() - 1) / 2 * lags * lags);
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            for (int l1 = spec.lag_min; l1 <= spec.lag_max; ++l1)
                for (int l2 = spec.lag_min; l2 <= spec.lag_max; ++l2) keys.push_back({names[i], names[j], l1, l2});

    std::vector<std::optional<RankingEntry>> fitted(keys.size());
    std::vector<std::optional<SkippedModel>> failed(keys.size());
    detail::parallel_for(keys.size(), options.workers, [&](std::size_t i) {
        try {
            fitted[i] = summarize(fit_key(registry, keys[i], spec.window, options.fit));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RankDeficient && e.kind() != ErrorKind::InsufficientData) throw;
            failed[i] = SkippedModel{keys[i], e.kind(), e.what()};
        }
    });

    std::vector<RankingEntry> ranking;
    std::vector<SkippedModel> skipped;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (fitted[i])
            ranking.push_back(std::move(*fitted[i]));
        else
            skipped.push_back(std::move(*failed[i]));
    }
    if (ranking.empty())
        throw Error(ErrorKind::NoFeasibleModel, "all " + std::to_string(keys.size()) + " combinations in " +
                                                    spec.window.to_string() + " were rank deficient or too short");
    order_ranking(ranking, detail::tie_floor(registry.target(), spec.window));
    auto best = fit_key(registry, ranking.front().key, spec.window, options.fit);
    const auto evaluated = ranking.size();
    SearchResult result{std::move(best), std::move(ranking), keys.size(), evaluated, std::move(skipped)};
    return result;
}

struct LedgerRow {
    MonthStamp end_month;
    std::optional<RankingEntry> winner;
    std::string error; ///< set when the search for this month failed
    /// Winner (pair and lags) identical over this row and the depth - 1
    /// preceding end months.
    bool stable = false;
};

struct StabilityLedger {
    int depth = default_stability_depth;
    std::vector<LedgerRow> rows; ///< descending end month

    /// The most recent winner has held for `depth` consecutive end months.
    bool stable() const noexcept { return !rows.empty() && rows.front().stable; }
};

inline void mark_stability(StabilityLedger& ledger)
{
    const auto depth = static_cast<std::size_t>(std::max(1, ledger.depth));
    auto& rows = ledger.rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r].stable = false;
        if (!rows[r].winner || r + depth > rows.size()) continue;
        bool same = true;
        for (std::size_t k = r + 1; k < r + depth && same; ++k)
            same = rows[k].winner && rows[k].winner->key == rows[r].winner->key;
        rows[r].stable = same;
    }
}

/// Runs the search once per end month on the window truncated at that month.
inline StabilityLedger stability_scan(const SearchSpec& spec, const SeriesRegistry& registry,
                                      std::vector<MonthStamp> end_months, int depth = default_stability_depth,
                                      const SearchOptions& options = {})
{
    if (depth < 1) throw Error(ErrorKind::Config, "stability depth must be at least 1");
    detail::validate(spec, registry);
    std::sort(end_months.begin(), end_months.end());
    end_months.erase(std::unique(end_months.begin(), end_months.end()), end_months.end());
    std::reverse(end_months.begin(), end_months.end());

    StabilityLedger ledger;
    ledger.depth = depth;
    ledger.rows.resize(end_months.size());
    SearchOptions inner = options;
    inner.workers = 1;
    detail::parallel_for(end_months.size(), options.workers, [&](std::size_t i) {
        auto& row = ledger.rows[i];
        row.end_month = end_months[i];
        SearchSpec truncated = spec;
        truncated.window.last = end_months[i];
        try {
            if (truncated.window.last < truncated.window.first)
                throw Error(ErrorKind::InsufficientData, "end month precedes window start");
            row.winner = search(truncated, registry, inner).ranking.front();
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    mark_stability(ledger);
    return ledger;
}

/// A fixed benchmark pair with the lags and standard error quoted for it.
struct ReferencePair {
    std::string name1;
    std::string name2;
    int lag1 = 0;
    int lag2 = 0;
    double sigma = 0.0;
};

/// (C, CC), (CC, E) and (OIL, PPI) with their quoted lags and sigmas.
inline std::vector<ReferencePair> default_reference_pairs()
{
    return {{"C", "CC", 0, 12, 6.21}, {"CC", "E", 12, 0, 5.98}, {"OIL", "PPI", 2, 0, 6.35}};
}

struct NamedComparison {
    ReferencePair reference;
    RankingEntry best;                           ///< optimum over the lag grid
    std::optional<RankingEntry> at_reference;    ///< refit at the quoted lags
    std::string reference_error;                 ///< why the quoted-lag fit failed
};

/// Fits each reference pair over its best lag combination within the grid
/// and, alongside, at its quoted lags.
inline std::vector<NamedComparison> compare_named_models(const SeriesRegistry& registry, const MonthInterval& window,
                                                         int lag_min = 0, int lag_max = max_search_lag,
                                                         const SearchOptions& options = {},
                                                         std::vector<ReferencePair> pairs = default_reference_pairs())
{
    for (const auto& p : pairs) {
        registry.get(p.name1);
        registry.get(p.name2);
    }
    std::vector<NamedComparison> out;
    for (auto& p : pairs) {
        if (p.name2 < p.name1) {
            std::swap(p.name1, p.name2);
            std::swap(p.lag1, p.lag2);
        }
        SearchSpec spec{{p.name1, p.name2}, lag_min, lag_max, window, {}};
        NamedComparison row{p, search(spec, registry, options).ranking.front(), std::nullopt, {}};
        try {
            row.at_reference = summarize(fit_key(registry, {p.name1, p.name2, p.lag1, p.lag2}, window, options.fit));
        } catch (const Error& e) {
            row.reference_error = e.what();
        }
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace lagdex
