#pragma once

// JSON documents for models, trend fits, search results, ledgers and
// episodes. Every document carries "schema" and "schema_version".

#include "lagdex/error.hpp"
#include "lagdex/regress.hpp"
#include "lagdex/search.hpp"
#include "lagdex/series.hpp"
#include "lagdex/signal.hpp"
#include "lagdex/trend.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>

namespace lagdex {

inline constexpr int schema_version = 1;

using json = nlohmann::json;

inline json to_json(const MonthlySeries& s)
{
    json values = json::array();
    for (const auto& v : s.values()) values.push_back(v ? json(*v) : json(nullptr));
    return json{{"id", s.id()}, {"start", s.start().to_string()}, {"values", std::move(values)}};
}

inline MonthlySeries series_from_json(const json& j)
{
    std::vector<MonthlySeries::value_type> values;
    for (const auto& v : j.at("values")) values.push_back(v.is_null() ? std::nullopt : std::optional(v.get<double>()));
    return MonthlySeries(j.at("id").get<std::string>(), MonthStamp::parse(j.at("start").get<std::string>()),
                         std::move(values));
}

namespace detail {

inline void put_stats(json& j, const FitStatistics& s)
{
    j["window"] = s.window.to_string();
    j["n_obs"] = s.n_obs;
    j["rms"] = s.rms;
    j["stderr_dof"] = s.stderr_dof;
    j["condition"] = s.condition;
    j["residuals"] = to_json(s.residuals);
}

inline FitStatistics get_stats(const json& j)
{
    return FitStatistics{MonthInterval::parse(j.at("window").get<std::string>()), series_from_json(j.at("residuals")),
                         j.at("rms").get<double>(), j.at("stderr_dof").get<double>(),
                         j.at("n_obs").get<std::size_t>(), j.at("condition").get<double>()};
}

} // namespace detail

inline json to_json(const LagModel& m)
{
    json j{{"schema", "lagdex.lag_model"},
           {"schema_version", schema_version},
           {"target", m.target_name},
           {"terms", json::array()},
           {"trend_coeff", m.trend_coeff},
           {"intercept", m.intercept}};
    for (const auto& t : m.terms)
        j["terms"].push_back({{"series", t.series_name}, {"lag", t.lag}, {"coefficient", t.coefficient}});
    detail::put_stats(j, m.stats);
    return j;
}

inline json to_json(const SimpleDiffModel& m)
{
    json j{{"schema", "lagdex.simple_diff_model"},
           {"schema_version", schema_version},
           {"target", m.target_name},
           {"driver", m.driver},
           {"minuend", m.minuend},
           {"subtrahend", m.subtrahend},
           {"lag", m.lag},
           {"slope", m.slope},
           {"intercept", m.intercept}};
    detail::put_stats(j, m.stats);
    return j;
}

using AnyModel = std::variant<LagModel, SimpleDiffModel>;

inline AnyModel model_from_json(const json& j)
{
    try {
        if (j.at("schema_version").get<int>() != schema_version)
            throw Error(ErrorKind::Config, "unsupported model schema_version");
        const auto schema = j.at("schema").get<std::string>();
        if (schema == "lagdex.lag_model") {
            const auto& t = j.at("terms");
            if (t.size() != 2) throw Error(ErrorKind::Config, "lag model needs exactly two terms");
            LagModel m{j.at("target").get<std::string>(),
                       {LagTerm{t[0].at("series").get<std::string>(), t[0].at("lag").get<int>(),
                                t[0].at("coefficient").get<double>()},
                        LagTerm{t[1].at("series").get<std::string>(), t[1].at("lag").get<int>(),
                                t[1].at("coefficient").get<double>()}},
                       j.at("trend_coeff").get<double>(),
                       j.at("intercept").get<double>(),
                       detail::get_stats(j)};
            return m;
        }
        if (schema == "lagdex.simple_diff_model") {
            SimpleDiffModel m{j.at("target").get<std::string>(),  j.at("driver").get<std::string>(),
                              j.value("minuend", std::string()),  j.value("subtrahend", std::string()),
                              j.at("slope").get<double>(),        j.at("intercept").get<double>(),
                              j.at("lag").get<int>(),             detail::get_stats(j)};
            return m;
        }
        throw Error(ErrorKind::Config, "unknown model schema '" + schema + "'");
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed model document: ") + e.what());
    }
}

inline json to_json(const TrendSegment& s)
{
    return json{{"start", s.start.to_string()}, {"end", s.end.to_string()}, {"intercept_at_2000", s.intercept},
                {"slope_per_year", s.slope},    {"sse", s.sse},               {"n_obs", s.n_obs}};
}

inline json to_json(const TrendFit& f)
{
    json j{{"schema", "lagdex.trend_fit"}, {"schema_version", schema_version}, {"total_sse", f.total_sse}};
    j["segments"] = json::array();
    for (const auto& s : f.segments) j["segments"].push_back(to_json(s));
    j["breakpoints"] = json::array();
    for (const auto& b : f.breakpoints) j["breakpoints"].push_back(b.to_string());
    return j;
}

inline json to_json(const ModelKey& k)
{
    return json{{"series1", k.name1}, {"lag1", k.lag1}, {"series2", k.name2}, {"lag2", k.lag2}};
}

inline json to_json(const RankingEntry& e)
{
    auto j = to_json(e.key);
    j["b1"] = e.b1;
    j["b2"] = e.b2;
    j["c"] = e.trend_coeff;
    j["d"] = e.intercept;
    j["rms"] = e.rms;
    j["stderr_dof"] = e.stderr_dof;
    j["n_obs"] = e.n_obs;
    return j;
}

/// Summary document; the full ranking goes to CSV.
inline json to_json(const SearchResult& r, std::size_t top = 20)
{
    json j{{"schema", "lagdex.search_result"},
           {"schema_version", schema_version},
           {"best", to_json(r.best)},
           {"grid_size", r.grid_size},
           {"evaluated_count", r.evaluated_count},
           {"skipped_count", r.skipped.size()}};
    j["top"] = json::array();
    for (std::size_t i = 0; i < r.ranking.size() && i < top; ++i) j["top"].push_back(to_json(r.ranking[i]));
    j["skipped"] = json::array();
    for (const auto& s : r.skipped) {
        auto e = to_json(s.key);
        e["reason"] = std::string(to_string(s.reason));
        j["skipped"].push_back(std::move(e));
    }
    return j;
}

inline json to_json(const StabilityLedger& l)
{
    json j{{"schema", "lagdex.stability_ledger"},
           {"schema_version", schema_version},
           {"depth", l.depth},
           {"stable", l.stable()}};
    j["rows"] = json::array();
    for (const auto& r : l.rows) {
        json row{{"end_month", r.end_month.to_string()}, {"stable", r.stable}};
        if (r.winner)
            row["winner"] = to_json(*r.winner);
        else
            row["error"] = r.error;
        j["rows"].push_back(std::move(row));
    }
    return j;
}

inline json to_json(const DeviationEpisode& e)
{
    return json{{"start", e.start.to_string()},
                {"end", e.end.to_string()},
                {"sign", e.sign},
                {"peak_deviation", e.peak_deviation},
                {"resolved", e.resolved}};
}

inline json to_json(const std::vector<DeviationEpisode>& episodes)
{
    json j{{"schema", "lagdex.episodes"}, {"schema_version", schema_version}, {"episodes", json::array()}};
    for (const auto& e : episodes) j["episodes"].push_back(to_json(e));
    if (auto rate = resolution_rate(episodes))
        j["resolution_rate"] = *rate;
    else
        j["resolution_rate"] = nullptr;
    return j;
}

} // namespace lagdex
