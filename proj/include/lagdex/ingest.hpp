#pragma once

#include "lagdex/error.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/regress.hpp"
#include "lagdex/series.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lagdex {

// ---------------------------------------------------------------------------
// CSV: one observation per row, `series_id,YYYY-MM,value`. A header row is
// optional. An empty value (or NA, ".", "-") is an explicit missing month.
// ---------------------------------------------------------------------------

/// Shortest text that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool is_missing_token(std::string_view v) noexcept
{
    return v.empty() || v == "NA" || v == "." || v == "-";
}

inline std::optional<double> parse_double(std::string_view v) noexcept
{
    double out = 0.0;
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) return std::nullopt;
    return out;
}

/// Accumulates (month, value) observations and rejects conflicting
/// duplicates.
class ObservationSet {
public:
    explicit ObservationSet(std::string source) : source_(std::move(source)) {}

    void add(MonthStamp m, std::optional<double> v, std::size_t line)
    {
        auto [it, inserted] = values_.emplace(m, v);
        if (!inserted && it->second != v)
            throw Error(ErrorKind::DuplicateMonth, source_ + ":" + std::to_string(line) + ": month " + m.to_string() +
                                                       " appears twice with different values");
    }

    MonthlySeries build(const std::string& id) const
    {
        if (values_.empty()) throw Error(ErrorKind::EmptySeries, source_ + ": no observations");
        const auto first = values_.begin()->first;
        const auto last = values_.rbegin()->first;
        std::vector<MonthlySeries::value_type> out(static_cast<std::size_t>(last - first + 1));
        for (const auto& [m, v] : values_) out[static_cast<std::size_t>(m - first)] = v;
        return MonthlySeries(id, first, std::move(out));
    }

private:
    std::string source_;
    std::map<MonthStamp, std::optional<double>> values_;
};

} // namespace detail

/// Parses CSV text. When `series_id` is given, rows of other series are
/// ignored; otherwise every row must carry the same id.
inline MonthlySeries parse_csv(std::string_view text, const std::string& source = "<csv>",
                               const std::optional<std::string>& series_id = std::nullopt)
{
    detail::ObservationSet obs(source);
    std::optional<std::string> id = series_id;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string_view> fields;
        for (std::string_view rest = line;;) {
            const auto comma = rest.find(',');
            fields.push_back(detail::trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        const bool first_content = !seen_content;
        seen_content = true;
        if (fields.size() != 3) {
            if (first_content) continue; // header of another shape
            throw ParseError(source, line_no, "expected 3 fields (series_id,YYYY-MM,value), got " +
                                                  std::to_string(fields.size()));
        }
        const auto month = MonthStamp::try_parse(fields[1]);
        if (!month) {
            if (first_content) continue; // header
            throw ParseError(source, line_no, "bad month '" + std::string(fields[1]) + "'");
        }
        if (fields[0].empty()) throw ParseError(source, line_no, "empty series id");
        if (!id) {
            id = std::string(fields[0]);
        } else if (fields[0] != *id) {
            if (series_id) continue;
            throw ParseError(source, line_no, "series id '" + std::string(fields[0]) + "' differs from '" + *id + "'");
        }
        std::optional<double> value;
        if (!detail::is_missing_token(fields[2])) {
            value = detail::parse_double(fields[2]);
            if (!value) throw ParseError(source, line_no, "bad value '" + std::string(fields[2]) + "'");
        }
        obs.add(*month, value, line_no);
    }
    return obs.build(id.value_or(source));
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline MonthlySeries load_csv(const std::filesystem::path& path,
                              const std::optional<std::string>& series_id = std::nullopt)
{
    return parse_csv(read_file(path), path.string(), series_id);
}

/// Writes every month of the series, gaps as empty values, with a header.
inline void write_csv(std::ostream& out, const MonthlySeries& series)
{
    out << "series_id,month,value\n";
    for (auto m = series.start(); m <= series.end(); m = m + 1) {
        out << series.id() << ',' << m.to_string() << ',';
        if (auto v = series.at(m)) out << format_double(*v);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Source configuration (JSON, versioned by `config_version`).
// ---------------------------------------------------------------------------

inline constexpr int current_config_version = 1;

struct SourceSpec {
    std::string name;
    IndexFamily family = IndexFamily::Other;
    std::filesystem::path path; ///< local CSV, resolved against the config directory
    std::string series_id;      ///< id filter for the CSV, or the remote series id
    bool remote = false;
};

struct SourceConfig {
    int config_version = current_config_version;
    SourceSpec target;
    std::vector<SourceSpec> candidates;
    std::string endpoint;
    std::string api_key;
    MonthInterval window;
    int lag_min = 0;
    int lag_max = default_max_abs_lag;
    int stability_depth = 8;
    int dimension = 2;
    double condition_limit = default_condition_limit;
    double signal_enter = 2.0;
    double signal_exit = 1.0;
    int trend_max_breaks = 2;
    int trend_min_segment = 36;
    int trend_gap_max = 0;

    std::vector<std::string> candidate_names() const
    {
        std::vector<std::string> out;
        for (const auto& c : candidates) out.push_back(c.name);
        return out;
    }
};

inline void validate(const SourceConfig& c)
{
    auto fail = [](const std::string& what) { throw Error(ErrorKind::Config, what); };
    if (c.config_version != current_config_version)
        fail("unsupported config_version " + std::to_string(c.config_version));
    if (c.lag_min < -default_max_abs_lag || c.lag_max > default_max_abs_lag || c.lag_min > c.lag_max)
        fail("lag bounds must satisfy -13 <= min <= max <= 13");
    if (!(c.window.first < c.window.last)) fail("window start must precede its end");
    if (c.stability_depth < 1) fail("stability_depth must be at least 1");
    if (c.dimension != 2) fail("dimension is fixed at 2");
    if (c.target.name.empty()) fail("target name is missing");
    std::set<std::string> names{c.target.name};
    for (const auto& s : c.candidates)
        if (!names.insert(s.name).second) fail("duplicate candidate name '" + s.name + "'");
    for (const auto& s : c.candidates) {
        if (s.name.empty()) fail("candidate without a name");
        if (s.remote ? s.series_id.empty() : s.path.empty())
            fail("candidate '" + s.name + "' needs " + (s.remote ? "a remote series id" : "a path"));
    }
    if (!(c.signal_enter > c.signal_exit && c.signal_exit >= 0.0)) fail("signal thresholds need enter > exit >= 0");
    if (c.trend_max_breaks < 0 || c.trend_min_segment < 2 || c.trend_gap_max < 0) fail("invalid trend settings");
}

namespace detail {

inline SourceSpec source_from_json(const nlohmann::json& j, const std::filesystem::path& base)
{
    SourceSpec s;
    s.name = j.at("name").get<std::string>();
    s.family = parse_family(j.value("family", std::string("other")));
    if (j.contains("remote")) {
        s.remote = true;
        s.series_id = j.at("remote").get<std::string>();
    } else {
        auto p = std::filesystem::path(j.at("path").get<std::string>());
        s.path = p.is_absolute() ? p : base / p;
        s.series_id = j.value("series_id", std::string());
    }
    return s;
}

} // namespace detail

/// Parses a configuration document; relative paths resolve against `base_dir`.
inline SourceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".")
{
    SourceConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        c.config_version = j.at("config_version").get<int>();
        c.target = detail::source_from_json(j.at("target"), base_dir);
        for (const auto& e : j.at("candidates")) c.candidates.push_back(detail::source_from_json(e, base_dir));
        if (j.contains("remote")) {
            c.endpoint = j["remote"].value("endpoint", std::string());
            c.api_key = j["remote"].value("api_key", std::string());
        }
        c.window = MonthInterval::parse(j.at("window").get<std::string>());
        if (j.contains("lags")) {
            c.lag_min = j["lags"].value("min", c.lag_min);
            c.lag_max = j["lags"].value("max", c.lag_max);
        }
        c.stability_depth = j.value("stability_depth", c.stability_depth);
        c.dimension = j.value("dimension", c.dimension);
        c.condition_limit = j.value("condition_limit", c.condition_limit);
        if (j.contains("signal")) {
            c.signal_enter = j["signal"].value("enter", c.signal_enter);
            c.signal_exit = j["signal"].value("exit", c.signal_exit);
        }
        if (j.contains("trend")) {
            c.trend_max_breaks = j["trend"].value("max_breaks", c.trend_max_breaks);
            c.trend_min_segment = j["trend"].value("min_segment", c.trend_min_segment);
            c.trend_gap_max = j["trend"].value("gap_max", c.trend_gap_max);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed configuration: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        throw Error(ErrorKind::Config, e.what());
    }
    validate(c);
    return c;
}

inline SourceConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

/// Fetches one remote series: (series id, month range, endpoint, api key).
using RemoteFetcher =
    std::function<MonthlySeries(const std::string&, const MonthInterval&, const std::string&, const std::string&)>;

/// Loads every configured source. Load failures are collected and reported
/// together; a candidate observed jointly with the target on fewer than
/// parameters + 12 months of the window is rejected by name.
inline SeriesRegistry build_registry(const SourceConfig& config, const RemoteFetcher& fetch = {})
{
    validate(config);
    std::vector<std::string> failures;
    auto load = [&](const SourceSpec& s) -> std::optional<MonthlySeries> {
        try {
            if (s.remote) {
                if (!fetch) throw Error(ErrorKind::Config, "remote source but no fetcher available");
                if (config.endpoint.empty()) throw Error(ErrorKind::Config, "remote source but no endpoint configured");
                return fetch(s.series_id, config.window, config.endpoint, config.api_key);
            }
            return load_csv(s.path, s.series_id.empty() ? std::nullopt : std::optional<std::string>(s.series_id));
        } catch (const Error& e) {
            failures.push_back(s.name + ": " + e.what());
            return std::nullopt;
        }
    };

    auto target = load(config.target);
    std::vector<std::pair<const SourceSpec*, MonthlySeries>> loaded;
    for (const auto& s : config.candidates)
        if (auto series = load(s)) loaded.emplace_back(&s, std::move(*series));
    if (!failures.empty()) throw SourceLoadError(std::move(failures));

    SeriesRegistry registry;
    registry.set_target(config.target.name, std::move(*target));
    const auto& price = registry.target();
    const std::size_t needed = lag_model_parameters + min_extra_observations;
    std::vector<std::string> short_overlap;
    for (auto& [spec, series] : loaded) {
        std::size_t overlap = 0;
        for (auto m = config.window.first; m <= config.window.last; m = m + 1)
            if (price.at(m) && series.at(m)) ++overlap;
        if (overlap < needed) {
            short_overlap.push_back(spec->name + " (" + std::to_string(overlap) + " months)");
            continue;
        }
        registry.add(spec->name, std::move(series), spec->family);
    }
    if (!short_overlap.empty()) {
        std::string msg = "fewer than " + std::to_string(needed) + " months overlapping the target in " +
                          config.window.to_string() + ":";
        for (const auto& s : short_overlap) msg += " " + s;
        throw Error(ErrorKind::InsufficientOverlap, msg);
    }
    return registry;
}

} // namespace lagdex
