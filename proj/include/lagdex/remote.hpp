#pragma once

// Client for a BLS-style time series service. Requires cpp-httplib; define
// CPPHTTPLIB_OPENSSL_SUPPORT before including to reach https endpoints.

#include "lagdex/error.hpp"
#include "lagdex/ingest.hpp"
#include "lagdex/series.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace lagdex {

inline constexpr const char* api_key_env = "LAGDEX_API_KEY";

namespace detail {

inline double json_number(const nlohmann::json& v, const char* field)
{
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        if (auto d = parse_double(trim(v.get_ref<const std::string&>()))) return *d;
    }
    throw Error(ErrorKind::Schema, std::string("field '") + field + "' is not numeric");
}

} // namespace detail

/// Maps a response body to a series. Accepts the BLS v2 layout
/// (Results.series[].data[]) or a flat {"data": [...]} / {"records": [...]}
/// list of {seriesID?, year, period "Mnn", value}. Annual averages (M13)
/// and records outside `range` are dropped.
inline MonthlySeries parse_remote_response(std::string_view body, const std::string& series_id,
                                           const MonthInterval& range)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Schema, std::string("response is not JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::Schema, "response is not a JSON object");
    if (doc.contains("status") && doc["status"].is_string() && doc["status"] != "REQUEST_SUCCEEDED") {
        std::string msg = "service reported status " + doc["status"].get<std::string>();
        if (doc.contains("message")) msg += ": " + doc["message"].dump();
        throw Error(ErrorKind::Schema, msg);
    }

    const nlohmann::json* records = nullptr;
    if (doc.contains("Results")) {
        const auto& results = doc["Results"];
        if (!results.is_object() || !results.contains("series") || !results["series"].is_array())
            throw Error(ErrorKind::Schema, "Results.series is not an array");
        const auto& series = results["series"];
        for (const auto& s : series) {
            if (!s.is_object() || !s.contains("data")) throw Error(ErrorKind::Schema, "series entry without data");
            if (!s.contains("seriesID") || s["seriesID"] == series_id) {
                records = &s["data"];
                break;
            }
        }
        if (!records) throw Error(ErrorKind::Schema, "response has no series '" + series_id + "'");
    } else if (doc.contains("data")) {
        records = &doc["data"];
    } else if (doc.contains("records")) {
        records = &doc["records"];
    } else {
        throw Error(ErrorKind::Schema, "response has neither Results, data nor records");
    }
    if (!records->is_array()) throw Error(ErrorKind::Schema, "record list is not an array");

    detail::ObservationSet obs("remote:" + series_id);
    std::size_t index = 0;
    for (const auto& r : *records) {
        ++index;
        if (!r.is_object() || !r.contains("year") || !r.contains("period") || !r.contains("value"))
            throw Error(ErrorKind::Schema, "record " + std::to_string(index) + " lacks year/period/value");
        if (r.contains("seriesID") && r["seriesID"] != series_id) continue;
        const auto& period = r["period"];
        if (!period.is_string()) throw Error(ErrorKind::Schema, "record " + std::to_string(index) + " period is not a string");
        const auto& p = period.get_ref<const std::string&>();
        int month = 0;
        if (p.size() != 3 || p[0] != 'M' || std::from_chars(p.data() + 1, p.data() + 3, month).ec != std::errc{} ||
            month < 1 || month > 13)
            throw Error(ErrorKind::Schema, "record " + std::to_string(index) + " has period '" + p + "'");
        if (month == 13) continue;
        const auto year = static_cast<int>(detail::json_number(r["year"], "year"));
        const MonthStamp m(year, month);
        if (!range.contains(m)) continue;
        obs.add(m, detail::json_number(r["value"], "value"), index);
    }
    return obs.build(series_id);
}

/// POSTs a BLS v2 style request for `series_id` over `range` to `endpoint`
/// and parses the reply. An empty `api_key` falls back to $LAGDEX_API_KEY.
inline MonthlySeries fetch_remote(const std::string& series_id, const MonthInterval& range,
                                  const std::string& endpoint, std::string api_key = {})
{
    if (series_id.empty()) throw Error(ErrorKind::InvalidArgument, "empty series id");
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorKind::Config, "endpoint '" + endpoint + "' has no scheme");
    const auto path_start = endpoint.find('/', scheme_end + 3);
    const std::string origin = endpoint.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

    if (api_key.empty())
        if (const char* env = std::getenv(api_key_env)) api_key = env;

    nlohmann::json request{{"seriesid", {series_id}},
                           {"startyear", std::to_string(range.first.year())},
                           {"endyear", std::to_string(range.last.year())}};
    if (!api_key.empty()) request["registrationkey"] = api_key;

    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    auto res = client.Post(path, request.dump(), "application/json");
    if (!res) throw Error(ErrorKind::Network, endpoint + ": " + httplib::to_string(res.error()));
    if (res->status == 429) {
        std::optional<int> retry;
        if (res->has_header("Retry-After")) {
            int secs = 0;
            const auto v = res->get_header_value("Retry-After");
            if (std::from_chars(v.data(), v.data() + v.size(), secs).ec == std::errc{}) retry = secs;
        }
        throw RateLimitedError(retry, endpoint + " is rate limiting requests");
    }
    if (res->status != 200) throw HttpStatusError(res->status, endpoint);
    return parse_remote_response(res->body, series_id, range);
}

} // namespace lagdex
