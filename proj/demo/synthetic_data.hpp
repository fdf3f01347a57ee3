#pragma once

// Seeded synthetic CPI/PPI panels and a price series with a known defining
// pair. Used by the demo, the unit tests and the acceptance suite.

#include "lagdex/ingest.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/series.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace lagdex::synthetic {

/// Symbolic candidate names and their families.
inline const std::vector<std::pair<std::string, IndexFamily>>& candidate_names()
{
    static const std::vector<std::pair<std::string, IndexFamily>> names{
        {"C", IndexFamily::CPI},    {"F", IndexFamily::CPI},   {"H", IndexFamily::CPI},   {"FU", IndexFamily::CPI},
        {"HHE", IndexFamily::CPI},  {"CE", IndexFamily::CPI},  {"CC", IndexFamily::CPI},  {"E", IndexFamily::CPI},
        {"MF", IndexFamily::CPI},   {"GAS", IndexFamily::PPI}, {"COAL", IndexFamily::PPI}, {"EL", IndexFamily::PPI},
        {"OIL", IndexFamily::PPI},  {"PPI", IndexFamily::PPI}};
    return names;
}

/// Best-model coefficients of the March 2012 ledger row: COAL and PPI at lag 1.
struct TrueModel {
    std::string name1 = "COAL";
    int lag1 = 1;
    double b1 = -0.615;
    std::string name2 = "PPI";
    int lag2 = 1;
    double b2 = 1.2687;
    double c = 4.023;
    double d = -105.35;
};

inline MonthlySeries random_walk(std::string id, const MonthInterval& span, double level, double drift, double vol,
                                 std::mt19937_64& rng)
{
    std::normal_distribution<double> step(drift, vol);
    std::vector<double> v(static_cast<std::size_t>(span.length()));
    double x = level;
    for (auto& e : v) {
        e = x;
        x += step(rng);
    }
    return MonthlySeries(std::move(id), span.first, v);
}

/// b1 * X1(t - lag1) + b2 * X2(t - lag2) + c (t - 2000) + d + N(0, noise).
inline MonthlySeries model_target(const std::string& id, const MonthlySeries& x1, const MonthlySeries& x2,
                                  const TrueModel& truth, const MonthInterval& span, double noise,
                                  std::mt19937_64& rng)
{
    std::normal_distribution<double> eps(0.0, 1.0);
    std::vector<MonthlySeries::value_type> v;
    for (auto m = span.first; m <= span.last; m = m + 1) {
        auto a = x1.at(m - truth.lag1);
        auto b = x2.at(m - truth.lag2);
        const double e = noise > 0.0 ? noise * eps(rng) : 0.0;
        if (a && b)
            v.emplace_back(truth.b1 * *a + truth.b2 * *b + truth.c * (year_fraction(m).value - 2000.0) + truth.d + e);
        else
            v.emplace_back(std::nullopt);
    }
    return MonthlySeries(id, span.first, std::move(v));
}

struct PanelOptions {
    std::uint64_t seed = 1;
    MonthInterval index_span{MonthStamp(2001, 1), MonthStamp(2012, 3)};
    MonthInterval target_span{MonthStamp(2002, 4), MonthStamp(2012, 3)};
    double noise = 0.0;
    TrueModel truth{};
    /// Replace C and CC by a pair whose difference is piecewise linear with
    /// turns around 1998-2002 and 2008.
    bool shaped_core_headline = false;
};

/// Piecewise-linear CC - C profile: +0.65/yr to 1998, flat transition to
/// 2002, -1.52/yr to 2008-12, then flat.
inline double core_headline_profile(MonthStamp m)
{
    const double t = year_fraction(m).value;
    const double knots[] = {1982.0, 1998.0, 2002.0, 2009.0};
    double v = -6.0;
    v += 0.65 * (std::min(t, knots[1]) - knots[0]);
    if (t > knots[2]) v += -1.52 * (std::min(t, knots[3]) - knots[2]);
    return v;
}

/// Fourteen candidate random walks plus a target generated from `truth`.
inline SeriesRegistry make_registry(const PanelOptions& opt, const std::string& target_name = "COP")
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> level(90.0, 180.0);
    std::uniform_real_distribution<double> drift(0.1, 0.5);
    std::uniform_real_distribution<double> vol(0.5, 2.5);
    SeriesRegistry reg;
    for (const auto& [name, family] : candidate_names())
        reg.add(name, random_walk(name, opt.index_span, level(rng), drift(rng), vol(rng), rng), family);

    if (opt.shaped_core_headline) {
        const auto& headline = reg.get("C");
        std::normal_distribution<double> jitter(0.0, 0.15);
        std::vector<double> core;
        for (auto m = opt.index_span.first; m <= opt.index_span.last; m = m + 1)
            core.push_back(*headline.at(m) + core_headline_profile(m) + jitter(rng));
        SeriesRegistry shaped;
        for (const auto& name : reg.names())
            shaped.add(name, name == "CC" ? MonthlySeries("CC", opt.index_span.first, core) : reg.get(name),
                       reg.family(name));
        reg = std::move(shaped);
    }
    reg.set_target(target_name, model_target(target_name, reg.get(opt.truth.name1), reg.get(opt.truth.name2),
                                             opt.truth, opt.target_span, opt.noise, rng));
    return reg;
}

/// Writes one CSV per series and a config.json referencing them.
inline std::filesystem::path write_dataset(const SeriesRegistry& reg, const std::filesystem::path& dir,
                                           const MonthInterval& window)
{
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const MonthlySeries& s) {
        std::ofstream out(dir / (name + ".csv"), std::ios::binary);
        write_csv(out, s.with_id(name));
    };
    nlohmann::json cfg{{"config_version", current_config_version},
                       {"target", {{"name", reg.target_name()}, {"path", reg.target_name() + ".csv"}}},
                       {"candidates", nlohmann::json::array()},
                       {"window", window.to_string()},
                       {"lags", {{"min", 0}, {"max", 13}}},
                       {"stability_depth", 8},
                       {"dimension", 2},
                       {"signal", {{"enter", 2.0}, {"exit", 1.0}}},
                       {"trend", {{"max_breaks", 2}, {"min_segment", 36}, {"gap_max", 0}}}};
    write(reg.target_name(), reg.target());
    for (const auto& name : reg.names()) {
        write(name, reg.get(name));
        cfg["candidates"].push_back(
            {{"name", name}, {"family", std::string(to_string(reg.family(name)))}, {"path", name + ".csv"}});
    }
    const auto path = dir / "config.json";
    std::ofstream(path, std::ios::binary) << cfg.dump(2) << '\n';
    return path;
}

} // namespace lagdex::synthetic
