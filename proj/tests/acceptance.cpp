// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on
// any failure.

#include "fixtures.hpp"
#include "lagdex/lagdex.hpp"
#include "oracles.hpp"
#include "search_oracle.hpp"
#include "synthetic_data.hpp"
#include "test_util.hpp"

#ifdef LAGDEX_CLI_PATH
#include "cli_runner.hpp"
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <thread>
#include <iostream>
#include <sstream>

using namespace lagdex;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

Verdict pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Verdict fail(std::string d) { return {Outcome::Fail, std::move(d)}; }

std::string num(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

const MonthInterval window120{MonthStamp(2002, 4), MonthStamp(2012, 3)};

Verdict exact_recovery()
{
    const auto reg = synthetic::make_registry({});
    std::vector<std::string> names;
    for (const auto& [n, f] : synthetic::candidate_names()) names.push_back(n);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = search({names, 0, 13, window120, "COP"}, reg, {std::max(1u, std::thread::hardware_concurrency()), {}});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& m = r.best;
    const bool pair = m.terms[0].series_name == "COAL" && m.terms[1].series_name == "PPI" && m.terms[0].lag == 1 &&
                      m.terms[1].lag == 1;
    const double err = std::max({std::abs(m.terms[0].coefficient + 0.615), std::abs(m.terms[1].coefficient - 1.2687),
                                 std::abs(m.trend_coeff - 4.023), std::abs(m.intercept + 105.35)});
    const std::string d = "best " + m.terms[0].series_name + "/" + m.terms[1].series_name + " lags (" +
                          std::to_string(m.terms[0].lag) + "," + std::to_string(m.terms[1].lag) + "), max coef error " +
                          num(err, 3) + ", rms " + num(m.stats.rms, 3) + ", " + std::to_string(r.grid_size) +
                          " combinations in " + num(secs, 3) + " s";
    return pair && err <= 1e-9 && m.stats.rms <= 1e-9 && secs <= 60.0 && r.grid_size == 17836 ? pass(d) : fail(d);
}

Verdict oracle_equivalence()
{
    const MonthInterval window{MonthStamp(2010, 1), MonthStamp(2012, 12)};
    int agree = 0;
    std::string first_mismatch;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto reg = oracle::small_registry(seed);
        const auto expected = oracle::brute_force_argmin(reg, reg.names(), 0, 3, window);
        const auto got = search({reg.names(), 0, 3, window, {}}, reg).ranking.front().key;
        if (expected && *expected == got)
            ++agree;
        else if (first_mismatch.empty())
            first_mismatch = ", first mismatch at seed " + std::to_string(seed);
    }
    const std::string d = std::to_string(agree) + "/25 registries agree" + first_mismatch;
    return agree == 25 ? pass(d) : fail(d);
}

Verdict ols_correctness()
{
    std::mt19937_64 rng(2024);
    double worst_coef = 0.0;
    double worst_orth = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        synthetic::PanelOptions opt;
        opt.seed = 1000 + static_cast<std::uint64_t>(trial);
        opt.noise = 0.5 + trial * 0.2;
        const auto reg = synthetic::make_registry(opt);
        const auto names = reg.names();
        const auto& a = names[rng() % names.size()];
        auto b = names[rng() % names.size()];
        if (b == a) b = a == "PPI" ? "OIL" : "PPI";
        const int la = static_cast<int>(rng() % 14);
        const int lb = static_cast<int>(rng() % 14);
        const MonthInterval w{MonthStamp(2003, 1) + static_cast<int>(rng() % 24), MonthStamp(2012, 3)};
        const auto m = fit_lag_model(reg.target(), {a, reg.get(a), la}, {b, reg.get(b), lb}, w);
        const auto design = oracle::lag_design(reg.target(), reg.get(a), la, reg.get(b), lb, w.first, w.last);
        const auto ref = oracle::normal_equations(design);
        if (!ref) return fail("oracle singular at trial " + std::to_string(trial));
        const double got[4] = {m.terms[0].coefficient, m.terms[1].coefficient, m.trend_coeff, m.intercept};
        for (int k = 0; k < 4; ++k) {
            const long double r = (*ref)[static_cast<std::size_t>(k)];
            worst_coef = std::max(worst_coef, static_cast<double>(std::fabs(got[k] - r) / std::fabs(r)));
        }
        long double ynorm = 0;
        for (auto v : design.y) ynorm += v * v;
        for (std::size_t col = 0; col < 4; ++col) {
            long double dot = 0, cnorm = 0;
            std::size_t row = 0;
            for (auto mth = w.first; mth <= w.last; mth = mth + 1) {
                const auto e = m.stats.residuals.at(mth);
                if (!e) continue;
                dot += design.rows[row][col] * *e;
                cnorm += design.rows[row][col] * design.rows[row][col];
                ++row;
            }
            worst_orth = std::max(worst_orth, static_cast<double>(std::fabs(dot) / std::sqrt(cnorm * ynorm)));
        }
    }
    const std::string d = "max relative coefficient error " + num(worst_coef, 3) + ", max residual-column cosine " +
                          num(worst_orth, 3);
    return worst_coef <= 1e-8 && worst_orth <= 1e-8 ? pass(d) : fail(d);
}

Verdict breakpoint_recovery()
{
    const MonthStamp join(2002, 1);
    const auto clean = fixtures::two_slope(MonthStamp(1992, 1), MonthStamp(2011, 12), join);
    const auto fit = detect_breakpoints(clean, {2, 36, 0});
    const bool exact = fit.breakpoints.size() == 1 && fit.breakpoints[0] == join;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto noisy = fixtures::two_slope(MonthStamp(1992, 1), MonthStamp(2011, 12), join, 0.2, seed);
        const auto f = detect_breakpoints(noisy, {1, 36, 0});
        if (!f.breakpoints.empty() && std::abs(f.breakpoints[0] - join) <= 3) ++hits;
    }
    const std::string d = std::string("noiseless break ") +
                          (fit.breakpoints.empty() ? std::string("none") : fit.breakpoints[0].to_string()) +
                          ", noisy within 3 months " + std::to_string(hits) + "/100";
    return exact && hits >= 95 ? pass(d) : fail(d);
}

Verdict mirror()
{
    TrendSegment last{MonthStamp(2002, 1), MonthStamp(2009, 1), 0.0, -1.52, 0.0, 85};
    last.intercept = 1.0 + 1.52 * 9.0;
    const auto f = mirror_forecast(last, MonthStamp(2009, 1), 72);
    const double jump = std::abs(f.value_at(MonthStamp(2009, 1)) - last.value_at(MonthStamp(2009, 1)));
    const double at2015 = f.value_at(2015.0);
    const std::string d = "slope " + num(f.slope) + ", continuity gap " + num(jump, 3) + ", value at 2015 " + num(at2015);
    const double scale = std::max(1.0, std::abs(last.value_at(MonthStamp(2009, 1))));
    return f.slope == 1.52 && jump <= 4 * std::numeric_limits<double>::epsilon() * scale &&
                   std::abs(at2015 - 11.0) <= 1.5
               ? pass(d)
               : fail(d);
}

Verdict real_data()
{
    const char* path = std::getenv("LAGDEX_REAL_DATA_CONFIG");
    if (!path || !*path) return {Outcome::Skip, "set LAGDEX_REAL_DATA_CONFIG to a config with CC, C, E, PPI, OIL, COAL"};
    const auto cfg = load_config(path);
    const auto reg = build_registry(cfg);
    std::vector<std::string> notes;
    bool ok = true;
    auto within = [&](const std::string& what, double got, double want, double tol) {
        const bool good = std::abs(got - want) <= tol * std::abs(want);
        notes.push_back(what + " " + num(got, 4) + (good ? "" : " (want " + num(want, 4) + ")"));
        ok = ok && good;
    };
    const auto d4 = fit_simple_diff(reg, "CC", "C", -1, {MonthStamp(1998, 1), MonthStamp(2012, 3)});
    within("slope", d4.slope, -5.35, 0.10);
    within("intercept", d4.intercept, 72.3, 0.10);
    const auto sigma = [](double rms, double se, double want) {
        return std::abs(rms - want) < std::abs(se - want) ? rms : se;
    };
    within("sigma", sigma(d4.stats.rms, d4.stats.stderr_dof, 7.87), 7.87, 0.10);
    const std::vector<std::pair<ModelKey, double>> fixed{
        {{"CC", "E", 12, 0}, 5.98}, {{"OIL", "PPI", 2, 0}, 6.35}, {{"COAL", "PPI", 1, 1}, 3.96}};
    for (const auto& [key, want] : fixed) {
        const auto m = fit_key(reg, key, cfg.window);
        within(key.name1 + "/" + key.name2 + " sigma", sigma(m.stats.rms, m.stats.stderr_dof, want), want, 0.15);
    }
    std::string d;
    for (const auto& n : notes) d += (d.empty() ? "" : ", ") + n;
    return ok ? pass(d) : fail(d);
}

Verdict determinism()
{
#ifdef LAGDEX_CLI_PATH
    lagdex::testing::TempDir dir("acceptance");
    synthetic::PanelOptions opt;
    opt.seed = 11;
    opt.noise = 1.0;
    opt.index_span = {MonthStamp(1982, 1), MonthStamp(2012, 3)};
    opt.shaped_core_headline = true;
    const auto config = synthetic::write_dataset(synthetic::make_registry(opt), dir / "data", window120).string();
    const std::vector<std::vector<std::string>> commands{
        {"search"},
        {"ledger", "--end-months", "2011-08:2012-03"},
        {"trend", "--a", "CC", "--b", "C", "--mirror-pivot", "2012-03"},
        {"fit", "--pair", "COAL,PPI", "--lags", "1,1"},
        {"fit", "--dcpi", "CC,C", "--lag", "-1", "--window", "2002-04:2012-02"}};
    std::size_t compared = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::map<std::string, std::string> reference;
        for (const char* workers : {"1", "4", "2"}) {
            const auto out = dir / ("run-" + std::to_string(i) + "-" + workers);
            std::vector<std::string> args{"--config", config, "--out-dir", out.string(), "--workers", workers};
            args.insert(args.end(), commands[i].begin(), commands[i].end());
            const auto r = lagdex::testing::run_cli(LAGDEX_CLI_PATH, args, dir / "scratch");
            if (r.code != 0) return fail(commands[i][0] + " exited with " + std::to_string(r.code) + ": " + r.err);
            const auto files = lagdex::testing::directory_contents(out);
            if (reference.empty())
                reference = files;
            else if (files != reference)
                return fail(commands[i][0] + " output differs with --workers " + workers);
        }
        compared += reference.size();
    }
    return pass(std::to_string(commands.size()) + " commands x 3 worker counts, " + std::to_string(compared) +
                " files byte-identical");
#else
    return {Outcome::Skip, "command-line tool not built"};
#endif
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"AC1 synthetic exact recovery", exact_recovery},
        {"AC2 search matches brute-force oracle", oracle_equivalence},
        {"AC3 least squares matches extended-precision oracle", ols_correctness},
        {"AC4 breakpoint recovery", breakpoint_recovery},
        {"AC5 mirror forecast", mirror},
        {"AC6 real-data reproduction", real_data},
        {"AC7 byte-identical reruns", determinism}};
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v{Outcome::Fail, {}};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = fail(std::string("exception: ") + e.what());
        }
        const char* tag = v.outcome == Outcome::Pass ? "[PASS]" : v.outcome == Outcome::Skip ? "[SKIP]" : "[FAIL]";
        if (v.outcome == Outcome::Fail) ++failures;
        std::cout << tag << ' ' << name << ": " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
