#include "lagdex/lagdex.hpp"
#include "lagdex/remote.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace lagdex;

namespace {

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Io, "sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::vector<int> parse_int_list(const std::string& text, std::size_t count, const std::string& flag)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int v = 0;
        const auto* end = item.data() + item.size();
        auto [p, ec] = std::from_chars(item.data(), end, v);
        if (ec != std::errc{} || p != end) throw Error(ErrorKind::InvalidArgument, flag + ": '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.size() != count)
        throw Error(ErrorKind::InvalidArgument, flag + " expects " + std::to_string(count) + " comma-separated values");
    return out;
}

std::pair<std::string, std::string> parse_name_pair(const std::string& text, const std::string& flag)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == text.size() ||
        text.find(',', comma + 1) != std::string::npos)
        throw Error(ErrorKind::InvalidArgument, flag + " expects NAME,NAME");
    return {text.substr(0, comma), text.substr(comma + 1)};
}

/// Collects outputs of one command and writes them with a manifest.
class Run {
public:
    Run(std::string command, fs::path out_dir) : command_(std::move(command)), out_dir_(std::move(out_dir)) {}

    void input(const fs::path& path, const fs::path& shown = {})
    {
        inputs_.push_back({{"path", (shown.empty() ? path : shown).generic_string()},
                           {"sha256", sha256_hex(read_file(path))}});
    }
    void config(const fs::path& path, const SourceConfig& cfg)
    {
        config_path_ = path.generic_string();
        input(path);
        const auto base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
        auto add = [&](const SourceSpec& s) {
            if (s.remote) return;
            const auto rel = s.path.lexically_relative(base);
            input(s.path, rel.empty() ? s.path : rel);
        };
        add(cfg.target);
        for (const auto& c : cfg.candidates) add(c);
    }
    void window(const MonthInterval& w) { window_ = w.to_string(); }
    void parameter(const std::string& key, json value) { parameters_[key] = std::move(value); }

    void output(const std::string& name, const std::string& content)
    {
        fs::create_directories(out_dir_);
        std::ofstream out(out_dir_ / name, std::ios::binary);
        out << content;
        if (!out) throw Error(ErrorKind::Io, "cannot write " + (out_dir_ / name).string());
        outputs_.push_back({{"path", name}, {"sha256", sha256_hex(content)}});
    }
    void output_json(const std::string& name, const json& j) { output(name, j.dump(2) + "\n"); }

    void finish()
    {
        json m{{"tool", "lagdex"},     {"version", std::string(version)}, {"command", command_},
               {"config", config_path_}, {"window", window_},             {"parameters", parameters_},
               {"inputs", inputs_},      {"outputs", outputs_}};
        fs::create_directories(out_dir_);
        std::ofstream(out_dir_ / (command_ + ".manifest.json"), std::ios::binary) << m.dump(2) << '\n';
    }

private:
    std::string command_;
    fs::path out_dir_;
    std::string config_path_;
    std::string window_;
    json parameters_ = json::object();
    json inputs_ = json::array();
    json outputs_ = json::array();
};

struct Globals {
    std::string config;
    std::string out_dir = ".";
    unsigned workers = 1;
    std::optional<std::uint64_t> seed;
};

struct Loaded {
    SourceConfig config;
    SeriesRegistry registry;
};

Loaded load(const Globals& g, Run& run)
{
    if (g.config.empty()) throw Error(ErrorKind::Config, "--config is required for this command");
    const fs::path path(g.config);
    auto cfg = load_config(path);
    run.config(path, cfg);
    auto registry = build_registry(cfg, [](const std::string& id, const MonthInterval& range,
                                           const std::string& endpoint, const std::string& key) {
        return fetch_remote(id, range, endpoint, key);
    });
    if (g.seed) run.parameter("seed", *g.seed);
    return {std::move(cfg), std::move(registry)};
}

MonthInterval window_or(const std::string& flag, const MonthInterval& fallback)
{
    return flag.empty() ? fallback : MonthInterval::parse(flag);
}

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::UnknownSeries:
        return 2;
    case ErrorKind::RankDeficient:
    case ErrorKind::NoFeasibleModel:
        return 4;
    default:
        return 3;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lagged price-index models of stock prices"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON source configuration");
    app.add_option("--out-dir", g.out_dir, "Directory for report files")->capture_default_str();
    app.add_option("--workers", g.workers, "Worker threads for searches")->check(CLI::Range(1u, 256u));
    app.add_option("--seed", g.seed, "Seed recorded for stochastic fixtures");

    // trend
    auto* trend = app.add_subcommand("trend", "Piecewise linear trend of the difference A - B");
    std::string trend_a, trend_b, trend_window, mirror_pivot;
    std::optional<int> max_breaks, min_segment, gap_max;
    int horizon = 72;
    trend->add_option("--a", trend_a, "Minuend series")->required();
    trend->add_option("--b", trend_b, "Subtrahend series")->required();
    trend->add_option("--max-breaks", max_breaks);
    trend->add_option("--min-segment", min_segment, "Minimum segment length in observations");
    trend->add_option("--gap-max", gap_max, "Unfitted transition months allowed at a break");
    trend->add_option("--window", trend_window, "YYYY-MM:YYYY-MM (default: whole difference series)");
    trend->add_option("--mirror-pivot", mirror_pivot, "YYYY-MM; adds a mirrored forecast of the last segment");
    trend->add_option("--horizon", horizon, "Forecast length in months")->capture_default_str();

    // fit
    auto* fit = app.add_subcommand("fit", "Fit one lag model or one index-difference model");
    std::string fit_pair, fit_lags, fit_dcpi, fit_window;
    std::optional<int> fit_lag;
    auto* pair_opt = fit->add_option("--pair", fit_pair, "A,B");
    auto* dcpi_opt = fit->add_option("--dcpi", fit_dcpi, "MINUEND,SUBTRAHEND");
    pair_opt->excludes(dcpi_opt);
    fit->add_option("--lags", fit_lags, "l1,l2 for --pair")->needs(pair_opt);
    fit->add_option("--lag", fit_lag, "Lag for --dcpi (negative leads)")->needs(dcpi_opt);
    fit->add_option("--window", fit_window, "YYYY-MM:YYYY-MM (default: config window)");

    // search
    auto* srch = app.add_subcommand("search", "Exhaustive pair and lag search");
    std::string search_window;
    std::optional<int> lag_min, lag_max;
    srch->add_option("--window", search_window);
    srch->add_option("--lag-min", lag_min);
    srch->add_option("--lag-max", lag_max);

    // ledger
    auto* ledger = app.add_subcommand("ledger", "Best model at each end month and its stability");
    std::string end_months, ledger_window;
    std::optional<int> depth;
    ledger->add_option("--end-months", end_months, "YYYY-MM:YYYY-MM")->required();
    ledger->add_option("--depth", depth);
    ledger->add_option("--window", ledger_window);

    // signal
    auto* sig = app.add_subcommand("signal", "Deviation episodes of the target around a model");
    std::string model_file;
    std::optional<double> enter, exit_mult;
    sig->add_option("--model", model_file, "Model JSON written by fit or search")->required();
    sig->add_option("--enter", enter, "Entry threshold in multiples of rms");
    sig->add_option("--exit", exit_mult, "Exit threshold in multiples of rms");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "Download one series and store it as CSV");
    std::string series_id, range, endpoint, output;
    fetch->add_option("--series-id", series_id)->required();
    fetch->add_option("--range", range, "YYYY-MM:YYYY-MM")->required();
    fetch->add_option("--endpoint", endpoint, "Default: remote.endpoint of --config");
    fetch->add_option("--output", output, "CSV file name inside --out-dir")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const unsigned workers = g.workers;
        if (trend->parsed()) {
            Run run("trend", g.out_dir);
            auto [cfg, reg] = load(g, run);
            SegmentationOptions opt{max_breaks.value_or(cfg.trend_max_breaks),
                                    min_segment.value_or(cfg.trend_min_segment), gap_max.value_or(cfg.trend_gap_max)};
            auto d = diff(reg.get(trend_a), reg.get(trend_b));
            if (!trend_window.empty()) d = d.slice(MonthInterval::parse(trend_window));
            run.window(d.range());
            run.parameter("a", trend_a);
            run.parameter("b", trend_b);
            run.parameter("max_breaks", opt.max_breaks);
            run.parameter("min_segment", opt.min_segment);
            run.parameter("gap_max", opt.gap_max);
            const auto tf = detect_breakpoints(d, opt);
            auto doc = to_json(tf);
            doc["series"] = d.id();
            std::optional<TrendSegment> forecast;
            if (!mirror_pivot.empty()) {
                forecast = mirror_forecast(tf.segments.back(), MonthStamp::parse(mirror_pivot), horizon);
                doc["forecast"] = to_json(*forecast);
                run.parameter("mirror_pivot", mirror_pivot);
                run.parameter("horizon", horizon);
            }
            std::ostringstream csv;
            write_trend_csv(csv, d, tf, forecast);
            run.output_json("trend.json", doc);
            run.output("trend.csv", csv.str());
            run.finish();
            for (const auto& s : tf.segments)
                std::cout << s.start.to_string() << ".." << s.end.to_string() << "  slope " << detail::fixed(s.slope, 4)
                          << "/yr  value at 2000 " << detail::fixed(s.intercept, 4) << '\n';
            if (forecast)
                std::cout << "mirror from " << forecast->start.to_string() << ": slope "
                          << detail::fixed(forecast->slope, 4) << "/yr, " << detail::fixed(forecast->value_at(forecast->end), 3)
                          << " at " << forecast->end.to_string() << '\n';
        } else if (fit->parsed()) {
            if (fit_pair.empty() == fit_dcpi.empty())
                throw Error(ErrorKind::InvalidArgument, "fit needs exactly one of --pair or --dcpi");
            Run run("fit", g.out_dir);
            auto [cfg, reg] = load(g, run);
            const auto window = window_or(fit_window, cfg.window);
            run.window(window);
            FitOptions fo{cfg.condition_limit, default_max_abs_lag};
            if (!fit_pair.empty()) {
                const auto [a, b] = parse_name_pair(fit_pair, "--pair");
                const auto lags = fit_lags.empty() ? std::vector<int>{0, 0} : parse_int_list(fit_lags, 2, "--lags");
                run.parameter("pair", fit_pair);
                run.parameter("lags", lags);
                auto m = fit_lag_model(reg.target(), {a, reg.get(a), lags[0]}, {b, reg.get(b), lags[1]}, window, fo);
                m.target_name = reg.target_name();
                std::ostringstream csv;
                write_fit_csv(csv, reg.target().slice(m.stats.window), predict(m, reg, m.stats.window));
                run.output_json("model.json", to_json(m));
                run.output("fit.csv", csv.str());
                run.finish();
                std::cout << format_equation(m) << '\n';
                const StabilityLedger row{1, {LedgerRow{m.stats.window.last, summarize(m), {}, true}}};
                const auto table = format_ledger(row);
                std::cout << table.substr(0, table.find("stable over"));
            } else {
                const auto [minuend, subtrahend] = parse_name_pair(fit_dcpi, "--dcpi");
                const int lag = fit_lag.value_or(0);
                run.parameter("dcpi", fit_dcpi);
                run.parameter("lag", lag);
                auto m = fit_simple_diff(reg, minuend, subtrahend, lag, window, fo);
                std::ostringstream csv;
                write_fit_csv(csv, reg.target().slice(m.stats.window), predict(m, reg, m.stats.window));
                run.output_json("model.json", to_json(m));
                run.output("fit.csv", csv.str());
                run.finish();
                std::cout << format_equation(m) << '\n';
            }
        } else if (srch->parsed()) {
            Run run("search", g.out_dir);
            auto [cfg, reg] = load(g, run);
            const SearchSpec spec{cfg.candidate_names(), lag_min.value_or(cfg.lag_min), lag_max.value_or(cfg.lag_max),
                                  window_or(search_window, cfg.window), cfg.target.name};
            run.window(spec.window);
            run.parameter("lag_min", spec.lag_min);
            run.parameter("lag_max", spec.lag_max);
            const auto r = search(spec, reg, {workers, {cfg.condition_limit, default_max_abs_lag}});
            std::ostringstream csv;
            write_ranking_csv(csv, r);
            run.output_json("search.json", to_json(r));
            run.output("ranking.csv", csv.str());
            run.output_json("best_model.json", to_json(r.best));
            run.finish();
            std::cout << format_equation(r.best) << '\n'
                      << r.evaluated_count << " of " << r.grid_size << " combinations fitted, " << r.skipped.size()
                      << " skipped\n";
        } else if (ledger->parsed()) {
            Run run("ledger", g.out_dir);
            auto [cfg, reg] = load(g, run);
            const SearchSpec spec{cfg.candidate_names(), cfg.lag_min, cfg.lag_max, window_or(ledger_window, cfg.window),
                                  cfg.target.name};
            const auto ends = MonthInterval::parse(end_months);
            std::vector<MonthStamp> months;
            for (auto m = ends.first; m <= ends.last; m = m + 1) months.push_back(m);
            const int d = depth.value_or(cfg.stability_depth);
            run.window(spec.window);
            run.parameter("end_months", ends.to_string());
            run.parameter("depth", d);
            const auto l = stability_scan(spec, reg, months, d, {workers, {cfg.condition_limit, default_max_abs_lag}});
            const auto table = format_ledger(l);
            run.output_json("ledger.json", to_json(l));
            run.output("ledger.txt", table);
            run.finish();
            std::cout << table;
        } else if (sig->parsed()) {
            Run run("signal", g.out_dir);
            auto [cfg, reg] = load(g, run);
            run.input(model_file);
            const auto model = model_from_json(json::parse(read_file(model_file), nullptr, true));
            const double e_in = enter.value_or(cfg.signal_enter);
            const double e_out = exit_mult.value_or(cfg.signal_exit);
            run.parameter("model", fs::path(model_file).filename().generic_string());
            run.parameter("enter", e_in);
            run.parameter("exit", e_out);
            const auto [dev, rms, window] = std::visit(
                [&](const auto& m) {
                    return std::tuple{deviation_series(reg.target(), m, reg), m.stats.rms, m.stats.window};
                },
                model);
            run.window(window);
            const auto episodes = find_episodes(dev, e_in, e_out, rms);
            auto doc = to_json(episodes);
            doc["rms"] = rms;
            std::ostringstream csv, devcsv;
            write_episodes_csv(csv, episodes);
            devcsv << "month,deviation\n";
            for (auto m = dev.start(); m <= dev.end(); m = m + 1)
                devcsv << m.to_string() << ',' << detail::csv_value(dev.at(m)) << '\n';
            run.output_json("episodes.json", doc);
            run.output("episodes.csv", csv.str());
            run.output("deviation.csv", devcsv.str());
            run.finish();
            std::cout << episodes.size() << " episodes";
            if (auto rate = resolution_rate(episodes)) std::cout << ", resolution rate " << detail::fixed(*rate, 3);
            std::cout << '\n';
        } else if (fetch->parsed()) {
            Run run("fetch", g.out_dir);
            std::string ep = endpoint;
            std::string key;
            if (!g.config.empty()) {
                const auto cfg = load_config(g.config);
                if (ep.empty()) ep = cfg.endpoint;
                key = cfg.api_key;
            }
            if (ep.empty()) throw Error(ErrorKind::Config, "no endpoint: pass --endpoint or set remote.endpoint");
            const auto r = MonthInterval::parse(range);
            run.window(r);
            run.parameter("series_id", series_id);
            run.parameter("endpoint", ep);
            const auto s = fetch_remote(series_id, r, ep, key);
            std::ostringstream csv;
            write_csv(csv, s);
            run.output(output, csv.str());
            run.finish();
            std::cout << s.observed_count() << " observations of " << series_id << " in " << s.range().to_string()
                      << '\n';
        }
        return 0;
    } catch (const SourceLoadError& e) {
        std::cerr << "lagdex: " << e.what() << '\n';
        for (const auto& f : e.failures()) std::cerr << "  " << f << '\n';
        return exit_code(e.kind());
    } catch (const Error& e) {
        std::cerr << "lagdex: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const json::exception& e) {
        std::cerr << "lagdex: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lagdex: " << e.what() << '\n';
        return 3;
    }
}
