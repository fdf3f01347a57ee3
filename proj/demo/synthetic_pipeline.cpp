// Writes a synthetic panel as CSV plus config.json, then runs the pipeline on it.
//
//   synthetic_pipeline [output-dir] [seed] [noise]

#include "lagdex/lagdex.hpp"
#include "synthetic_data.hpp"

#include <iostream>
#include <string>

using namespace lagdex;

int main(int argc, char** argv)
{
    const std::filesystem::path dir = argc > 1 ? argv[1] : "lagdex-demo";
    synthetic::PanelOptions opt;
    opt.seed = argc > 2 ? std::stoull(argv[2]) : 1;
    opt.noise = argc > 3 ? std::stod(argv[3]) : 1.0;
    opt.index_span = {MonthStamp(1982, 1), MonthStamp(2012, 3)};
    opt.shaped_core_headline = true;

    try {
        const auto reg = synthetic::make_registry(opt);
        const MonthInterval window{MonthStamp(2002, 4), MonthStamp(2012, 3)};
        const auto config = synthetic::write_dataset(reg, dir, window);
        std::cout << "dataset: " << config.string() << "\n\n";

        const auto loaded = build_registry(load_config(config));
        const auto d = diff(loaded.get("CC"), loaded.get("C"));
        const auto trend = detect_breakpoints(d);
        std::cout << "CC - C trend segments\n";
        for (const auto& s : trend.segments)
            std::cout << "  " << s.start.to_string() << ".." << s.end.to_string() << "  slope "
                      << detail::fixed(s.slope, 3) << "/yr\n";

        const SearchSpec spec{loaded.names(), 0, 13, window, loaded.target_name()};
        const auto best = search(spec, loaded, {4, {}});
        std::cout << "\nbest of " << best.evaluated_count << " fits\n  " << format_equation(best.best) << "\n\n";

        std::vector<MonthStamp> ends;
        for (auto m = MonthStamp(2011, 8); m <= MonthStamp(2012, 3); m = m + 1) ends.push_back(m);
        SearchSpec narrow = spec;
        narrow.lag_max = 3;
        std::cout << format_ledger(stability_scan(narrow, loaded, ends, 8, {4, {}})) << '\n';

        const auto dev = deviation_series(loaded.target(), best.best, loaded);
        const auto episodes = find_episodes(dev, 2.0, 1.0, best.best.stats.rms);
        std::cout << episodes.size() << " deviation episodes beyond 2 rms\n";
    } catch (const Error& e) {
        std::cerr << "synthetic_pipeline: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
