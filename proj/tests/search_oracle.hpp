#pragma once

// Brute-force search reference and the random registries it is checked on.

#include "lagdex/regress.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/search.hpp"
#include "synthetic_data.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace lagdex::oracle {

/// Ordered-pair enumeration through fit_lag_model, reduced with its own
/// comparison: smallest rms, ties within 1e-12 relative plus 1e-12 of the
/// target level, broken by canonical key.
inline std::optional<ModelKey> brute_force_argmin(const SeriesRegistry& reg, const std::vector<std::string>& names, int lmin,
                                           int lmax, const MonthInterval& window)
{
    struct Fit {
        ModelKey key;
        double rms;
    };
    std::vector<Fit> fits;
    for (const auto& a : names)
        for (const auto& b : names) {
            if (a == b) continue;
            for (int la = lmin; la <= lmax; ++la)
                for (int lb = lmin; lb <= lmax; ++lb) {
                    try {
                        const auto m =
                            fit_lag_model(reg.target(), {a, reg.get(a), la}, {b, reg.get(b), lb}, window);
                        const ModelKey key = a < b ? ModelKey{a, b, la, lb} : ModelKey{b, a, lb, la};
                        fits.push_back({key, m.stats.rms});
                    } catch (const Error&) {
                    }
                }
        }
    if (fits.empty()) return std::nullopt;
    double lo = fits.front().rms;
    for (const auto& f : fits) lo = std::min(lo, f.rms);
    long double level = 0;
    int count = 0;
    for (auto m = window.first; m <= window.last; m = m + 1)
        if (auto v = reg.target().at(m)) {
            level += static_cast<long double>(*v) * *v;
            ++count;
        }
    const double floor = 1e-12 * static_cast<double>(std::sqrt(level / count));
    std::optional<ModelKey> best;
    for (const auto& f : fits) {
        if (f.rms > lo * (1.0 + 1e-12) + floor) continue;
        const auto t = std::make_tuple(f.key.name1, f.key.name2, f.key.lag1, f.key.lag2);
        if (!best || t < std::make_tuple(best->name1, best->name2, best->lag1, best->lag2)) best = f.key;
    }
    return best;
}

/// Up to four random walks over 36 + 3 months, some of them exact or shifted
/// duplicates, and a target built from a random pair.
inline SeriesRegistry small_registry(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const MonthInterval span{MonthStamp(2009, 10), MonthStamp(2012, 12)};
    SeriesRegistry reg;
    const auto a = synthetic::random_walk("A", span, 100.0, 0.3, 1.0, rng);
    const auto b = synthetic::random_walk("B", span, 120.0, 0.1, 2.0, rng);
    reg.add("A", a);
    reg.add("B", b);
    switch (seed % 3) {
    case 0:
        reg.add("D", a.with_id("D")); // exact duplicate of A
        break;
    case 1:
        reg.add("D", shift(a, -1).slice(span).with_id("D")); // D(t) = A(t + 1)
        break;
    default:
        reg.add("D", synthetic::random_walk("D", span, 80.0, 0.2, 1.5, rng));
    }
    if (seed % 2 == 0) reg.add("E", synthetic::random_walk("E", span, 60.0, 0.0, 0.7, rng));

    synthetic::TrueModel truth{"A", static_cast<int>(rng() % 4), 1.5, "B", static_cast<int>(rng() % 4), -0.7, 2.0, 10.0};
    const MonthInterval target_span{MonthStamp(2010, 1), MonthStamp(2012, 12)};
    reg.set_target("P", synthetic::model_target("P", a, b, truth, target_span, seed % 4 == 0 ? 0.0 : 0.5, rng));
    return reg;
}

} // namespace lagdex::oracle
