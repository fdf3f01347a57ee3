#pragma once

#include "lagdex/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lagdex {

/// A calendar month. Ordering is (year, month); subtraction yields a signed
/// month count.
class MonthStamp {
public:
    constexpr MonthStamp() = default;
    constexpr MonthStamp(int year, int month) : year_(year), month_(month)
    {
        if (month < 1 || month > 12)
            throw Error(ErrorKind::InvalidArgument, "month out of range: " + std::to_string(month));
    }

    static constexpr MonthStamp from_index(std::int64_t index) noexcept
    {
        MonthStamp m;
        auto y = index / 12;
        auto r = index % 12;
        if (r < 0) {
            r += 12;
            --y;
        }
        m.year_ = static_cast<int>(y);
        m.month_ = static_cast<int>(r) + 1;
        return m;
    }

    /// Months since year 0, January.
    constexpr std::int64_t index() const noexcept
    {
        return static_cast<std::int64_t>(year_) * 12 + (month_ - 1);
    }

    constexpr int year() const noexcept { return year_; }
    constexpr int month() const noexcept { return month_; }

    constexpr auto operator<=>(const MonthStamp& o) const noexcept { return index() <=> o.index(); }
    constexpr bool operator==(const MonthStamp& o) const noexcept { return index() == o.index(); }

    constexpr MonthStamp operator+(std::int64_t months) const noexcept { return from_index(index() + months); }
    constexpr MonthStamp operator-(std::int64_t months) const noexcept { return from_index(index() - months); }
    constexpr std::int64_t operator-(const MonthStamp& o) const noexcept { return index() - o.index(); }

    /// Parses "YYYY-MM". Returns nullopt on any malformation.
    static std::optional<MonthStamp> try_parse(std::string_view text) noexcept
    {
        if (text.size() != 7 || text[4] != '-') return std::nullopt;
        int y = 0;
        int m = 0;
        auto [p1, e1] = std::from_chars(text.data(), text.data() + 4, y);
        auto [p2, e2] = std::from_chars(text.data() + 5, text.data() + 7, m);
        if (e1 != std::errc{} || p1 != text.data() + 4) return std::nullopt;
        if (e2 != std::errc{} || p2 != text.data() + 7) return std::nullopt;
        if (m < 1 || m > 12) return std::nullopt;
        return from_index(static_cast<std::int64_t>(y) * 12 + (m - 1));
    }

    static MonthStamp parse(std::string_view text)
    {
        if (auto m = try_parse(text)) return *m;
        throw Error(ErrorKind::InvalidArgument, "expected YYYY-MM, got '" + std::string(text) + "'");
    }

    std::string to_string() const
    {
        char buf[16];
        auto n = std::snprintf(buf, sizeof buf, "%04d-%02d", year_, month_);
        return std::string(buf, static_cast<std::size_t>(n));
    }

private:
    int year_ = 2000;
    int month_ = 1;
};

/// Fractional calendar years, January of year Y being exactly Y.
struct YearFraction {
    double value = 0.0;
    constexpr auto operator<=>(const YearFraction&) const = default;
};

constexpr YearFraction year_fraction(MonthStamp m) noexcept
{
    return YearFraction{m.year() + (m.month() - 1) / 12.0};
}

/// Inclusive month range. Textual form "YYYY-MM:YYYY-MM".
struct MonthInterval {
    MonthStamp first;
    MonthStamp last;

    constexpr std::int64_t length() const noexcept { return last - first + 1; }
    constexpr bool contains(MonthStamp m) const noexcept { return first <= m && m <= last; }
    constexpr bool operator==(const MonthInterval&) const = default;

    std::optional<MonthInterval> intersect(const MonthInterval& o) const noexcept
    {
        MonthInterval r{std::max(first, o.first), std::min(last, o.last)};
        if (r.last < r.first) return std::nullopt;
        return r;
    }

    static MonthInterval parse(std::string_view text)
    {
        auto colon = text.find(':');
        if (colon == std::string_view::npos)
            throw Error(ErrorKind::InvalidArgument, "expected YYYY-MM:YYYY-MM, got '" + std::string(text) + "'");
        MonthInterval r{MonthStamp::parse(text.substr(0, colon)), MonthStamp::parse(text.substr(colon + 1))};
        if (r.last < r.first)
            throw Error(ErrorKind::InvalidArgument, "interval ends before it starts: '" + std::string(text) + "'");
        return r;
    }

    std::string to_string() const { return first.to_string() + ":" + last.to_string(); }
};

/// Month-indexed real series. Values are contiguous from `start()`; a gap is
/// an explicit std::nullopt, never an omitted month.
class MonthlySeries {
public:
    using value_type = std::optional<double>;

    MonthlySeries(std::string id, MonthStamp start, std::vector<value_type> values)
        : id_(std::move(id)), start_(start), values_(std::move(values))
    {
        if (values_.empty()) throw Error(ErrorKind::EmptySeries, "series '" + id_ + "' has no months");
        for (const auto& v : values_)
            if (v && !std::isfinite(*v))
                throw Error(ErrorKind::InvalidArgument, "series '" + id_ + "' contains a non-finite value");
    }

    MonthlySeries(std::string id, MonthStamp start, std::span<const double> values)
        : MonthlySeries(std::move(id), start, std::vector<value_type>(values.begin(), values.end()))
    {}

    const std::string& id() const noexcept { return id_; }
    MonthStamp start() const noexcept { return start_; }
    MonthStamp end() const noexcept { return start_ + static_cast<std::int64_t>(values_.size()) - 1; }
    MonthInterval range() const noexcept { return {start_, end()}; }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<value_type>& values() const noexcept { return values_; }

    std::size_t observed_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(),
                                                       [](const value_type& v) { return v.has_value(); }));
    }

    /// Value at month m; nullopt outside the stored range or at a gap.
    value_type at(MonthStamp m) const noexcept
    {
        auto offset = m - start_;
        if (offset < 0 || offset >= static_cast<std::int64_t>(values_.size())) return std::nullopt;
        return values_[static_cast<std::size_t>(offset)];
    }

    MonthlySeries with_id(std::string id) const { return MonthlySeries(std::move(id), start_, values_); }

    /// Restriction to `window`; throws EmptyIntersection when disjoint.
    MonthlySeries slice(const MonthInterval& window) const
    {
        auto common = range().intersect(window);
        if (!common)
            throw Error(ErrorKind::EmptyIntersection,
                        "series '" + id_ + "' does not overlap " + window.to_string());
        auto from = values_.begin() + (common->first - start_);
        return MonthlySeries(id_, common->first, std::vector<value_type>(from, from + common->length()));
    }

    bool operator==(const MonthlySeries&) const = default;

private:
    std::string id_;
    MonthStamp start_;
    std::vector<value_type> values_;
};

/// Id of a lagged series as rendered in reports, e.g. "PPI(t-1)".
inline std::string lagged_name(std::string_view name, int lag)
{
    std::string out(name);
    if (lag == 0) return out + "(t)";
    return out + (lag > 0 ? "(t-" : "(t+") + std::to_string(lag > 0 ? lag : -lag) + ")";
}

/// Value at month m of the result is the input value at month m - lag.
/// Positive lag reads the past.
inline MonthlySeries shift(const MonthlySeries& series, int lag)
{
    if (lag == 0) return series;
    return MonthlySeries(lagged_name(series.id(), lag), series.start() + lag, series.values());
}

struct AlignedTable {
    std::vector<std::string> ids;
    std::vector<MonthStamp> months;
    /// columns[k][row] is series k at months[row].
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return months.size(); }
};

/// Rows for every month in the common range where no input is missing.
inline AlignedTable align(std::span<const MonthlySeries> series_list)
{
    if (series_list.empty()) throw Error(ErrorKind::InvalidArgument, "align needs at least one series");
    std::optional<MonthInterval> common = series_list.front().range();
    for (const auto& s : series_list.subspan(1)) {
        common = common->intersect(s.range());
        if (!common) break;
    }
    if (!common) throw Error(ErrorKind::EmptyIntersection, "series have no common month");

    AlignedTable table;
    table.columns.resize(series_list.size());
    for (const auto& s : series_list) table.ids.push_back(s.id());
    for (auto m = common->first; m <= common->last; m = m + 1) {
        bool complete = true;
        for (const auto& s : series_list)
            if (!s.at(m)) {
                complete = false;
                break;
            }
        if (!complete) continue;
        table.months.push_back(m);
        for (std::size_t k = 0; k < series_list.size(); ++k) table.columns[k].push_back(*series_list[k].at(m));
    }
    if (table.months.empty())
        throw Error(ErrorKind::EmptyIntersection, "no common month with all series observed");
    return table;
}

inline AlignedTable align(std::initializer_list<MonthlySeries> series_list)
{
    return align(std::span<const MonthlySeries>(series_list.begin(), series_list.size()));
}

/// Pointwise a - b over the common month range; a month missing in either
/// input stays missing.
inline MonthlySeries diff(const MonthlySeries& a, const MonthlySeries& b)
{
    auto common = a.range().intersect(b.range());
    if (!common)
        throw Error(ErrorKind::EmptyIntersection, "'" + a.id() + "' and '" + b.id() + "' do not overlap");
    std::vector<MonthlySeries::value_type> out;
    out.reserve(static_cast<std::size_t>(common->length()));
    bool any = false;
    for (auto m = common->first; m <= common->last; m = m + 1) {
        auto va = a.at(m);
        auto vb = b.at(m);
        if (va && vb) {
            out.emplace_back(*va - *vb);
            any = true;
        } else {
            out.emplace_back(std::nullopt);
        }
    }
    if (!any) throw Error(ErrorKind::EmptyIntersection, "'" + a.id() + "' and '" + b.id() + "' share no observed month");
    return MonthlySeries(a.id() + "-" + b.id(), common->first, std::move(out));
}

} // namespace lagdex
