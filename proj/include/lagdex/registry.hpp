#pragma once

#include "lagdex/error.hpp"
#include "lagdex/series.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lagdex {

enum class IndexFamily { CPI, PPI, Other };

constexpr std::string_view to_string(IndexFamily f) noexcept
{
    switch (f) {
    case IndexFamily::CPI: return "CPI";
    case IndexFamily::PPI: return "PPI";
    case IndexFamily::Other: return "other";
    }
    return "other";
}

inline IndexFamily parse_family(std::string_view text)
{
    if (text == "CPI" || text == "cpi") return IndexFamily::CPI;
    if (text == "PPI" || text == "ppi") return IndexFamily::PPI;
    if (text == "other" || text.empty()) return IndexFamily::Other;
    throw Error(ErrorKind::Config, "unknown index family '" + std::string(text) + "'");
}

/// Named candidate index series plus the modeled price series. Immutable once
/// handed to the search.
class SeriesRegistry {
public:
    struct Entry {
        MonthlySeries series;
        IndexFamily family;
    };

    void add(const std::string& name, MonthlySeries series, IndexFamily family = IndexFamily::Other)
    {
        if (name.empty()) throw Error(ErrorKind::Config, "candidate name is empty");
        if (entries_.count(name) != 0 || (target_name_ == name))
            throw Error(ErrorKind::Config, "duplicate series name '" + name + "'");
        entries_.emplace(name, Entry{std::move(series), family});
    }

    void set_target(const std::string& name, MonthlySeries series)
    {
        if (entries_.count(name) != 0) throw Error(ErrorKind::Config, "target name '" + name + "' is also a candidate");
        target_name_ = name;
        target_.emplace(std::move(series));
    }

    bool has_target() const noexcept { return target_.has_value(); }
    const std::string& target_name() const noexcept { return target_name_; }

    const MonthlySeries& target() const
    {
        if (!target_) throw Error(ErrorKind::UnknownSeries, "registry has no target series");
        return *target_;
    }

    bool contains(std::string_view name) const { return entries_.find(std::string(name)) != entries_.end(); }

    const MonthlySeries* find(std::string_view name) const
    {
        auto it = entries_.find(std::string(name));
        if (it != entries_.end()) return &it->second.series;
        if (target_ && name == target_name_) return &*target_;
        return nullptr;
    }

    const MonthlySeries& get(std::string_view name) const
    {
        if (const auto* s = find(name)) return *s;
        throw Error(ErrorKind::UnknownSeries, "no series named '" + std::string(name) + "'");
    }

    IndexFamily family(std::string_view name) const
    {
        auto it = entries_.find(std::string(name));
        if (it == entries_.end()) throw Error(ErrorKind::UnknownSeries, "no series named '" + std::string(name) + "'");
        return it->second.family;
    }

    /// Candidate names in lexicographic order (the target is not included).
    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& [name, _] : entries_) out.push_back(name);
        return out;
    }

    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, Entry> entries_;
    std::string target_name_;
    std::optional<MonthlySeries> target_;
};

} // namespace lagdex
