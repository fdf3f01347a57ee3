#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lagdex {

enum class ErrorKind {
    Config,
    InvalidArgument,
    UnknownSeries,
    Io,
    Parse,
    DuplicateMonth,
    EmptySeries,
    EmptyIntersection,
    InsufficientData,
    InsufficientOverlap,
    SourceLoad,
    Network,
    HttpStatus,
    Schema,
    RateLimited,
    RankDeficient,
    NoFeasibleModel,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnknownSeries: return "UnknownSeries";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::DuplicateMonth: return "DuplicateMonth";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::SourceLoad: return "SourceLoadError";
    case ErrorKind::Network: return "NetworkError";
    case ErrorKind::HttpStatus: return "HttpStatusError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NoFeasibleModel: return "NoFeasibleModel";
    }
    return "Error";
}

/// Base of every exception thrown by the library. The kind is the stable,
/// machine-readable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)), line_(line)
    {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

class HttpStatusError : public Error {
public:
    HttpStatusError(int status, const std::string& what)
        : Error(ErrorKind::HttpStatus, "HTTP " + std::to_string(status) + ": " + what),
          status_(status)
    {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

class RateLimitedError : public Error {
public:
    RateLimitedError(std::optional<int> retry_after_seconds, const std::string& what)
        : Error(ErrorKind::RateLimited, what), retry_after_(retry_after_seconds)
    {}

    /// Value of the server's Retry-After header in seconds, when it sent one.
    std::optional<int> retry_after() const noexcept { return retry_after_; }

private:
    std::optional<int> retry_after_;
};

class RankDeficientError : public Error {
public:
    RankDeficientError(std::vector<std::string> columns, double condition, const std::string& what)
        : Error(ErrorKind::RankDeficient, what), columns_(std::move(columns)), condition_(condition)
    {}

    /// Design columns involved in the (near) linear dependence.
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    double condition() const noexcept { return condition_; }

private:
    std::vector<std::string> columns_;
    double condition_;
};

/// Several sources failed to load; every individual failure is kept.
class SourceLoadError : public Error {
public:
    explicit SourceLoadError(std::vector<std::string> failures)
        : Error(ErrorKind::SourceLoad, join(failures)), failures_(std::move(failures))
    {}

    const std::vector<std::string>& failures() const noexcept { return failures_; }

private:
    static std::string join(const std::vector<std::string>& parts)
    {
        std::string out = std::to_string(parts.size()) + " source(s) failed to load";
        for (const auto& p : parts) out += "\n  " + p;
        return out;
    }

    std::vector<std::string> failures_;
};

} // namespace lagdex
