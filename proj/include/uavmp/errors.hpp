#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavmp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query fell outside the extent of an elevation grid.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// No obstacle-free route exists between two points.
class NoPathError : public Error {
public:
    using Error::Error;
};

/// A genome does not fit the mission it is decoded against.
class StructureError : public Error {
public:
    using Error::Error;
};

/// The live simulation moved too far from the state a replacement plan was built for.
class DriftError : public Error {
public:
    using Error::Error;
};

struct Issue {
    std::string path;     // JSON pointer to the offending field
    std::string message;
};

/// Document validation failure; carries every issue found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Issue> issues)
        : Error(summarize(issues)), issues_(std::move(issues)) {}
    ValidationError(std::string path, std::string message)
        : ValidationError(std::vector<Issue>{Issue{std::move(path), std::move(message)}}) {}

    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    static std::string summarize(const std::vector<Issue>& issues) {
        if (issues.empty()) return "validation failed";
        std::string s = issues.front().path.empty() ? issues.front().message
                                                    : issues.front().path + ": " + issues.front().message;
        if (issues.size() > 1) s += " (+" + std::to_string(issues.size() - 1) + " more)";
        return s;
    }

    std::vector<Issue> issues_;
};

} // namespace uavmp
