#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxinfer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Every box has been excluded by the data; there is nothing to renormalize.
class ContradictoryEvidence : public Error {
public:
    ContradictoryEvidence()
        : Error("contradictory evidence: every box has probability zero") {}
};

/// Both hypotheses of a likelihood ratio are impossible.
class IndeterminateOdds : public Error {
public:
    IndeterminateOdds(std::size_t i, std::size_t j)
        : Error("indeterminate odds: boxes " + std::to_string(i) + " and " +
                std::to_string(j) + " are both impossible") {}
};

class ParseError : public Error {
public:
    enum class Kind { MalformedToken, EmptyFile, BadHeader, ColumnCount };

    ParseError(Kind kind, std::string path, std::size_t line, const std::string& what)
        : Error(path + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          kind_(kind),
          path_(std::move(path)),
          line_(line) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& path() const noexcept { return path_; }
    /// 1-based; 0 when the error is not tied to a line (e.g. an empty file).
    std::size_t line() const noexcept { return line_; }

private:
    Kind kind_;
    std::string path_;
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace boxinfer
