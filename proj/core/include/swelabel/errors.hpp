#pragma once

#include <stdexcept>
#include <string>

namespace swelabel {

enum class ErrorKind {
    MalformedRecord,
    DuplicateId,
    IoError,
    RepoUnavailable,
    CommitNotFound,
    DiffParseError,
    BackendUnavailable,
    ContextLengthExceeded,
    ContextBudgetExceeded,
    EmptyInput,
    EmptyLog,
    ExtractorUnavailable,
    ConvergenceFailure,
    UnparseableOutput,
    NoValidRuns,
    UndefinedAlpha,
    EmptyIntersection,
    AllEmpty,
    DimensionMismatch,
    ZeroVector,
    MissingResultsFile,
    DegenerateGroups,
    MissingRate,
    DomainError,
    ConfigError,
};

const char* to_string(ErrorKind kind);

// Single exception type for all contract errors; tests dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace errors {

Error malformed_record(std::size_t line_no, const std::string& detail);
Error duplicate_id(const std::string& id);
Error io(const std::string& detail);

}  // namespace errors

}  // namespace swelabel
