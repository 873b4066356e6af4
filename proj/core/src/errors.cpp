#include "swelabel/errors.hpp"

namespace swelabel {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedRecord: return "MalformedRecord";
        case ErrorKind::DuplicateId: return "DuplicateId";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::RepoUnavailable: return "RepoUnavailable";
        case ErrorKind::CommitNotFound: return "CommitNotFound";
        case ErrorKind::DiffParseError: return "DiffParseError";
        case ErrorKind::BackendUnavailable: return "BackendUnavailable";
        case ErrorKind::ContextLengthExceeded: return "ContextLengthExceeded";
        case ErrorKind::ContextBudgetExceeded: return "ContextBudgetExceeded";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EmptyLog: return "EmptyLog";
        case ErrorKind::ExtractorUnavailable: return "ExtractorUnavailable";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::UnparseableOutput: return "UnparseableOutput";
        case ErrorKind::NoValidRuns: return "NoValidRuns";
        case ErrorKind::UndefinedAlpha: return "UndefinedAlpha";
        case ErrorKind::EmptyIntersection: return "EmptyIntersection";
        case ErrorKind::AllEmpty: return "AllEmpty";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::MissingResultsFile: return "MissingResultsFile";
        case ErrorKind::DegenerateGroups: return "DegenerateGroups";
        case ErrorKind::MissingRate: return "MissingRate";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

namespace errors {

Error malformed_record(std::size_t line_no, const std::string& detail) {
    return Error(ErrorKind::MalformedRecord, "line " + std::to_string(line_no) + ": " + detail);
}

Error duplicate_id(const std::string& id) {
    return Error(ErrorKind::DuplicateId, id);
}

Error io(const std::string& detail) {
    return Error(ErrorKind::IoError, detail);
}

}  // namespace errors

}  // namespace swelabel
