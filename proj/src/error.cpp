#include "mnemorank/error.hpp"

namespace mnemorank {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateSampleId: return "DuplicateSampleId";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

} // namespace mnemorank
