#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mnemorank {

// One code per failure the library distinguishes. The C API mirrors these
// values one to one (see mnemorank.h).
enum class ErrorCode {
    InvalidArgument = 1,
    Io,
    EmptyTrace,
    MissingColumn,
    DuplicateSampleId,
    EmptyManifest,
    UnknownNode,
    EmptyGraph,
    SingularSystem,
    TooLarge,
    EmptyCorpus,
    EmptyMatrix,
    DegenerateWeights,
    SingleClassData,
    DimensionMismatch,
    TooFewRows,
    NonSquare,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace mnemorank
