#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causaforge {

// Base of every error the library raises. `code()` is a stable,
// machine-readable tag used in CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define CAUSAFORGE_ERROR(Name, tag)                                        \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(tag, what) {}       \
    }

CAUSAFORGE_ERROR(InvalidArgument, "invalid_argument");
CAUSAFORGE_ERROR(IoFailure, "io_failure");
CAUSAFORGE_ERROR(InvariantViolation, "invariant_violation");
CAUSAFORGE_ERROR(ParseFailure, "parse_failure");
CAUSAFORGE_ERROR(OversizeRequest, "oversize_request");
CAUSAFORGE_ERROR(ProviderError, "provider_error");
CAUSAFORGE_ERROR(ProviderExhausted, "provider_exhausted");
CAUSAFORGE_ERROR(UnknownConcept, "unknown_concept");
CAUSAFORGE_ERROR(DegenerateCorpus, "degenerate_corpus");
CAUSAFORGE_ERROR(ZeroVector, "zero_vector");
CAUSAFORGE_ERROR(MissingEmbedding, "missing_embedding");
CAUSAFORGE_ERROR(ZeroVariance, "zero_variance");
CAUSAFORGE_ERROR(InsufficientData, "insufficient_data");
CAUSAFORGE_ERROR(LengthMismatch, "length_mismatch");
CAUSAFORGE_ERROR(DegenerateRanks, "degenerate_ranks");
CAUSAFORGE_ERROR(DimensionMismatch, "dimension_mismatch");
CAUSAFORGE_ERROR(PerplexityTooLarge, "perplexity_too_large");
CAUSAFORGE_ERROR(WindowTooLarge, "window_too_large");
CAUSAFORGE_ERROR(ConfigError, "config_error");
CAUSAFORGE_ERROR(MissingPrerequisite, "missing_prerequisite");

#undef CAUSAFORGE_ERROR

// Malformed record in a line-oriented file; carries the 1-based line number.
class CorruptRecord : public Error {
public:
    CorruptRecord(std::size_t line, const std::string& what)
        : Error("corrupt_record", "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line_number() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace causaforge
