#pragma once

#include <stdexcept>
#include <string>

namespace asiaudit {

/// Base class for all library errors. `code()` returns a stable machine
/// readable identifier used in the JSON diagnostics stream and for exit
/// code mapping in the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// ---- ingestion / data errors ----------------------------------------------

class DataError : public Error {
public:
    using Error::Error;
};

class MissingColumnError : public DataError {
public:
    explicit MissingColumnError(const std::string& column)
        : DataError("missing_column", "required column missing: " + column),
          column_(column) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class DuplicateKeyError : public DataError {
public:
    DuplicateKeyError(const std::string& firm_id, int year)
        : DataError("duplicate_key",
                    "duplicate (firm_id, year): (" + firm_id + ", " +
                        std::to_string(year) + ")") {}
};

class EmptyPanelError : public DataError {
public:
    explicit EmptyPanelError(const std::string& message = "panel has no usable records")
        : DataError("empty_panel", message) {}
};

class TooFewObservationsError : public DataError {
public:
    explicit TooFewObservationsError(const std::string& message)
        : DataError("too_few_observations", message) {}
};

class NonpositiveScalingBaseError : public DataError {
public:
    NonpositiveScalingBaseError(const std::string& firm_id, int year)
        : DataError("nonpositive_base",
                    "nonpositive scaling base for (" + firm_id + ", " +
                        std::to_string(year) + ")") {}
};

// ---- numerical / model errors ---------------------------------------------

class RankDeficientError : public Error {
public:
    explicit RankDeficientError(const std::string& details)
        : Error("rank_deficient", details) {}

protected:
    RankDeficientError(std::string code, const std::string& details)
        : Error(std::move(code), details) {}
};

/// Reason the interaction regressor degenerated: every dummy equal.
enum class DummyDegeneracy { all_nonpositive, all_positive };

inline const char* to_string(DummyDegeneracy reason) {
    return reason == DummyDegeneracy::all_positive ? "all_positive" : "all_nonpositive";
}

class DegenerateDummyError : public RankDeficientError {
public:
    explicit DegenerateDummyError(DummyDegeneracy reason)
        : RankDeficientError("degenerate_dummy",
                             std::string("interaction regressor degenerate: rest signs ") +
                                 to_string(reason)),
          reason_(reason) {}
    DummyDegeneracy reason() const noexcept { return reason_; }

private:
    DummyDegeneracy reason_;
};

class InvalidNestingError : public Error {
public:
    explicit InvalidNestingError(const std::string& message)
        : Error("invalid_nesting", message) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message)
        : Error("domain_error", message) {}
};

class ZeroDenominatorError : public Error {
public:
    explicit ZeroDenominatorError(const std::string& message)
        : Error("zero_denominator", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message)
        : Error("config_error", message) {}
};

} // namespace asiaudit
