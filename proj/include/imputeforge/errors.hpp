#pragma once

#include <stdexcept>
#include <string>

namespace imputeforge {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- data / schema errors ----------------------------------------------

class InvalidSchema : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

class UnparsableNumeric : public Error {
public:
    UnparsableNumeric(std::size_t row, std::size_t col, const std::string& cell)
        : Error("unparsable numeric cell at row " + std::to_string(row) + ", column " +
                std::to_string(col) + ": '" + cell + "'"),
          row_(row), col_(col) {}
    std::size_t row() const { return row_; }
    std::size_t col() const { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class MissingTarget : public Error {
public:
    explicit MissingTarget(std::size_t row)
        : Error("row " + std::to_string(row) + " has a missing target value"), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class NonBinaryTarget : public Error {
public:
    using Error::Error;
};

class InfeasibleCount : public Error {
public:
    using Error::Error;
};

class InsufficientCompleteRows : public Error {
public:
    using Error::Error;
};

class UnknownColumn : public Error {
public:
    explicit UnknownColumn(const std::string& name) : Error("unknown column: " + name) {}
};

class IoFailure : public Error {
public:
    using Error::Error;
};

// ---- profile / selection errors ----------------------------------------

class ProfileTooShort : public Error {
public:
    using Error::Error;
};

// ---- prompt errors ------------------------------------------------------

class ColumnCollision : public Error {
public:
    using Error::Error;
};

class IncompleteExample : public Error {
public:
    using Error::Error;
};

class CountMismatch : public Error {
public:
    CountMismatch(std::size_t got, std::size_t expected)
        : Error("response value count mismatch: got " + std::to_string(got) + ", expected " +
                std::to_string(expected)),
          got_(got), expected_(expected) {}
    std::size_t got() const { return got_; }
    std::size_t expected() const { return expected_; }

private:
    std::size_t got_;
    std::size_t expected_;
};

class DomainViolation : public Error {
public:
    DomainViolation(std::size_t position, const std::string& value)
        : Error("value '" + value + "' at position " + std::to_string(position) +
                " is outside the category domain"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class NumericParseFailure : public Error {
public:
    NumericParseFailure(std::size_t position, const std::string& value)
        : Error("value '" + value + "' at position " + std::to_string(position) +
                " does not parse as a finite number"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

// ---- backend errors ------------------------------------------------------

class AuthMissing : public Error {
public:
    using Error::Error;
};

class Timeout : public Error {
public:
    using Error::Error;
};

class RateLimited : public Error {
public:
    using Error::Error;
};

class MalformedProviderResponse : public Error {
public:
    using Error::Error;
};

class NoExamplesForClass : public Error {
public:
    using Error::Error;
};

// ---- eval errors ---------------------------------------------------------

class SingleClassTraining : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

/// Raised when a run is aborted cooperatively (e.g. Ctrl-C).
class Interrupted : public Error {
public:
    Interrupted() : Error("run interrupted") {}
};

}  // namespace imputeforge
