#pragma once

#include <stdexcept>
#include <string>

namespace fabd {

enum class ErrorCode {
    ParseError,
    ScopeError,
    PartialAssignment,
    WrongFragment,
    BudgetExceeded,
    NotSubsetOfH,
    MissingDefinition,
    InvalidDefinition,
    NoEquality,
    NotOneValid,
    NoNegUnit,
    NotPos2Cnf,
    UnsatStructure,
    Usage,
    Internal,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, int line = 0, int column = 0)
        : std::runtime_error(format(code, message, line, column)),
          code_(code), line_(line), column_(column) {}

    ErrorCode code() const { return code_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(ErrorCode code, const std::string& message, int line, int column);

    ErrorCode code_;
    int line_;
    int column_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message, int line = 0, int column = 0) {
    throw Error(code, std::move(message), line, column);
}

} // namespace fabd
