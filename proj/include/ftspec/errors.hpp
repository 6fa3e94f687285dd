#pragma once

#include <stdexcept>
#include <string>

namespace ftspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable tag, e.g. "domain".
    [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

#define FTSPEC_DEFINE_ERROR(Name, tag)                                       \
    class Name : public Error {                                              \
    public:                                                                  \
        using Error::Error;                                                  \
        [[nodiscard]] const char* kind() const noexcept override { return tag; } \
    };

FTSPEC_DEFINE_ERROR(DimensionError, "dimension")
FTSPEC_DEFINE_ERROR(DomainError, "domain")
FTSPEC_DEFINE_ERROR(PreconditionError, "precondition")
FTSPEC_DEFINE_ERROR(UnsupportedError, "unsupported")
FTSPEC_DEFINE_ERROR(NumericError, "numeric")
FTSPEC_DEFINE_ERROR(DegenerateDataError, "degenerate-data")
FTSPEC_DEFINE_ERROR(ParseError, "parse")
FTSPEC_DEFINE_ERROR(ConfigError, "config")

#undef FTSPEC_DEFINE_ERROR

}  // namespace ftspec
