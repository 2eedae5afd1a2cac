#pragma once

#include <stdexcept>
#include <string>

namespace pflat {

/// Base class for all library errors. `kind()` is the stable name used in
/// machine-readable reports (e.g. "NonManifold").
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind))
    {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define PFLAT_DEFINE_ERROR(Name)                                                 \
    class Name : public Error                                                    \
    {                                                                            \
    public:                                                                      \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}            \
    }

PFLAT_DEFINE_ERROR(NonManifold);
PFLAT_DEFINE_ERROR(DuplicateSimplex);
PFLAT_DEFINE_ERROR(UnknownSimplex);
PFLAT_DEFINE_ERROR(Degenerate);
PFLAT_DEFINE_ERROR(OutOfDomain);
PFLAT_DEFINE_ERROR(Infeasible);
PFLAT_DEFINE_ERROR(MaxIterations);
PFLAT_DEFINE_ERROR(LeftDomain);
PFLAT_DEFINE_ERROR(SingularHessian);
PFLAT_DEFINE_ERROR(NotCritical);
PFLAT_DEFINE_ERROR(AbortNonMonotone);

#undef PFLAT_DEFINE_ERROR

/// Malformed mesh file. Carries the 1-based line number of the offending line
/// (0 when the file ended early).
class ParseError : public Error
{
public:
    ParseError(int line, const std::string& msg)
        : Error("ParseError", "line " + std::to_string(line) + ": " + msg), line_(line)
    {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace pflat
