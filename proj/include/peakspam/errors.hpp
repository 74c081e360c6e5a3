#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace peakspam {

// Root of every error the library raises. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define PEAKSPAM_DECLARE_ERROR(Name)                                 \
    class Name : public Error {                                      \
    public:                                                          \
        using Error::Error;                                          \
        const char* kind() const noexcept override { return #Name; } \
    }

PEAKSPAM_DECLARE_ERROR(IoError);
PEAKSPAM_DECLARE_ERROR(SchemaError);
PEAKSPAM_DECLARE_ERROR(EmptyCorpusError);
PEAKSPAM_DECLARE_ERROR(TooFewPointsError);
PEAKSPAM_DECLARE_ERROR(DegenerateDistancesError);
PEAKSPAM_DECLARE_ERROR(ShapeError);
PEAKSPAM_DECLARE_ERROR(ParamError);

#undef PEAKSPAM_DECLARE_ERROR

class LexiconError : public Error {
public:
    LexiconError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    const char* kind() const noexcept override { return "LexiconError"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace peakspam
