#pragma once

#include <stdexcept>
#include <string>

namespace htsp {

// Every failure surfaces as one of these; the CLI maps them to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HTSP_ERROR(Name)                                   \
    struct Name : Error {                                  \
        explicit Name(const std::string& what)             \
            : Error(std::string(#Name ": ") + what) {}     \
    }

HTSP_ERROR(EmptyInput);
HTSP_ERROR(PairNotFlat);
HTSP_ERROR(NoRoot);
HTSP_ERROR(NotConnected);
HTSP_ERROR(ValenceExceeded);
HTSP_ERROR(PropertyViolation);
HTSP_ERROR(FlatnessViolated);
HTSP_ERROR(DepthTooLarge);
HTSP_ERROR(ZeroMass);
HTSP_ERROR(EmptyBall);
HTSP_ERROR(BadParameter);
HTSP_ERROR(NoValidN);
HTSP_ERROR(ParseError);

#undef HTSP_ERROR

}  // namespace htsp
