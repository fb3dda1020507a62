#pragma once

#include <stdexcept>
#include <string>

namespace affine {

// Exit-code family used by the CLI; every library error maps to exactly one.
enum class ErrorFamily { config = 2, domain = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorFamily family, const std::string& what) : std::runtime_error(what), family_(family) {}
    ErrorFamily family() const noexcept { return family_; }

private:
    ErrorFamily family_;
};

#define AFFINE_ERROR(Name, Family)                                                   \
    class Name : public Error {                                                      \
    public:                                                                          \
        explicit Name(const std::string& what) : Error(ErrorFamily::Family, what) {} \
    }

AFFINE_ERROR(ConfigError, config);

AFFINE_ERROR(DomainError, domain);
AFFINE_ERROR(SingularConfiguration, domain);
AFFINE_ERROR(UnknownObservable, domain);
AFFINE_ERROR(InvalidLabel, domain);
AFFINE_ERROR(GridTooCoarse, domain);
AFFINE_ERROR(ShapeMismatch, domain);

AFFINE_ERROR(DegenerateInertia, numeric);
AFFINE_ERROR(StepFailure, numeric);
AFFINE_ERROR(SingularWeight, numeric);
AFFINE_ERROR(ConvergenceFailure, numeric);

#undef AFFINE_ERROR

}  // namespace affine
