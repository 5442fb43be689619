#ifndef VBL_ERRORS_HPP
#define VBL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vbl {

// Error taxonomy shared by all modules. Each failure mode of the numerical
// pipeline gets its own type so callers (and the CLI exit-code mapping) can
// discriminate without string matching.

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct NotFound : std::runtime_error {
    explicit NotFound(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct BlowUp : std::runtime_error {
    explicit BlowUp(const std::string& what) : std::runtime_error(what) {}
};

struct StiffnessFailure : std::runtime_error {
    explicit StiffnessFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateOrbit : std::runtime_error {
    explicit DegenerateOrbit(const std::string& what) : std::runtime_error(what) {}
};

struct NoHomoclinic : std::runtime_error {
    explicit NoHomoclinic(const std::string& what) : std::runtime_error(what) {}
};

struct PeriodOverflow : std::runtime_error {
    explicit PeriodOverflow(const std::string& what) : std::runtime_error(what) {}
};

struct ResolutionExceeded : std::runtime_error {
    explicit ResolutionExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct BoundaryContamination : std::runtime_error {
    explicit BoundaryContamination(const std::string& what) : std::runtime_error(what) {}
};

struct NotUnstable : std::runtime_error {
    explicit NotUnstable(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct WindowTooShort : std::runtime_error {
    explicit WindowTooShort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vbl

#endif
