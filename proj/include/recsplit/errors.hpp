#pragma once

#include <stdexcept>
#include <string>

namespace recsplit {

// Base for all numeric/model errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Splitting law violates the supercriticality condition E[#crumbs] > 1.
struct SubcriticalLaw : Error {
    explicit SubcriticalLaw(const std::string& msg) : Error(msg) {}
};

// Sizes of one division step fail the unit-sum invariant.
struct MassLeak : Error {
    explicit MassLeak(const std::string& msg) : Error(msg) {}
};

// The equation psi(alpha) = 1 has no root in (0, 1).
struct NoRoot : Error {
    explicit NoRoot(const std::string& msg) : Error(msg) {}
};

struct PoleAtAlphaStar : Error {
    explicit PoleAtAlphaStar(const std::string& msg) : Error(msg) {}
};

struct GenerationCap : Error {
    explicit GenerationCap(const std::string& msg) : Error(msg) {}
};

struct DepthExceeded : Error {
    explicit DepthExceeded(const std::string& msg) : Error(msg) {}
};

struct PrecisionInsufficient : Error {
    explicit PrecisionInsufficient(const std::string& msg) : Error(msg) {}
};

struct TooManyParts : Error {
    explicit TooManyParts(const std::string& msg) : Error(msg) {}
};

struct NumericalBlowup : Error {
    explicit NumericalBlowup(const std::string& msg) : Error(msg) {}
};

struct IdentityViolated : Error {
    explicit IdentityViolated(const std::string& msg) : Error(msg) {}
};

struct BadCardinality : Error {
    explicit BadCardinality(const std::string& msg) : Error(msg) {}
};

struct FitFailed : Error {
    explicit FitFailed(const std::string& msg) : Error(msg) {}
};

struct InsufficientRange : Error {
    explicit InsufficientRange(const std::string& msg) : Error(msg) {}
};

struct DegenerateCells : Error {
    explicit DegenerateCells(const std::string& msg) : Error(msg) {}
};

}  // namespace recsplit
