#pragma once

#include <stdexcept>
#include <string>

namespace itergm {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define ITERGM_ERROR(Name)                                                  \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

ITERGM_ERROR(ParseError);
ITERGM_ERROR(DegenerateHamiltonian);
ITERGM_ERROR(DecompositionFailed);
ITERGM_ERROR(MembershipFailed);
ITERGM_ERROR(GenericityViolation);
ITERGM_ERROR(CapacityExceeded);
ITERGM_ERROR(BasisMismatch);
ITERGM_ERROR(StructureViolation);
ITERGM_ERROR(NotClosed);
ITERGM_ERROR(LevelDrift);
ITERGM_ERROR(SingularityTooClose);
ITERGM_ERROR(StiffnessFailure);
ITERGM_ERROR(NoReturn);
ITERGM_ERROR(OrderExceeded);
ITERGM_ERROR(InconclusiveZero);

#undef ITERGM_ERROR

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line, std::string field)
        : Error("ConfigError", (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what),
          line_(line), field_(std::move(field)) {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace itergm
