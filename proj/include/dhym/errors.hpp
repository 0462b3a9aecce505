#pragma once

#include <stdexcept>
#include <string>

namespace dhym {

// Numerical/domain failures carry a category so the CLI can map them to
// exit codes without string matching.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class DegenerateVolume : public Error {
public:
    explicit DegenerateVolume(const std::string& msg) : Error(msg) {}
};

class SupercriticalViolation : public Error {
public:
    explicit SupercriticalViolation(const std::string& msg) : Error(msg) {}
};

class UnsupportedDimension : public Error {
public:
    explicit UnsupportedDimension(const std::string& msg) : Error(msg) {}
};

class NoRootInBracket : public Error {
public:
    explicit NoRootInBracket(const std::string& msg) : Error(msg) {}
};

class NegativeDiscriminant : public Error {
public:
    explicit NegativeDiscriminant(const std::string& msg) : Error(msg) {}
};

class IllPosed : public Error {
public:
    explicit IllPosed(const std::string& msg) : Error(msg) {}
};

class DegenerateDenominator : public Error {
public:
    explicit DegenerateDenominator(const std::string& msg) : Error(msg) {}
};

class PhaseOutOfRange : public Error {
public:
    explicit PhaseOutOfRange(const std::string& msg) : Error(msg) {}
};

class CflViolation : public Error {
public:
    explicit CflViolation(const std::string& msg) : Error(msg) {}
};

} // namespace dhym
