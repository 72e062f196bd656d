#pragma once

#include <stdexcept>
#include <string>

namespace jdsse {

struct ZeroNormError : std::runtime_error {
    explicit ZeroNormError(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroIntensityError : std::runtime_error {
    explicit ZeroIntensityError(const std::string& what) : std::runtime_error(what) {}
};

struct AllZeroIntensityError : std::runtime_error {
    explicit AllZeroIntensityError(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteError : std::runtime_error {
    explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientSamplesError : std::runtime_error {
    explicit InsufficientSamplesError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateRatesError : std::runtime_error {
    explicit DegenerateRatesError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParamsError : std::runtime_error {
    explicit InvalidParamsError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an ensemble exceeds its allowed fraction of discarded trajectories.
struct SimulationAbortError : std::runtime_error {
    explicit SimulationAbortError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jdsse
