#pragma once

#include <stdexcept>
#include <string>

namespace latfront {

// Error taxonomy mirrors the CLI exit codes: config 2, hypothesis 3,
// ansatz 4, numerical 5.

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

class AnsatzError : public std::runtime_error {
public:
    explicit AnsatzError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace latfront
