#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Error taxonomy. Each class maps to a distinct process exit code in the CLI:
//   config_error    -> 2   (bad run configuration, unsupported model/variant combination)
//   input_error     -> 3   (malformed or inconsistent input data; messages address row/column)
//   numerical_error -> 4   (a computation failed to converge; message carries diagnostics)
// Precondition violations on library calls throw std::domain_error and are not CLI-mapped.

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_input_error = 3;
inline constexpr int exit_numerical_error = 4;

} // namespace casimir
