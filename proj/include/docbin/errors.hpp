#ifndef DOCBIN_ERRORS_HPP
#define DOCBIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace docbin {

// Error categories map 1:1 onto CLI exit codes (1, 2, 3).

/// Invalid parameter value or combination.
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unreadable, unwritable, or malformed file.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input data that makes the requested computation meaningless
/// (constant histogram, uniform ground truth, ...).
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace docbin

#endif
