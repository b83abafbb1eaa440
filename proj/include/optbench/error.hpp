#pragma once

#include <stdexcept>
#include <string>

namespace optbench {

/// Bad user input: config files, flags, malformed suite definitions.
class ConfigurationError : public std::runtime_error {
public:
    explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

/// A bit sequence that is not a valid preorder tree encoding.
class MalformedEncodingError : public std::invalid_argument {
public:
    explicit MalformedEncodingError(const std::string& what) : std::invalid_argument(what) {}
};

/// Failure while executing a plan or talking to a backend.
class ExecutionError : public std::runtime_error {
public:
    explicit ExecutionError(const std::string& what) : std::runtime_error(what) {}
};

/// Refusal to enumerate a plan space larger than the configured bound.
class EnumerationLimitError : public std::runtime_error {
public:
    explicit EnumerationLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace optbench
