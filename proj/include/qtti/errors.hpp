#pragma once

#include <stdexcept>
#include <string>

namespace qtti {

// Error categories map onto CLI exit codes (see tools/qtti.cpp).

/// Requested dense materialization or sampling exceeds the desk-scale budget.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Shapes, ranks or indices that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid parameters: unknown kernel names, out-of-range orders, bad specs.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// File format and stream failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qtti
