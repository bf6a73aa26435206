#ifndef LLSVM_ERRORS_HPP
#define LLSVM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace llsvm {

// Base for all recoverable errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid specification or configuration (bad bandwidth, unknown family, bad schedule, ...).
struct InvalidSpecError : Error {
    explicit InvalidSpecError(const std::string& msg) : Error(msg) {}
};

// Structurally invalid input (dimension mismatch, non-finite values, empty dataset, bad labels).
struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

// Query cannot be satisfied (k out of range, radius <= 0).
struct QueryError : Error {
    explicit QueryError(const std::string& msg) : Error(msg) {}
};

// Problem has no usable information (all weights zero, empty neighborhood under abstain policy).
struct DegenerateProblemError : Error {
    explicit DegenerateProblemError(const std::string& msg) : Error(msg) {}
};

// File/format problems when reading or writing data.
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

} // namespace llsvm

#endif
