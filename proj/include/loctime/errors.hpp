#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace loctime {

// Base of everything thrown by this library. Two families: ValidationError
// for rejected inputs, ComputeError for failures of a well-formed query.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ComputeError : public Error {
public:
    using Error::Error;
};

class NegativeEntry : public ValidationError {
public:
    NegativeEntry(int row, int col, double value)
        : ValidationError("negative entry " + std::to_string(value) + " at (" +
                          std::to_string(row) + ", " + std::to_string(col) + ")"),
          row(row), col(col), value(value) {}
    int row;
    int col;
    double value;
};

class RowSumViolation : public ValidationError {
public:
    RowSumViolation(int row, double sum)
        : ValidationError("row " + std::to_string(row) + " sums to " +
                          std::to_string(sum) + ", expected 1"),
          row(row), sum(sum) {}
    int row;
    double sum;
};

class ZeroRow : public ValidationError {
public:
    explicit ZeroRow(int row)
        : ValidationError("row " + std::to_string(row) + " has no outgoing weight"),
          row(row) {}
    int row;
};

class GraphError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DivisionByZeroSeries : public ComputeError {
public:
    DivisionByZeroSeries() : ComputeError("division by the zero series") {}
};

class TruncationExceeded : public ComputeError {
public:
    explicit TruncationExceeded(std::int64_t requested, std::int64_t order)
        : ComputeError("coefficient of w^" + std::to_string(requested) +
                       " requested, series known only up to w^" + std::to_string(order)),
          requested(requested), order(order) {}
    std::int64_t requested;
    std::int64_t order;
};

class SingularSystem : public ComputeError {
public:
    explicit SingularSystem(double z)
        : ComputeError("resolvent requested at z = " + std::to_string(z) +
                       "; numeric mode requires z > 1"),
          z(z) {}
    double z;
};

class DenominatorVanishes : public ComputeError {
public:
    DenominatorVanishes() : ComputeError("deformation denominator vanishes") {}
};

class NotStronglyConnected : public ComputeError {
public:
    NotStronglyConnected() : ComputeError("transition matrix is not strongly connected") {}
};

class ExtrapolationDiverged : public ComputeError {
public:
    ExtrapolationDiverged() : ComputeError("final-value extrapolation did not converge") {}
};

class NoAcceptedPaths : public ComputeError {
public:
    NoAcceptedPaths() : ComputeError("no sampled path reached the fixed endpoint") {}
};

class ZeroNormalization : public ComputeError {
public:
    ZeroNormalization() : ComputeError("endpoint unreachable: normalization constant is zero") {}
};

}  // namespace loctime
