#pragma once

#include <cstdint>
#include <vector>

#include "loctime/errors.hpp"

namespace loctime {

// Truncated Laurent-style power series in w = 1/z. A series knows its
// coefficients for every exponent up to order(); exponents below the stored
// window and the gap between the window top and order() are exact zeros.
// Arithmetic propagates the order pessimistically, so a coefficient that can
// be read never silently depends on discarded terms.
class ZSeries {
public:
    // Sentinel for exactly-known series (constants, monomials, finite sums
    // of them). Large enough that real truncation orders never reach it,
    // small enough that sums of a few sentinels cannot overflow.
    static constexpr std::int64_t kUnbounded = std::int64_t{1} << 40;

    // Zero through w^order inclusive.
    static ZSeries zero(std::int64_t order = kUnbounded);
    static ZSeries constant(double value);
    static ZSeries monomial(double coeff, std::int64_t exponent);
    // coeffs[i] multiplies w^(valuation + i); everything above the window up
    // to order is zero.
    static ZSeries from_coefficients(std::vector<double> coeffs, std::int64_t valuation,
                                     std::int64_t order);

    std::int64_t order() const { return order_; }
    bool is_zero() const { return coeffs_.empty(); }
    // Exponent of the first stored coefficient; order() + 1 for the zero
    // series so that order formulas hold uniformly.
    std::int64_t valuation() const;

    // Throws TruncationExceeded for exponent > order().
    double coefficient(std::int64_t exponent) const;

    ZSeries truncated(std::int64_t new_order) const;
    // Multiplies by w^delta.
    ZSeries shifted(std::int64_t delta) const;
    // Strips leading coefficients with magnitude <= threshold; used to
    // recover the true valuation after cancellation.
    ZSeries tightened(double threshold = 1e-13) const;
    ZSeries pow(int exponent) const;

    ZSeries operator-() const;
    friend ZSeries operator+(const ZSeries& a, const ZSeries& b);
    friend ZSeries operator-(const ZSeries& a, const ZSeries& b);
    friend ZSeries operator*(const ZSeries& a, const ZSeries& b);
    // Requires the divisor's leading stored coefficient to be nonzero after
    // internal tightening; throws DivisionByZeroSeries for a zero divisor.
    friend ZSeries operator/(const ZSeries& a, const ZSeries& b);

    friend ZSeries operator*(const ZSeries& a, double s);
    friend ZSeries operator*(double s, const ZSeries& a) { return a * s; }
    friend ZSeries operator/(const ZSeries& a, double s) { return a * (1.0 / s); }

private:
    ZSeries(std::vector<double> coeffs, std::int64_t valuation, std::int64_t order);

    std::vector<double> coeffs_;
    std::int64_t valuation_ = 0;
    std::int64_t order_ = kUnbounded;
};

}  // namespace loctime
