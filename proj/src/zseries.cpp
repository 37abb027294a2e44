#include "loctime/zseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

namespace loctime {

namespace {

std::int64_t cap(std::int64_t v) { return std::min(v, ZSeries::kUnbounded); }

std::int64_t cap_add(std::int64_t a, std::int64_t b) {
    if (a >= ZSeries::kUnbounded || b >= ZSeries::kUnbounded) {
        return ZSeries::kUnbounded;
    }
    return cap(a + b);
}

}  // namespace

ZSeries::ZSeries(std::vector<double> coeffs, std::int64_t valuation, std::int64_t order)
    : coeffs_(std::move(coeffs)), valuation_(valuation), order_(cap(order)) {
    if (!coeffs_.empty()) {
        const std::int64_t top = valuation_ + static_cast<std::int64_t>(coeffs_.size()) - 1;
        if (top > order_) {
            const std::int64_t keep = order_ - valuation_ + 1;
            coeffs_.resize(keep > 0 ? static_cast<std::size_t>(keep) : 0);
        }
    }
    std::size_t lead = 0;
    while (lead < coeffs_.size() && coeffs_[lead] == 0.0) {
        ++lead;
    }
    if (lead > 0) {
        coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
        valuation_ += static_cast<std::int64_t>(lead);
    }
    while (!coeffs_.empty() && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
    if (coeffs_.empty()) {
        valuation_ = 0;
    }
}

ZSeries ZSeries::zero(std::int64_t order) { return ZSeries({}, 0, order); }

ZSeries ZSeries::constant(double value) { return ZSeries({value}, 0, kUnbounded); }

ZSeries ZSeries::monomial(double coeff, std::int64_t exponent) {
    return ZSeries({coeff}, exponent, kUnbounded);
}

ZSeries ZSeries::from_coefficients(std::vector<double> coeffs, std::int64_t valuation,
                                   std::int64_t order) {
    return ZSeries(std::move(coeffs), valuation, order);
}

std::int64_t ZSeries::valuation() const {
    return coeffs_.empty() ? cap_add(order_, 1) : valuation_;
}

double ZSeries::coefficient(std::int64_t exponent) const {
    if (exponent > order_) {
        throw TruncationExceeded(exponent, order_);
    }
    if (coeffs_.empty() || exponent < valuation_) {
        return 0.0;
    }
    const std::int64_t idx = exponent - valuation_;
    if (idx >= static_cast<std::int64_t>(coeffs_.size())) {
        return 0.0;
    }
    return coeffs_[static_cast<std::size_t>(idx)];
}

ZSeries ZSeries::truncated(std::int64_t new_order) const {
    return ZSeries(coeffs_, valuation_, std::min(order_, new_order));
}

ZSeries ZSeries::shifted(std::int64_t delta) const {
    return ZSeries(coeffs_, valuation_ + delta, cap_add(order_, delta));
}

ZSeries ZSeries::tightened(double threshold) const {
    std::size_t lead = 0;
    while (lead < coeffs_.size() && std::abs(coeffs_[lead]) <= threshold) {
        ++lead;
    }
    std::vector<double> rest(coeffs_.begin() + static_cast<std::ptrdiff_t>(lead),
                             coeffs_.end());
    return ZSeries(std::move(rest), valuation_ + static_cast<std::int64_t>(lead), order_);
}

ZSeries ZSeries::pow(int exponent) const {
    if (exponent < 0) {
        throw ValidationError("series power requires a nonnegative exponent");
    }
    ZSeries result = ZSeries::constant(1.0);
    for (int i = 0; i < exponent; ++i) {
        result = result * *this;
    }
    return result;
}

ZSeries ZSeries::operator-() const {
    std::vector<double> neg(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        neg[i] = -coeffs_[i];
    }
    return ZSeries(std::move(neg), valuation_, order_);
}

ZSeries operator+(const ZSeries& a, const ZSeries& b) {
    const std::int64_t ord = std::min(a.order_, b.order_);
    if (a.is_zero()) {
        return b.truncated(ord);
    }
    if (b.is_zero()) {
        return a.truncated(ord);
    }
    const std::int64_t lo = std::min(a.valuation_, b.valuation_);
    const std::int64_t top_a = a.valuation_ + static_cast<std::int64_t>(a.coeffs_.size()) - 1;
    const std::int64_t top_b = b.valuation_ + static_cast<std::int64_t>(b.coeffs_.size()) - 1;
    const std::int64_t hi = std::min(std::max(top_a, top_b), ord);
    if (hi < lo) {
        return ZSeries::zero(ord);
    }
    std::vector<double> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        const std::int64_t k = a.valuation_ + static_cast<std::int64_t>(i);
        if (k > hi) {
            break;
        }
        out[static_cast<std::size_t>(k - lo)] += a.coeffs_[i];
    }
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) {
        const std::int64_t k = b.valuation_ + static_cast<std::int64_t>(i);
        if (k > hi) {
            break;
        }
        out[static_cast<std::size_t>(k - lo)] += b.coeffs_[i];
    }
    return ZSeries(std::move(out), lo, ord);
}

ZSeries operator-(const ZSeries& a, const ZSeries& b) { return a + (-b); }

ZSeries operator*(const ZSeries& a, const ZSeries& b) {
    const std::int64_t va = a.valuation();
    const std::int64_t vb = b.valuation();
    const std::int64_t rel = std::min(a.order_ - va, b.order_ - vb);
    const std::int64_t ord = cap_add(cap_add(va, vb), rel);
    if (a.is_zero() || b.is_zero()) {
        return ZSeries::zero(ord);
    }
    const std::int64_t lo = a.valuation_ + b.valuation_;
    const std::int64_t full_top =
        lo + static_cast<std::int64_t>(a.coeffs_.size() + b.coeffs_.size()) - 2;
    const std::int64_t hi = std::min(full_top, ord);
    if (hi < lo) {
        return ZSeries::zero(ord);
    }
    std::vector<double> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        if (static_cast<std::int64_t>(i) > hi - lo) {
            break;
        }
        const std::size_t jmax =
            std::min(b.coeffs_.size(), static_cast<std::size_t>(hi - lo) - i + 1);
        for (std::size_t j = 0; j < jmax; ++j) {
            out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return ZSeries(std::move(out), lo, ord);
}

ZSeries operator/(const ZSeries& a, const ZSeries& b) {
    const ZSeries d = b.tightened();
    if (d.is_zero()) {
        throw DivisionByZeroSeries();
    }
    const std::int64_t vd = d.valuation_;
    if (a.is_zero()) {
        const std::int64_t ord =
            a.order_ >= ZSeries::kUnbounded ? ZSeries::kUnbounded : a.order_ - vd;
        return ZSeries::zero(ord);
    }
    if (d.coeffs_.size() == 1) {
        // Monomial divisor: exact shift and scale.
        return a.shifted(-vd) * (1.0 / d.coeffs_[0]);
    }
    const std::int64_t rel = std::min(a.order_ - a.valuation_, d.order_ - vd);
    if (rel >= ZSeries::kUnbounded) {
        throw ComputeError("series division needs a truncated operand");
    }
    const std::int64_t qval = a.valuation_ - vd;
    const std::int64_t ord = cap_add(qval, rel);
    const std::size_t count = static_cast<std::size_t>(ord - qval + 1);
    const double lead = d.coeffs_[0];
    const auto num_at = [&](std::int64_t k) -> double {
        const std::int64_t idx = k - a.valuation_;
        if (idx < 0 || idx >= static_cast<std::int64_t>(a.coeffs_.size())) {
            return 0.0;
        }
        return a.coeffs_[static_cast<std::size_t>(idx)];
    };
    std::vector<double> q(count, 0.0);
    for (std::size_t m = 0; m < count; ++m) {
        double acc = num_at(a.valuation_ + static_cast<std::int64_t>(m));
        const std::size_t jmax = std::min(d.coeffs_.size(), m + 1);
        for (std::size_t j = 1; j < jmax; ++j) {
            acc -= d.coeffs_[j] * q[m - j];
        }
        q[m] = acc / lead;
    }
    return ZSeries(std::move(q), qval, ord);
}

ZSeries operator*(const ZSeries& a, double s) {
    std::vector<double> out(a.coeffs_.size());
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        out[i] = a.coeffs_[i] * s;
    }
    return ZSeries(std::move(out), a.valuation_, a.order_);
}

}  // namespace loctime
