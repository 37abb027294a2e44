#include "loctime/closed_forms.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace loctime {

namespace {

constexpr std::int64_t kMaxSeriesOrder = std::int64_t{1} << 20;

int checked_order(std::int64_t order) {
    if (order < 0 || order > kMaxSeriesOrder) {
        throw ValidationError("series order " + std::to_string(order) + " out of range");
    }
    return static_cast<int>(order);
}

void check_complete_size(int N) {
    if (N < 2) {
        throw ValidationError("complete graph needs at least 2 vertices, got " +
                              std::to_string(N));
    }
}

void check_star_size(int N) {
    if (N < 1) {
        throw ValidationError("star graph needs at least 1 peripheral vertex, got " +
                              std::to_string(N));
    }
}

void check_z(double z) {
    if (!(z > 1.0)) {
        throw SingularSystem(z);
    }
}

Eigen::MatrixXd star_matrix(int N) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int i = 1; i <= N; ++i) {
        P(0, i) = 1.0 / N;
        P(i, 0) = 1.0;
    }
    return P;
}

TransitionMatrix build_window(int radius) {
    if (radius < 1) {
        throw ValidationError("window radius must be positive, got " +
                              std::to_string(radius));
    }
    const int size = 2 * radius + 1;
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(size, size);
    for (int i = 1; i < size - 1; ++i) {
        weights(i, i - 1) = 1.0;
        weights(i, i + 1) = 1.0;
    }
    weights(0, 1) = 1.0;
    weights(size - 1, size - 2) = 1.0;
    return TransitionMatrix::from_adjacency(weights);
}

}  // namespace

TransitionMatrix complete_graph(int N) {
    check_complete_size(N);
    Eigen::MatrixXd weights = Eigen::MatrixXd::Ones(N, N);
    weights.diagonal().setZero();
    return TransitionMatrix::from_adjacency(weights);
}

TransitionMatrix star_graph(int N) {
    check_star_size(N);
    return TransitionMatrix::validate_stochastic(star_matrix(N));
}

LineWindow::LineWindow(int radius) : radius_(radius), P_(build_window(radius)) {}

int LineWindow::index(long coordinate) const {
    if (coordinate < -static_cast<long>(radius_) ||
        coordinate > static_cast<long>(radius_)) {
        throw ValidationError("coordinate " + std::to_string(coordinate) +
                              " outside window of radius " + std::to_string(radius_));
    }
    return static_cast<int>(coordinate) + radius_;
}

long LineWindow::coordinate(int index) const {
    if (index < 0 || index >= P_.size()) {
        throw ValidationError("index " + std::to_string(index) + " outside window");
    }
    return static_cast<long>(index) - radius_;
}

bool LineWindow::exact_for(long start, int horizon) const {
    const long reach = (start < 0 ? -start : start) + static_cast<long>(horizon);
    return reach <= static_cast<long>(radius_);
}

double complete_resolvent(int N, double z, int va, int vb) {
    check_complete_size(N);
    check_z(z);
    if (va < 0 || va >= N || vb < 0 || vb >= N) {
        throw ValidationError("vertex out of range for complete graph");
    }
    const double diagonal = (va == vb) ? static_cast<double>(N - 1) : 0.0;
    return -(diagonal + 1.0 / (z - 1.0)) / (1.0 + z * (N - 1));
}

double complete_mean_local_time(int N, int n, bool at_start) {
    check_complete_size(N);
    if (n < 0) {
        throw ValidationError("horizon must be nonnegative, got " + std::to_string(n));
    }
    if (at_start) {
        // The first possible visit to the start is one step later, which
        // shifts the whole curve by one step.
        return n == 0 ? 0.0 : complete_mean_local_time(N, n - 1, false);
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double ripple = sign / (N * std::pow(static_cast<double>(N - 1), n));
    return (static_cast<double>(n) + 1.0 / N - ripple) / N;
}

Eigen::MatrixXd star_resolvent(int N, double z) {
    check_star_size(N);
    check_z(z);
    const Eigen::MatrixXd P = star_matrix(N);
    const int size = N + 1;
    const double pole = 1.0 - z * z;
    return -Eigen::MatrixXd::Identity(size, size) / z + P / pole +
           (P * P) / (z * pole);
}

double star_limiting_fraction(int N, bool center) {
    check_star_size(N);
    return center ? 0.5 : 0.5 / N;
}

double line_resolvent(double z, long delta) {
    check_z(z);
    const double root = std::sqrt(z * z - 1.0);
    const double distance = static_cast<double>(delta < 0 ? -delta : delta);
    return -std::pow(z - root, distance) / root;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    if (n <= 62) {
        // Incremental products stay integral and fit 64 bits through n = 62.
        unsigned long long c = 1;
        const int span = std::min(k, n - k);
        for (int i = 1; i <= span; ++i) {
            c = c * static_cast<unsigned long long>(n - span + i) /
                static_cast<unsigned long long>(i);
        }
        return static_cast<double>(c);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(n - k + 1.0));
}

double line_zero_visit(int n) {
    if (n < 0) {
        throw ValidationError("horizon must be nonnegative, got " + std::to_string(n));
    }
    const int m = n / 2;
    if (m <= 30) {
        return binomial(2 * m, m) / std::ldexp(1.0, 2 * m);
    }
    return std::exp(std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) -
                    m * std::log(4.0));
}

double line_distribution_z(int ell, double z) {
    if (ell < 0) {
        throw ValidationError("visit count must be nonnegative, got " +
                              std::to_string(ell));
    }
    check_z(z);
    const double root = std::sqrt(z * z - 1.0);
    return std::sqrt(z + 1.0) / std::sqrt(z - 1.0) *
           std::pow(1.0 - root / z, static_cast<double>(ell));
}

ZSeries line_distribution_series(int ell, std::int64_t order) {
    if (ell < 0) {
        throw ValidationError("visit count must be nonnegative, got " +
                              std::to_string(ell));
    }
    const int n = checked_order(order);
    const int kmax = n / 2;
    // Binomial-series coefficients of sqrt(1 - x) and 1/sqrt(1 - x),
    // composed at x = w^2.
    std::vector<double> sqrt_coeffs(static_cast<std::size_t>(kmax) + 1, 1.0);
    std::vector<double> inv_sqrt_coeffs(static_cast<std::size_t>(kmax) + 1, 1.0);
    for (int k = 0; k < kmax; ++k) {
        sqrt_coeffs[static_cast<std::size_t>(k) + 1] =
            sqrt_coeffs[static_cast<std::size_t>(k)] * (k - 0.5) / (k + 1);
        inv_sqrt_coeffs[static_cast<std::size_t>(k) + 1] =
            inv_sqrt_coeffs[static_cast<std::size_t>(k)] * (k + 0.5) / (k + 1);
    }
    std::vector<double> inv_sqrt(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        inv_sqrt[static_cast<std::size_t>(2 * k)] =
            inv_sqrt_coeffs[static_cast<std::size_t>(k)];
    }
    // 1 - sqrt(1 - w^2), valuation 2.
    std::vector<double> deficit(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        deficit[static_cast<std::size_t>(2 * k)] =
            -sqrt_coeffs[static_cast<std::size_t>(k)];
    }
    const ZSeries front =
        ZSeries::from_coefficients({1.0, 1.0}, 0, ZSeries::kUnbounded) *
        ZSeries::from_coefficients(std::move(inv_sqrt), 0, order);
    const ZSeries base = ZSeries::from_coefficients(std::move(deficit), 0, order);
    return (front * base.pow(ell)).truncated(order);
}

}  // namespace loctime
