#include "loctime/resolvent.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
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

// 1/(1-z) = -sum_{k>=1} w^k; the value of <v|R|1> for every v.
ZSeries free_ket_series(std::int64_t order) {
    const int n = checked_order(order);
    return ZSeries::from_coefficients(std::vector<double>(static_cast<std::size_t>(n), -1.0),
                                      1, order);
}

// z/(z-1) = sum_{k>=0} w^k.
ZSeries geometric_ones(std::int64_t order) {
    const int n = checked_order(order);
    return ZSeries::from_coefficients(
        std::vector<double>(static_cast<std::size_t>(n) + 1, 1.0), 0, order);
}

double ipow(double base, int exponent) {
    double out = 1.0;
    for (int i = 0; i < exponent; ++i) {
        out *= base;
    }
    return out;
}

// Builds at increasing margins until every coefficient through w^order is
// known; divisions shrink the usable window by the divisor's valuation, so
// the required margin depends on the graph.
template <typename Build>
ZSeries assemble(std::int64_t order, Build build) {
    std::int64_t margin = 16;
    for (int attempt = 0; attempt < 8; ++attempt, margin *= 2) {
        const ZSeries candidate = build(order + margin);
        if (candidate.order() >= order) {
            return candidate.truncated(order);
        }
    }
    throw ComputeError("series assembly stalled below the requested order");
}

void check_endpoint(const TransitionMatrix& P, Endpoint endpoint) {
    if (!endpoint.is_free()) {
        check_vertex(P, endpoint.vertex());
    }
}

}  // namespace

ResolventSolver::ResolventSolver(TransitionMatrix P) : P_(std::move(P)) {}

const Eigen::MatrixXd& ResolventSolver::resolvent_matrix(double z) {
    if (!(z > 1.0)) {
        throw SingularSystem(z);
    }
    auto it = resolvent_cache_.find(z);
    if (it == resolvent_cache_.end()) {
        const int n = P_.size();
        const Eigen::MatrixXd shifted =
            P_.matrix() - z * Eigen::MatrixXd::Identity(n, n);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
        it = resolvent_cache_.emplace(z, lu.solve(Eigen::MatrixXd::Identity(n, n)))
                 .first;
    }
    return it->second;
}

double ResolventSolver::element(double z, int va, int vb) {
    check_vertex(P_, va);
    check_vertex(P_, vb);
    return resolvent_matrix(z)(va, vb);
}

double ResolventSolver::rp_element(double z, int va, int vb) {
    check_vertex(P_, va);
    check_vertex(P_, vb);
    auto it = rp_cache_.find(z);
    if (it == rp_cache_.end()) {
        it = rp_cache_.emplace(z, resolvent_matrix(z) * P_.matrix()).first;
    }
    return it->second(va, vb);
}

ZSeries ResolventSolver::element_series(int va, int vb, std::int64_t order) const {
    check_vertex(P_, va);
    check_vertex(P_, vb);
    const int n = checked_order(order);
    if (n == 0) {
        return ZSeries::zero(0);
    }
    const std::vector<double> brackets = bracket_sequence(P_, va, vb, n - 1);
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        coeffs[static_cast<std::size_t>(m)] = -brackets[static_cast<std::size_t>(m)];
    }
    return ZSeries::from_coefficients(std::move(coeffs), 1, order);
}

ZSeries ResolventSolver::rp_element_series(int va, int vb, std::int64_t order) const {
    check_vertex(P_, va);
    check_vertex(P_, vb);
    const int n = checked_order(order);
    if (n == 0) {
        return ZSeries::zero(0);
    }
    const std::vector<double> brackets = bracket_sequence(P_, va, vb, n);
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) {
        coeffs[static_cast<std::size_t>(m) - 1] = -brackets[static_cast<std::size_t>(m)];
    }
    return ZSeries::from_coefficients(std::move(coeffs), 1, order);
}

double resolvent_element(const TransitionMatrix& P, double z, int va, int vb) {
    ResolventSolver solver(P);
    return solver.element(z, va, vb);
}

double deformed_resolvent_element(const TransitionMatrix& P, double z, int v, double u,
                                  int va, int vb) {
    check_vertex(P, v);
    ResolventSolver solver(P);
    const double factor = 1.0 - std::exp(u);
    const double denominator = 1.0 - factor * solver.rp_element(z, v, v);
    if (std::abs(denominator) <= 1e-13) {
        throw DenominatorVanishes();
    }
    return solver.element(z, va, vb) +
           factor * solver.rp_element(z, va, v) * solver.element(z, v, vb) /
               denominator;
}

double mean_z(const TransitionMatrix& P, double z, int va, Endpoint endpoint, int v1) {
    check_endpoint(P, endpoint);
    ResolventSolver solver(P);
    if (endpoint.is_free()) {
        return z / (1.0 - z) * solver.rp_element(z, va, v1);
    }
    return z * solver.rp_element(z, va, v1) * solver.element(z, v1, endpoint.vertex());
}

ZSeries mean_z_series(const TransitionMatrix& P, int va, Endpoint endpoint, int v1,
                      std::int64_t order) {
    check_endpoint(P, endpoint);
    ResolventSolver solver(P);
    return assemble(order, [&](std::int64_t target) {
        const ZSeries rp = solver.rp_element_series(va, v1, target);
        if (endpoint.is_free()) {
            return -(geometric_ones(target) * rp);
        }
        const ZSeries tail = solver.element_series(v1, endpoint.vertex(), target);
        return (rp * tail).shifted(-1);
    });
}

double correlation_z(const TransitionMatrix& P, double z, int va, Endpoint endpoint,
                     int v1, int v2) {
    check_endpoint(P, endpoint);
    ResolventSolver solver(P);
    if (endpoint.is_free()) {
        return z * z / (z - 1.0) * solver.rp_element(z, va, v1) *
                   solver.element(z, v1, v2) +
               z / (z - 1.0) * solver.rp_element(z, va, v2) *
                   solver.rp_element(z, v2, v1);
    }
    const int vb = endpoint.vertex();
    return -z * z * solver.rp_element(z, va, v1) * solver.element(z, v1, v2) *
               solver.element(z, v2, vb) -
           z * solver.rp_element(z, va, v2) * solver.rp_element(z, v2, v1) *
               solver.element(z, v1, vb);
}

ZSeries correlation_z_series(const TransitionMatrix& P, int va, Endpoint endpoint,
                             int v1, int v2, std::int64_t order) {
    check_endpoint(P, endpoint);
    ResolventSolver solver(P);
    return assemble(order, [&](std::int64_t target) {
        const ZSeries rp_a1 = solver.rp_element_series(va, v1, target);
        const ZSeries rp_a2 = solver.rp_element_series(va, v2, target);
        const ZSeries r_12 = solver.element_series(v1, v2, target);
        const ZSeries rp_21 = solver.rp_element_series(v2, v1, target);
        if (endpoint.is_free()) {
            const ZSeries ones = geometric_ones(target);
            return (ones * rp_a1 * r_12).shifted(-1) + ones * rp_a2 * rp_21;
        }
        const int vb = endpoint.vertex();
        const ZSeries r_2b = solver.element_series(v2, vb, target);
        const ZSeries r_1b = solver.element_series(v1, vb, target);
        return -((rp_a1 * r_12 * r_2b).shifted(-2)) -
               (rp_a2 * rp_21 * r_1b).shifted(-1);
    });
}

double distribution_z(const TransitionMatrix& P, double z, int va, Endpoint endpoint,
                      int v, int ell) {
    check_endpoint(P, endpoint);
    check_vertex(P, v);
    if (ell < 0) {
        throw ValidationError("visit count must be nonnegative, got " +
                              std::to_string(ell));
    }
    ResolventSolver solver(P);
    const double r_vv = solver.element(z, v, v);
    const double rp_vv = solver.rp_element(z, v, v);
    if (rp_vv == 0.0) {
        throw DenominatorVanishes();
    }
    const double tail =
        endpoint.is_free() ? 1.0 / (1.0 - z) : solver.element(z, v, endpoint.vertex());
    const double common = solver.rp_element(z, va, v) * tail / rp_vv;
    const double ratio = ipow(rp_vv, ell) / (ipow(z, ell) * ipow(r_vv, ell + 1));
    double out = common * ratio;
    if (ell == 0) {
        const double r_ab = endpoint.is_free()
                                ? 1.0 / (1.0 - z)
                                : solver.element(z, va, endpoint.vertex());
        out += -z * r_ab + common * z;
    }
    return out;
}

ZSeries distribution_z_series(const TransitionMatrix& P, int va, Endpoint endpoint,
                              int v, int ell, std::int64_t order) {
    check_endpoint(P, endpoint);
    check_vertex(P, v);
    if (ell < 0) {
        throw ValidationError("visit count must be nonnegative, got " +
                              std::to_string(ell));
    }
    ResolventSolver solver(P);
    return assemble(order, [&](std::int64_t target) {
        const ZSeries r_vv = solver.element_series(v, v, target);
        const ZSeries rp_vv = solver.rp_element_series(v, v, target);
        const ZSeries tail = endpoint.is_free()
                                 ? free_ket_series(target)
                                 : solver.element_series(v, endpoint.vertex(), target);
        const ZSeries common =
            solver.rp_element_series(va, v, target) * tail / rp_vv;
        const ZSeries ratio = rp_vv.pow(ell).shifted(ell) / r_vv.pow(ell + 1);
        ZSeries out = common * ratio;
        if (ell == 0) {
            const ZSeries r_ab =
                endpoint.is_free()
                    ? free_ket_series(target)
                    : solver.element_series(va, endpoint.vertex(), target);
            out = out - r_ab.shifted(-1) + common.shifted(-1);
        }
        return out;
    });
}

KernelCoefficient geometric_kernel_coefficient(double alpha, int ell) {
    if (!(alpha < 0.5)) {
        throw ValidationError("alpha must be below 1/2, got " + std::to_string(alpha));
    }
    KernelCoefficient out;
    if (ell >= 0) {
        out.closed_form = -ipow(alpha, ell) / ipow(alpha - 1.0, ell + 1);
    }
    constexpr int kNodes = 4096;
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < kNodes; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / kNodes;
        const std::complex<double> integrand =
            std::exp(i * (phi * ell)) /
            (1.0 - alpha * (1.0 - std::exp(-i * phi)));
        acc += integrand;
    }
    out.quadrature = acc.real() / kNodes;
    return out;
}

}  // namespace loctime
