#pragma once

#include <cstdint>
#include <map>

#include "loctime/graph.hpp"
#include "loctime/zseries.hpp"

namespace loctime {

// Entry point for resolvent work in both evaluation modes: numeric z > 1
// (dense solve, factorization cached per z) and coefficient series in
// w = 1/z. Caches mutate on first use; share one solver per task, not
// across threads.
class ResolventSolver {
public:
    explicit ResolventSolver(TransitionMatrix P);

    const TransitionMatrix& transition() const { return P_; }

    // <va| (P - zI)^{-1} |vb>. Throws SingularSystem for z <= 1.
    double element(double z, int va, int vb);
    // <va| (P - zI)^{-1} P |vb>.
    double rp_element(double z, int va, int vb);
    const Eigen::MatrixXd& resolvent_matrix(double z);

    // Coefficient expansions in w = 1/z, known through w^order:
    // element: -sum_{m>=0} <va|P^m|vb> w^{m+1}
    // rp:      -sum_{m>=1} <va|P^m|vb> w^m
    ZSeries element_series(int va, int vb, std::int64_t order) const;
    ZSeries rp_element_series(int va, int vb, std::int64_t order) const;

private:
    TransitionMatrix P_;
    std::map<double, Eigen::MatrixXd> resolvent_cache_;
    std::map<double, Eigen::MatrixXd> rp_cache_;
};

double resolvent_element(const TransitionMatrix& P, double z, int va, int vb);

// Resolvent of P with the outgoing weights of v scaled by e^u, evaluated
// through the rank-one update formula. Throws DenominatorVanishes at the
// deformation pole.
double deformed_resolvent_element(const TransitionMatrix& P, double z, int v, double u,
                                  int va, int vb);

// Generating-function values of the local-time statistics. The numeric
// overloads evaluate at a real z > 1; the *_series overloads return the
// expansion whose w^n coefficient is the statistic at horizon n.
double mean_z(const TransitionMatrix& P, double z, int va, Endpoint endpoint, int v1);
ZSeries mean_z_series(const TransitionMatrix& P, int va, Endpoint endpoint, int v1,
                      std::int64_t order);

double correlation_z(const TransitionMatrix& P, double z, int va, Endpoint endpoint,
                     int v1, int v2);
ZSeries correlation_z_series(const TransitionMatrix& P, int va, Endpoint endpoint,
                             int v1, int v2, std::int64_t order);

// Visit-count distribution weight at count ell. Series mode throws
// DivisionByZeroSeries when v cannot return to itself.
double distribution_z(const TransitionMatrix& P, double z, int va, Endpoint endpoint,
                      int v, int ell);
ZSeries distribution_z_series(const TransitionMatrix& P, int va, Endpoint endpoint,
                              int v, int ell, std::int64_t order);

// Fourier coefficient of 1 / (1 - alpha (1 - e^{-i phi})) on the unit
// circle, computed two ways: trapezoidal quadrature with 4096 nodes and the
// closed form -alpha^ell / (alpha - 1)^{ell + 1} (zero for ell < 0).
// Requires alpha < 1/2, which keeps the integrand pole-free.
struct KernelCoefficient {
    double quadrature = 0.0;
    double closed_form = 0.0;
};
KernelCoefficient geometric_kernel_coefficient(double alpha, int ell);

}  // namespace loctime
