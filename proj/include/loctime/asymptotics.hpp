#pragma once

#include <functional>

#include "loctime/graph.hpp"

namespace loctime {

// Left eigenvector of P at eigenvalue 1, normalized to sum 1. Unique for
// strongly connected chains.
struct StationaryDistribution {
    Eigen::VectorXd pi;
};

// Solves the singular system (P^T - I) pi = 0 with the normalization row
// appended. A linear solve, not power iteration, so periodic chains work.
// Throws NotStronglyConnected when uniqueness is not guaranteed.
StationaryDistribution invariant_distribution(const TransitionMatrix& P);

// Max-norm distance between (1-z) R(z) at z = 1 + epsilon and the rank-one
// projection onto the stationary distribution. Requires epsilon in (0, 1/2].
double perron_limit_residual(const TransitionMatrix& P, double epsilon);

// Limit of f_n / n^k recovered from the generating function F(z) =
// sum_n f_n z^{-n}: evaluates (z-1)^(k+1) / k! * F(z) on the ladder
// z = 1 + 2^-4, 1 + 2^-6, ..., 1 + 2^-20 and Richardson-extrapolates in
// epsilon. Throws ExtrapolationDiverged when successive extrapolants fail to
// settle within 1e-7; the caller is responsible for the limit existing.
double final_value(const std::function<double(double)>& F, int k);

// lim_n <L(v1)>* / n = pi(v1); independent of the start vertex.
double limiting_local_time_fraction(const TransitionMatrix& P, int v1);

// lim_n <L(v1) L(v2)>* / n^2 = pi(v1) pi(v2).
double limiting_pair_fraction(const TransitionMatrix& P, int v1, int v2);

}  // namespace loctime
