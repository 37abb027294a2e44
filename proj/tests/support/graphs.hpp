#pragma once

#include <Eigen/Dense>

#include "loctime/graph.hpp"
#include "loctime/rng.hpp"

// Shared graph fixtures. Random matrices keep every positive entry at or
// above 1/(2 * size), far over the series tighten threshold, so leading
// coefficients of return-probability series never get stripped.
namespace testsupport {

inline loctime::TransitionMatrix two_cycle() {
    Eigen::MatrixXd w(2, 2);
    w << 0, 1,
         1, 0;
    return loctime::TransitionMatrix::from_adjacency(w);
}

inline loctime::TransitionMatrix three_cycle() {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = 1.0;
    w(1, 2) = 1.0;
    w(2, 0) = 1.0;
    return loctime::TransitionMatrix::from_adjacency(w);
}

// Aperiodic three-vertex chain with unequal weights.
inline loctime::TransitionMatrix lazy_triangle() {
    Eigen::MatrixXd w(3, 3);
    w << 2, 1, 1,
         1, 3, 2,
         2, 1, 1;
    return loctime::TransitionMatrix::from_adjacency(w);
}

// Dense rows with entries drawn from [1, 2], then normalized; optionally
// thinned while keeping the cycle i -> i+1, which preserves strong
// connectivity.
inline loctime::TransitionMatrix random_walk_matrix(loctime::SplitMix64& rng, int size,
                                                    bool thin = false) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double raw = 1.0 + rng.uniform();
            if (!thin || j == (i + 1) % size || rng.uniform() < 0.6) {
                w(i, j) = raw;
            }
        }
    }
    return loctime::TransitionMatrix::from_adjacency(w);
}

}  // namespace testsupport
