#pragma once

#include <cstdint>

#include "loctime/graph.hpp"
#include "loctime/zseries.hpp"

namespace loctime {

// Analytic results for three reference families: the complete graph on N
// vertices (uniform moves, no self loops), the star graph (center 0 with N
// peripheral vertices), and the unbiased walk on the integers.

TransitionMatrix complete_graph(int N);
// Center is vertex 0; peripheral vertices 1..N hop back to the center.
TransitionMatrix star_graph(int N);

// Finite slice [-radius, radius] of the integer line with reflecting ends.
// Time-domain queries are exact while the walker cannot reach an end.
class LineWindow {
public:
    explicit LineWindow(int radius);

    int radius() const { return radius_; }
    const TransitionMatrix& transition() const { return P_; }
    // Matrix index of a line coordinate; validated against the window.
    int index(long coordinate) const;
    long coordinate(int index) const;
    // True when an n-step walk from start cannot touch either end.
    bool exact_for(long start, int horizon) const;

private:
    int radius_;
    TransitionMatrix P_;
};

// <va| (P - zI)^{-1} |vb> on the complete graph:
// -((N-1) delta_ab + 1/(z-1)) / (1 + z(N-1)).
double complete_resolvent(int N, double z, int va, int vb);

// Free-endpoint mean visit count on the complete graph,
// (1/N) (n + 1/N - (-1)^n / (N (N-1)^n)) away from the start; the same
// expression one step earlier when the observed vertex is the start.
double complete_mean_local_time(int N, int n, bool at_start);

// Full (N+1) x (N+1) resolvent of the star graph, -I/z + P/(1-z^2)
// + P^2/(z(1-z^2)); P^3 = P collapses all higher powers.
Eigen::MatrixXd star_resolvent(int N, double z);

// Long-run fraction of time at a star vertex: 1/2 at the center, 1/(2N) at
// a peripheral vertex.
double star_limiting_fraction(int N, bool center);

// Translation-invariant line resolvent -(z - sqrt(z^2-1))^|delta|
// / sqrt(z^2-1) at signed displacement delta.
double line_resolvent(double z, long delta);

// Probability that the walk on the line has not returned to its start
// within n steps: C(2m, m)/4^m for n = 2m or 2m+1.
double line_zero_visit(int n);

// Generating-function value of the count-ell return distribution at the
// start of the line walk, sqrt(z+1)/sqrt(z-1) * (1 - sqrt(z^2-1)/z)^ell.
double line_distribution_z(int ell, double z);
// Same quantity expanded in w = 1/z through w^order; coefficient of w^n is
// the probability of exactly ell returns within n steps.
ZSeries line_distribution_series(int ell, std::int64_t order);

// C(n, k) with exact integer arithmetic up to n = 62, log-gamma beyond.
double binomial(int n, int k);

}  // namespace loctime
