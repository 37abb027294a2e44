#pragma once

#include <vector>

#include "loctime/graph.hpp"

namespace loctime {

// Visit counts of one walk. counts[v] is the number of steps m in 1..horizon
// with X_m = v; the start vertex X_0 is not counted, so the counts sum to
// horizon.
struct LocalTimeProfile {
    int horizon = 0;
    std::vector<int> counts;
};

LocalTimeProfile profile_from_path(const std::vector<int>& path, int vertex_count);

// Visit-count distribution at one vertex. mass[l] is the ensemble weight of
// walks with exactly l visits; with a fixed endpoint the weights are
// unnormalized and sum to <va| P^n |vb>. When top_bucket_saturated is set the
// last bucket aggregates every count >= lmax.
struct DistributionTable {
    int vertex = 0;
    int horizon = 0;
    Endpoint endpoint = Endpoint::free();
    std::vector<double> mass;
    bool top_bucket_saturated = false;

    double total() const;
    // Divides by total(); throws ZeroNormalization for an unreachable endpoint.
    DistributionTable normalized() const;
};

// All horizons are nonnegative step counts; every vertex argument is range
// checked. Fixed-endpoint results are unnormalized ensemble sums.

// Sum over m = 1..n of <va| P^m |v1>.
double mean_local_time_free(const TransitionMatrix& P, int va, int v1, int n);

// Sum over m = 1..n of <va| P^m |v1> <v1| P^(n-m) |vb>.
double mean_local_time_fixed(const TransitionMatrix& P, int va, int vb, int v1, int n);

// Double sum over step pairs of the joint visit weight; symmetric in
// (v1, v2), second moment when v1 == v2.
double correlation_free(const TransitionMatrix& P, int va, int v1, int v2, int n);
double correlation_fixed(const TransitionMatrix& P, int va, int vb, int v1, int v2,
                         int n);

// Weight of never standing on v during steps 1..n, propagated through P with
// column v zeroed.
double zero_visit_probability(const TransitionMatrix& P, int va, Endpoint endpoint,
                              int v, int n);

// Distribution of the visit count at v from the chain on (vertex, count)
// pairs with the count saturating at lmax.
DistributionTable local_time_distribution_exact(const TransitionMatrix& P, int va,
                                                Endpoint endpoint, int v, int n,
                                                int lmax);

// <va| P^n |vb>, the normalization of the fixed-endpoint ensemble.
double endpoint_weight(const TransitionMatrix& P, int va, int vb, int n);

// unnormalized / <va| P^n |vb>; throws ZeroNormalization when vb is
// unreachable in n steps.
double normalize_fixed(double unnormalized, const TransitionMatrix& P, int va, int vb,
                       int n);

}  // namespace loctime
