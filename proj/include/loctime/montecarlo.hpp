#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "loctime/exact.hpp"
#include "loctime/graph.hpp"
#include "loctime/rng.hpp"

namespace loctime {

struct SimulationConfig {
    std::uint64_t seed = 0;
    long long trials = 1;
    EnsembleSpec spec;
};

struct EstimateWithError {
    double mean = 0.0;
    double standard_error = 0.0;
    long long trials_used = 0;
};

// Statistics of one sampled profile the estimator can average.
struct MeanAt {
    int v1 = 0;
};
struct ProductAt {
    int v1 = 0;
    int v2 = 0;
};
struct IndicatorAt {
    int v = 0;
    long long ell = 0;
};
struct ZeroVisitAt {
    int v = 0;
};
using Functional = std::variant<MeanAt, ProductAt, IndicatorAt, ZeroVisitAt>;

// Inverse-CDF row sampler; cumulative rows built once per matrix.
class RowSampler {
public:
    explicit RowSampler(const TransitionMatrix& P);
    int size() const { return size_; }
    int step(int from, double u) const;

private:
    int size_;
    std::vector<double> cumulative_;
};

// n+1 vertices starting at va, each step drawn from the current row.
std::vector<int> sample_path(const RowSampler& rows, int va, int n,
                             SplitMix64& stream);

long long local_time_of_path(const std::vector<int>& path, int v);

// Empirical average of the functional over config.trials sampled paths.
// Fixed-endpoint configs condition by rejection: paths ending elsewhere are
// discarded and trials_used reports the accepted count (NoAcceptedPaths when
// none survive). The result is a deterministic function of (seed, trials,
// spec): trial i draws from substream(seed, i) and partial sums combine in a
// fixed block-pairwise order, so any thread count reproduces it bit for bit.
EstimateWithError estimate(const TransitionMatrix& P, const SimulationConfig& config,
                           const Functional& functional, int threads = 1);

}  // namespace loctime
