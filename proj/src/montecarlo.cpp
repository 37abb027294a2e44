#include "loctime/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>

namespace loctime {

namespace {

// Trials are processed in fixed blocks; each block accumulates sequentially
// and the block partials combine in a fixed pairwise order, so the reduction
// result does not depend on how blocks are assigned to threads.
constexpr long long kBlockTrials = 4096;

struct Partial {
    double sum = 0.0;
    double sumsq = 0.0;
    long long count = 0;
};

Partial combine(const Partial& a, const Partial& b) {
    return Partial{a.sum + b.sum, a.sumsq + b.sumsq, a.count + b.count};
}

void validate_functional(const TransitionMatrix& P, const Functional& functional) {
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, MeanAt>) {
                check_vertex(P, f.v1);
            } else if constexpr (std::is_same_v<T, ProductAt>) {
                check_vertex(P, f.v1);
                check_vertex(P, f.v2);
            } else if constexpr (std::is_same_v<T, IndicatorAt>) {
                check_vertex(P, f.v);
                if (f.ell < 0) {
                    throw ValidationError("visit count must be nonnegative, got " +
                                          std::to_string(f.ell));
                }
            } else {
                check_vertex(P, f.v);
            }
        },
        functional);
}

double evaluate(const Functional& functional, const std::vector<int>& path) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, MeanAt>) {
                return static_cast<double>(local_time_of_path(path, f.v1));
            } else if constexpr (std::is_same_v<T, ProductAt>) {
                return static_cast<double>(local_time_of_path(path, f.v1)) *
                       static_cast<double>(local_time_of_path(path, f.v2));
            } else if constexpr (std::is_same_v<T, IndicatorAt>) {
                return local_time_of_path(path, f.v) == f.ell ? 1.0 : 0.0;
            } else {
                return local_time_of_path(path, f.v) == 0 ? 1.0 : 0.0;
            }
        },
        functional);
}

}  // namespace

RowSampler::RowSampler(const TransitionMatrix& P) : size_(P.size()) {
    cumulative_.resize(static_cast<std::size_t>(size_) * size_);
    for (int i = 0; i < size_; ++i) {
        double acc = 0.0;
        int last_positive = 0;
        for (int j = 0; j < size_; ++j) {
            acc += P(i, j);
            cumulative_[static_cast<std::size_t>(i) * size_ + j] = acc;
            if (P(i, j) > 0.0) {
                last_positive = j;
            }
        }
        // Pinning the tail at exactly 1 keeps every draw inside the support
        // even when the row sum rounds below 1.
        for (int j = last_positive; j < size_; ++j) {
            cumulative_[static_cast<std::size_t>(i) * size_ + j] = 1.0;
        }
    }
}

int RowSampler::step(int from, double u) const {
    const auto begin = cumulative_.begin() + static_cast<std::ptrdiff_t>(from) * size_;
    const auto end = begin + size_;
    return static_cast<int>(std::upper_bound(begin, end, u) - begin);
}

std::vector<int> sample_path(const RowSampler& rows, int va, int n,
                             SplitMix64& stream) {
    if (va < 0 || va >= rows.size()) {
        throw ValidationError("start vertex " + std::to_string(va) + " out of range");
    }
    if (n < 0) {
        throw ValidationError("horizon must be nonnegative, got " + std::to_string(n));
    }
    std::vector<int> path;
    path.reserve(static_cast<std::size_t>(n) + 1);
    path.push_back(va);
    int at = va;
    for (int m = 0; m < n; ++m) {
        at = rows.step(at, stream.uniform());
        path.push_back(at);
    }
    return path;
}

long long local_time_of_path(const std::vector<int>& path, int v) {
    long long count = 0;
    for (std::size_t m = 1; m < path.size(); ++m) {
        if (path[m] == v) {
            ++count;
        }
    }
    return count;
}

EstimateWithError estimate(const TransitionMatrix& P, const SimulationConfig& config,
                           const Functional& functional, int threads) {
    check_spec(P, config.spec);
    validate_functional(P, functional);
    if (config.trials < 1) {
        throw ValidationError("trials must be positive, got " +
                              std::to_string(config.trials));
    }
    if (threads < 1) {
        throw ValidationError("thread count must be positive, got " +
                              std::to_string(threads));
    }
    const RowSampler rows(P);
    const bool fixed = !config.spec.endpoint.is_free();
    const int vb = fixed ? config.spec.endpoint.vertex() : -1;
    const long long blocks = (config.trials + kBlockTrials - 1) / kBlockTrials;
    std::vector<Partial> partials(static_cast<std::size_t>(blocks));

    std::atomic<long long> next_block{0};
    const auto worker = [&]() {
        for (;;) {
            const long long b = next_block.fetch_add(1);
            if (b >= blocks) {
                return;
            }
            Partial local;
            const long long first = b * kBlockTrials;
            const long long last = std::min(config.trials, first + kBlockTrials);
            for (long long t = first; t < last; ++t) {
                SplitMix64 stream =
                    SplitMix64::substream(config.seed, static_cast<std::uint64_t>(t));
                const std::vector<int> path =
                    sample_path(rows, config.spec.start, config.spec.horizon, stream);
                if (fixed && path.back() != vb) {
                    continue;
                }
                const double value = evaluate(functional, path);
                local.sum += value;
                local.sumsq += value * value;
                ++local.count;
            }
            partials[static_cast<std::size_t>(b)] = local;
        }
    };

    if (threads == 1 || blocks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int width = static_cast<int>(
            std::min<long long>(threads, blocks));
        pool.reserve(static_cast<std::size_t>(width));
        for (int i = 0; i < width; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }

    while (partials.size() > 1) {
        std::vector<Partial> level((partials.size() + 1) / 2);
        for (std::size_t i = 0; i < level.size(); ++i) {
            level[i] = 2 * i + 1 < partials.size()
                           ? combine(partials[2 * i], partials[2 * i + 1])
                           : partials[2 * i];
        }
        partials.swap(level);
    }
    const Partial total = partials.front();
    if (total.count == 0) {
        throw NoAcceptedPaths();
    }
    EstimateWithError out;
    out.trials_used = total.count;
    out.mean = total.sum / static_cast<double>(total.count);
    if (total.count > 1) {
        const double centered =
            total.sumsq - total.sum * total.sum / static_cast<double>(total.count);
        const double variance =
            std::max(0.0, centered) / static_cast<double>(total.count - 1);
        out.standard_error = std::sqrt(variance / static_cast<double>(total.count));
    }
    return out;
}

}  // namespace loctime
