#include "loctime/exact.hpp"

#include <cstddef>

namespace loctime {

namespace {

void check_horizon(int n) {
    if (n < 0) {
        throw ValidationError("horizon must be nonnegative, got " + std::to_string(n));
    }
}

// Convolution D(t) = sum over j = 1..t of b[j] * c[t-j], for t = 0..n.
std::vector<double> inner_convolution(const std::vector<double>& b,
                                      const std::vector<double>& c, int n) {
    std::vector<double> d(static_cast<std::size_t>(n) + 1, 0.0);
    for (int t = 1; t <= n; ++t) {
        double acc = 0.0;
        for (int j = 1; j <= t; ++j) {
            acc += b[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(t - j)];
        }
        d[static_cast<std::size_t>(t)] = acc;
    }
    return d;
}

}  // namespace

LocalTimeProfile profile_from_path(const std::vector<int>& path, int vertex_count) {
    if (path.empty()) {
        throw ValidationError("path must contain at least the start vertex");
    }
    LocalTimeProfile profile;
    profile.horizon = static_cast<int>(path.size()) - 1;
    profile.counts.assign(static_cast<std::size_t>(vertex_count), 0);
    for (std::size_t m = 1; m < path.size(); ++m) {
        const int v = path[m];
        if (v < 0 || v >= vertex_count) {
            throw ValidationError("path vertex " + std::to_string(v) + " out of range");
        }
        ++profile.counts[static_cast<std::size_t>(v)];
    }
    return profile;
}

double DistributionTable::total() const {
    double sum = 0.0;
    for (double m : mass) {
        sum += m;
    }
    return sum;
}

DistributionTable DistributionTable::normalized() const {
    const double sum = total();
    if (sum <= 0.0) {
        throw ZeroNormalization();
    }
    DistributionTable out = *this;
    for (double& m : out.mass) {
        m /= sum;
    }
    return out;
}

double mean_local_time_free(const TransitionMatrix& P, int va, int v1, int n) {
    check_vertex(P, va);
    check_vertex(P, v1);
    check_horizon(n);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(P.size());
    row(va) = 1.0;
    double acc = 0.0;
    for (int m = 1; m <= n; ++m) {
        row = row * P.matrix();
        acc += row(v1);
    }
    return acc;
}

double mean_local_time_fixed(const TransitionMatrix& P, int va, int vb, int v1, int n) {
    check_vertex(P, vb);
    check_horizon(n);
    const std::vector<double> a = bracket_sequence(P, va, v1, n);
    const std::vector<double> c = bracket_sequence(P, v1, vb, n);
    double acc = 0.0;
    for (int m = 1; m <= n; ++m) {
        acc += a[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(n - m)];
    }
    return acc;
}

double correlation_free(const TransitionMatrix& P, int va, int v1, int v2, int n) {
    check_vertex(P, va);
    check_vertex(P, v1);
    check_vertex(P, v2);
    check_horizon(n);
    const std::vector<double> a1 = bracket_sequence(P, va, v1, n);
    const std::vector<double> a2 = bracket_sequence(P, va, v2, n);
    const std::vector<double> b12 = bracket_sequence(P, v1, v2, n);
    const std::vector<double> b21 = bracket_sequence(P, v2, v1, n);
    // Suffix factor: with a free endpoint the walk after the later visit
    // contributes weight 1, so only visit-order matters.
    double acc = 0.0;
    double tail12 = 0.0;
    double tail21 = 0.0;
    for (int m = n - 1; m >= 1; --m) {
        tail12 += b12[static_cast<std::size_t>(n - m)];
        tail21 += b21[static_cast<std::size_t>(n - m)];
        acc += a1[static_cast<std::size_t>(m)] * tail12;
        acc += a2[static_cast<std::size_t>(m)] * tail21;
    }
    if (v1 == v2) {
        for (int m = 1; m <= n; ++m) {
            acc += a1[static_cast<std::size_t>(m)];
        }
    }
    return acc;
}

double correlation_fixed(const TransitionMatrix& P, int va, int vb, int v1, int v2,
                         int n) {
    check_vertex(P, vb);
    check_horizon(n);
    const std::vector<double> a1 = bracket_sequence(P, va, v1, n);
    const std::vector<double> a2 = bracket_sequence(P, va, v2, n);
    const std::vector<double> b12 = bracket_sequence(P, v1, v2, n);
    const std::vector<double> b21 = bracket_sequence(P, v2, v1, n);
    const std::vector<double> c1 = bracket_sequence(P, v1, vb, n);
    const std::vector<double> c2 = bracket_sequence(P, v2, vb, n);
    // d2(t) carries "visit v2 after j more steps, then reach vb in t-j".
    const std::vector<double> d2 = inner_convolution(b12, c2, n);
    const std::vector<double> d1 = inner_convolution(b21, c1, n);
    double acc = 0.0;
    for (int m = 1; m <= n - 1; ++m) {
        acc += a1[static_cast<std::size_t>(m)] * d2[static_cast<std::size_t>(n - m)];
        acc += a2[static_cast<std::size_t>(m)] * d1[static_cast<std::size_t>(n - m)];
    }
    if (v1 == v2) {
        for (int m = 1; m <= n; ++m) {
            acc += a1[static_cast<std::size_t>(m)] * c1[static_cast<std::size_t>(n - m)];
        }
    }
    return acc;
}

double zero_visit_probability(const TransitionMatrix& P, int va, Endpoint endpoint,
                              int v, int n) {
    check_vertex(P, va);
    check_vertex(P, v);
    if (!endpoint.is_free()) {
        check_vertex(P, endpoint.vertex());
    }
    check_horizon(n);
    Eigen::MatrixXd blocked = P.matrix();
    blocked.col(v).setZero();
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(P.size());
    row(va) = 1.0;
    for (int m = 0; m < n; ++m) {
        row = row * blocked;
    }
    return endpoint.is_free() ? row.sum() : row(endpoint.vertex());
}

DistributionTable local_time_distribution_exact(const TransitionMatrix& P, int va,
                                                Endpoint endpoint, int v, int n,
                                                int lmax) {
    check_vertex(P, va);
    check_vertex(P, v);
    if (!endpoint.is_free()) {
        check_vertex(P, endpoint.vertex());
    }
    check_horizon(n);
    if (lmax < 0) {
        throw ValidationError("lmax must be nonnegative, got " + std::to_string(lmax));
    }
    const int size = P.size();
    const int buckets = lmax + 1;
    const auto idx = [buckets](int w, int c) {
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(buckets) +
               static_cast<std::size_t>(c);
    };
    std::vector<double> state(static_cast<std::size_t>(size) * buckets, 0.0);
    std::vector<double> next(state.size(), 0.0);
    state[idx(va, 0)] = 1.0;
    for (int m = 0; m < n; ++m) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int w = 0; w < size; ++w) {
            for (int c = 0; c < buckets; ++c) {
                const double weight = state[idx(w, c)];
                if (weight == 0.0) {
                    continue;
                }
                for (int w2 = 0; w2 < size; ++w2) {
                    const double p = P(w, w2);
                    if (p == 0.0) {
                        continue;
                    }
                    const int c2 = (w2 == v) ? std::min(c + 1, lmax) : c;
                    next[idx(w2, c2)] += weight * p;
                }
            }
        }
        state.swap(next);
    }
    DistributionTable table;
    table.vertex = v;
    table.horizon = n;
    table.endpoint = endpoint;
    table.mass.assign(static_cast<std::size_t>(buckets), 0.0);
    table.top_bucket_saturated = lmax < n;
    for (int c = 0; c < buckets; ++c) {
        if (endpoint.is_free()) {
            double acc = 0.0;
            for (int w = 0; w < size; ++w) {
                acc += state[idx(w, c)];
            }
            table.mass[static_cast<std::size_t>(c)] = acc;
        } else {
            table.mass[static_cast<std::size_t>(c)] = state[idx(endpoint.vertex(), c)];
        }
    }
    return table;
}

double endpoint_weight(const TransitionMatrix& P, int va, int vb, int n) {
    check_horizon(n);
    return n_step_probability(P, va, vb, n);
}

double normalize_fixed(double unnormalized, const TransitionMatrix& P, int va, int vb,
                       int n) {
    const double weight = endpoint_weight(P, va, vb, n);
    if (weight <= 0.0) {
        throw ZeroNormalization();
    }
    return unnormalized / weight;
}

}  // namespace loctime
