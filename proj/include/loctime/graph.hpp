#pragma once

#include <Eigen/Dense>
#include <vector>

#include "loctime/errors.hpp"

namespace loctime {

// Edge-list description of a finite directed weighted graph. This is the
// input-side representation; computations run on TransitionMatrix.
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

struct Graph {
    int vertex_count = 0;
    std::vector<Edge> edges;

    // Throws GraphError on bad indices, duplicate (from, to) pairs, negative
    // weights, or a vertex with no positive outgoing weight.
    void validate() const;

    // Dense weight matrix; requires validate() to have passed.
    Eigen::MatrixXd weight_matrix() const;
};

// Row-stochastic matrix over a vertex set. Immutable once constructed; the
// factories are the only way in, so every instance satisfies the row-sum
// invariant.
class TransitionMatrix {
public:
    // Accepts a square matrix whose entries are >= 0 and whose rows sum to 1
    // within 1e-12. Rows outside a few ulps of 1 are renormalized.
    static TransitionMatrix validate_stochastic(const Eigen::MatrixXd& raw);

    // Row-normalizes a nonnegative weight matrix. Throws ZeroRow for a vertex
    // with no outgoing weight.
    static TransitionMatrix from_adjacency(const Eigen::MatrixXd& weights);

    int size() const { return static_cast<int>(entries_.rows()); }
    double operator()(int from, int to) const { return entries_(from, to); }
    const Eigen::MatrixXd& matrix() const { return entries_; }

private:
    explicit TransitionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    Eigen::MatrixXd entries_;
};

// Endpoint condition of a path ensemble: final vertex pinned or unspecified.
class Endpoint {
public:
    static Endpoint free() { return Endpoint(-1); }
    static Endpoint fixed(int vertex) { return Endpoint(vertex); }

    bool is_free() const { return vertex_ < 0; }
    int vertex() const { return vertex_; }

private:
    explicit Endpoint(int vertex) : vertex_(vertex) {}
    int vertex_;
};

struct EnsembleSpec {
    int start = 0;
    int horizon = 0;
    Endpoint endpoint = Endpoint::free();
};

void check_vertex(const TransitionMatrix& P, int vertex);
void check_spec(const TransitionMatrix& P, const EnsembleSpec& spec);

// True iff the digraph of strictly positive entries has a directed path
// between every ordered vertex pair.
bool strongly_connected(const TransitionMatrix& P);

// <from| P^n |to>.
double n_step_probability(const TransitionMatrix& P, int from, int to, int steps);

// Row vector e_from * P^n.
Eigen::RowVectorXd occupation_row(const TransitionMatrix& P, int from, int steps);

// <from| P^m |to> for m = 0..max_steps, one propagation pass.
std::vector<double> bracket_sequence(const TransitionMatrix& P, int from, int to,
                                     int max_steps);

}  // namespace loctime
