#pragma once

#include <string>

#include "loctime/graph.hpp"

namespace loctime {

// On-disk graph: an edge list plus the interpretation of its weights.
// "stochastic" weights are probabilities validated as-is; otherwise they are
// raw weights normalized row by row.
struct GraphFile {
    Graph graph;
    bool stochastic = false;
};

// {"vertices": N, "edges": [{"from", "to", "weight"}...],
//  "mode": "adjacency" | "stochastic"}.
GraphFile parse_graph_json(const std::string& text);
GraphFile read_graph_json(const std::string& path);

// Dense adjacency matrix, one comma-separated row per line.
Graph parse_graph_csv(const std::string& text);
Graph read_graph_csv(const std::string& path);

TransitionMatrix to_transition(const GraphFile& file);

// Dispatches on the file extension (.json or .csv).
TransitionMatrix load_transition(const std::string& path);

// Probabilities as a stochastic-mode edge list; reloading yields the same
// matrix bit for bit.
std::string graph_to_json(const TransitionMatrix& P);
// Dense probability matrix; reloading renormalizes rows, so the round trip
// is only exact to row-sum rounding.
std::string graph_to_csv(const TransitionMatrix& P);

}  // namespace loctime
