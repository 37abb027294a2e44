#include "loctime/graph_io.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace loctime {

namespace {

using nlohmann::json;

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open " + path);
    }
    return in;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

GraphFile parse_graph_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("graph JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges") ||
        !doc.contains("mode")) {
        throw ValidationError("graph JSON: expected object with vertices, edges, and mode");
    }
    GraphFile file;
    try {
        file.graph.vertex_count = doc.at("vertices").get<int>();
        for (const json& edge : doc.at("edges")) {
            file.graph.edges.push_back(Edge{edge.at("from").get<int>(),
                                            edge.at("to").get<int>(),
                                            edge.at("weight").get<double>()});
        }
        const std::string mode = doc.at("mode").get<std::string>();
        if (mode == "stochastic") {
            file.stochastic = true;
        } else if (mode == "adjacency") {
            file.stochastic = false;
        } else {
            throw ValidationError("graph JSON: mode must be adjacency or stochastic");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("graph JSON: ") + e.what());
    }
    file.graph.validate();
    return file;
}

GraphFile read_graph_json(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_graph_json(buffer.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Graph parse_graph_csv(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ValidationError("graph CSV: bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ValidationError("graph CSV: empty matrix");
    }
    const std::size_t n = rows.size();
    Graph graph;
    graph.vertex_count = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw ValidationError("graph CSV: row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " columns, expected " +
                                  std::to_string(n));
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (rows[i][j] != 0.0) {
                graph.edges.push_back(Edge{static_cast<int>(i), static_cast<int>(j),
                                           rows[i][j]});
            }
        }
    }
    graph.validate();
    return graph;
}

Graph read_graph_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_graph_csv(buffer.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

TransitionMatrix to_transition(const GraphFile& file) {
    file.graph.validate();
    const Eigen::MatrixXd weights = file.graph.weight_matrix();
    return file.stochastic ? TransitionMatrix::validate_stochastic(weights)
                           : TransitionMatrix::from_adjacency(weights);
}

TransitionMatrix load_transition(const std::string& path) {
    if (ends_with(path, ".json")) {
        return to_transition(read_graph_json(path));
    }
    if (ends_with(path, ".csv")) {
        GraphFile file;
        file.graph = read_graph_csv(path);
        file.stochastic = false;
        return to_transition(file);
    }
    throw ValidationError(path + ": unknown graph format, expected .json or .csv");
}

std::string graph_to_json(const TransitionMatrix& P) {
    json doc;
    doc["vertices"] = P.size();
    doc["mode"] = "stochastic";
    doc["edges"] = json::array();
    for (int i = 0; i < P.size(); ++i) {
        for (int j = 0; j < P.size(); ++j) {
            if (P(i, j) != 0.0) {
                doc["edges"].push_back({{"from", i}, {"to", j}, {"weight", P(i, j)}});
            }
        }
    }
    return doc.dump();
}

std::string graph_to_csv(const TransitionMatrix& P) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < P.size(); ++i) {
        for (int j = 0; j < P.size(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << P(i, j);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace loctime
