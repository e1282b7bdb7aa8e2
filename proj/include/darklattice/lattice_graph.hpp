#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "darklattice/basis.hpp"
#include "darklattice/hamiltonian.hpp"

namespace darklattice {

/// Fock-state lattice: nodes are basis states, edges the transition channels
/// of the coupling matrix.
struct LatticeNode {
    std::string state;
    Sector sector;
    double energy;  // diagonal entry
};

struct LatticeEdge {
    std::size_t upper;   // node index
    std::size_t lower;   // node index
    double amplitude;    // g_j * sqrt(n_j' + 1)
    int mode;            // 1-based mode label j
};

struct LatticeGraph {
    SubspaceSpec spec;
    std::vector<LatticeNode> nodes;  // uppers first, then lowers
    std::vector<LatticeEdge> edges;
};

inline LatticeGraph build_lattice_graph(const BlockHamiltonian& bh, const SubspaceBasis& basis) {
    if (basis.spec() != bh.spec) throw std::invalid_argument("build_lattice_graph: spec mismatch");
    LatticeGraph g;
    g.spec = bh.spec;
    for (std::size_t i = 0; i < basis.upper_size(); ++i)
        g.nodes.push_back({basis.upper()[i].str(), Sector::upper,
                           bh.upper_diag(static_cast<Eigen::Index>(i))});
    for (std::size_t l = 0; l < basis.lower_size(); ++l)
        g.nodes.push_back({basis.lower()[l].str(), Sector::lower,
                           bh.lower_diag(static_cast<Eigen::Index>(l))});
    std::vector<int> target;
    for (std::size_t i = 0; i < basis.upper_size(); ++i) {
        target = basis.upper()[i].occupations;
        for (int j = 0; j < bh.spec.modes; ++j) {
            target[static_cast<std::size_t>(j)] += 1;
            const std::size_t l = basis.lower_index(target);
            const double amp = bh.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
            if (amp != 0.0) g.edges.push_back({i, basis.upper_size() + l, amp, j + 1});
            target[static_cast<std::size_t>(j)] -= 1;
        }
    }
    return g;
}

/// Graphviz dialect, undirected rendering (dir=none); box nodes for the upper
/// sector, circles for the lower one; amplitudes to 6 significant digits.
/// Byte-deterministic for a given graph.
inline std::string to_dot(const LatticeGraph& g) {
    std::string out = "digraph fsl {\n  edge [dir=none];\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        out += "  n" + std::to_string(i) + " [label=\"" + g.nodes[i].state + "\" shape=" +
               (g.nodes[i].sector == Sector::upper ? "box" : "circle") + "];\n";
    }
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%.6g", e.amplitude);
        out += "  n" + std::to_string(e.upper) + " -> n" + std::to_string(e.lower) + " [label=\"" +
               buf + "\" tooltip=\"mode " + std::to_string(e.mode) + "\"];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace darklattice
