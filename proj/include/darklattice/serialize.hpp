#pragma once

#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "darklattice/basis.hpp"
#include "darklattice/dark_modes.hpp"
#include "darklattice/dark_states.hpp"
#include "darklattice/dynamics.hpp"
#include "darklattice/hamiltonian.hpp"
#include "darklattice/lattice_graph.hpp"
#include "darklattice/linalg.hpp"

namespace darklattice {

// All JSON uses insertion-ordered keys and carries the schema tag, so output
// is byte-deterministic and usable in golden-file tests.
using json = nlohmann::ordered_json;

inline constexpr const char* schema_tag = "darklattice/1";

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    auto& data = j["data"] = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return j;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    Eigen::MatrixXd m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != m.size())
        throw std::invalid_argument("matrix_from_json: data length mismatch");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++].get<double>();
    return m;
}

inline json spec_to_json(const SubspaceSpec& s) {
    return json{{"N", s.modes}, {"n", s.excitation}};
}

/// Vector sets reuse the matrix format: one column per vector.
inline json vector_set_to_json(const VectorSet& vs) {
    json j;
    j["schema"] = schema_tag;
    j["count"] = vs.vectors.size();
    j["orthonormal"] = vs.orthonormal;
    j["matrix"] = matrix_to_json(vs.as_matrix());
    return j;
}

inline json block_hamiltonian_to_json(const BlockHamiltonian& bh) {
    json j;
    j["schema"] = schema_tag;
    j["spec"] = spec_to_json(bh.spec);
    j["frame"] = bh.frame == Frame::lab ? "lab" : "rotating";
    json u = json::array(), l = json::array();
    for (Eigen::Index i = 0; i < bh.upper_diag.size(); ++i) u.push_back(bh.upper_diag(i));
    for (Eigen::Index i = 0; i < bh.lower_diag.size(); ++i) l.push_back(bh.lower_diag(i));
    j["U"] = std::move(u);
    j["L"] = std::move(l);
    j["C"] = matrix_to_json(bh.coupling);
    return j;
}

inline json dark_state_set_to_json(const DarkStateSet& ds, const SubspaceBasis& basis) {
    if (basis.spec() != ds.spec)
        throw std::invalid_argument("dark_state_set_to_json: basis/spec mismatch");
    json j;
    j["schema"] = schema_tag;
    j["spec"] = spec_to_json(ds.spec);
    j["count"] = ds.vectors.vectors.size();
    j["normalized"] = ds.normalized;
    auto& states = j["dark_states"] = json::array();
    for (std::size_t k = 0; k < ds.vectors.vectors.size(); ++k) {
        json entry;
        const auto& label = ds.labels.at(k);
        entry["label"] = label.kind == DarkLabelKind::closed_form ? "closed-form" : "numeric";
        if (label.kind == DarkLabelKind::closed_form) entry["p"] = label.p;
        json coeffs;
        const auto& v = ds.vectors.vectors[k];
        for (std::size_t l = 0; l < basis.lower_size(); ++l)
            coeffs[basis.lower()[l].str()] = v(static_cast<Eigen::Index>(l));
        entry["coefficients"] = std::move(coeffs);
        states.push_back(std::move(entry));
    }
    return j;
}

inline json darkness_report_to_json(const DarknessReport& rep) {
    json j;
    j["schema"] = schema_tag;
    j["annihilation_residual"] = rep.annihilation_residual;
    j["annihilation_pass"] = rep.annihilation_pass;
    j["eigen_residual"] = rep.eigen_residual;
    j["eigen_pass"] = rep.eigen_pass;
    j["detunings_degenerate"] = rep.detunings_degenerate;
    j["expected_eigenvalue"] = rep.expected_eigenvalue;
    j["gram_deviation"] = rep.gram_deviation;
    j["gram_pass"] = rep.gram_pass;
    j["upper_leakage"] = rep.upper_leakage;
    j["pass"] = rep.pass();
    return j;
}

inline json lattice_graph_to_json(const LatticeGraph& g) {
    json j;
    j["schema"] = schema_tag;
    j["spec"] = spec_to_json(g.spec);
    auto& nodes = j["nodes"] = json::array();
    for (const auto& n : g.nodes)
        nodes.push_back(json{{"state", n.state},
                             {"sector", n.sector == Sector::upper ? "upper" : "lower"},
                             {"energy", n.energy}});
    auto& edges = j["edges"] = json::array();
    for (const auto& e : g.edges)
        edges.push_back(
            json{{"upper", e.upper}, {"lower", e.lower}, {"amplitude", e.amplitude}, {"mode", e.mode}});
    return j;
}

/// Aligned plain-text matrix dump for golden tests.
inline std::string matrix_to_text(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << std::setprecision(12);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) os << std::setw(18) << m(r, c);
        os << '\n';
    }
    return os.str();
}

/// CSV trajectory: time, per-state |amplitude|^2, norm, dark overlap.
inline std::string trajectory_to_csv(const Trajectory& traj, const SubspaceBasis& basis,
                                     const std::vector<double>& dark_overlap = {}) {
    if (!dark_overlap.empty() && dark_overlap.size() != traj.times.size())
        throw std::invalid_argument("trajectory_to_csv: overlap series length mismatch");
    std::ostringstream os;
    os << std::setprecision(17);
    os << "time";
    for (const auto& s : basis.upper()) os << ",p(" << s.str() << ")";
    for (const auto& s : basis.lower()) os << ",p(" << s.str() << ")";
    os << ",norm";
    if (!dark_overlap.empty()) os << ",dark_overlap";
    os << '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        const auto& psi = traj.states[i];
        for (Eigen::Index k = 0; k < psi.size(); ++k) os << ',' << std::norm(psi(k));
        os << ',' << psi.norm();
        if (!dark_overlap.empty()) os << ',' << dark_overlap[i];
        os << '\n';
    }
    return os.str();
}

}  // namespace darklattice
