#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "darklattice/config.hpp"
#include "darklattice/dark_modes.hpp"
#include "darklattice/dark_states.hpp"
#include "darklattice/dynamics.hpp"
#include "darklattice/lattice_graph.hpp"
#include "darklattice/serialize.hpp"

namespace darklattice {

// Exit-code contract: 0 success, 1 verification failure, 2 usage/config error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_verification_failure = 1;
inline constexpr int exit_usage_error = 2;

struct Artifact {
    std::string name;
    std::string content;
};

struct CommandResult {
    int exit_code = exit_ok;
    std::vector<Artifact> artifacts;
    std::string output;  // human-readable summary for stdout
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Write artifacts plus a manifest recording the command, the parameter hash
/// and per-file checksums. I/O errors are surfaced verbatim.
inline json persist(const std::vector<Artifact>& artifacts, const std::string& out_dir,
                    const std::string& command, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string config_dump = config_to_json(cfg).dump();
    json manifest;
    manifest["schema"] = schema_tag;
    manifest["command"] = command;
    manifest["config_hash"] = hex64(fnv1a64(command + "\n" + config_dump));
    auto& files = manifest["files"] = json::array();
    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream os(fs::path(out_dir) / name, std::ios::binary);
        if (!os) throw std::filesystem::filesystem_error(
            "cannot open for writing", fs::path(out_dir) / name,
            std::make_error_code(std::errc::permission_denied));
        os << content;
        if (!os) throw std::filesystem::filesystem_error(
            "write failed", fs::path(out_dir) / name, std::make_error_code(std::errc::io_error));
    };
    for (const auto& a : artifacts) {
        write_file(a.name, a.content);
        files.push_back(json{{"name", a.name},
                             {"bytes", a.content.size()},
                             {"checksum", hex64(fnv1a64(a.content))}});
    }
    write_file("manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

namespace detail {

inline SubspaceBasis make_basis(const RunConfig& cfg) {
    return SubspaceBasis(SubspaceSpec{cfg.model.modes, cfg.excitation});
}

/// Deterministic generic couplings for counting sweeps: evenly spaced in
/// [0.5, 2] so every g_j is nonzero and the matrix has no accidental symmetry.
inline std::vector<double> sweep_couplings(int modes) {
    std::vector<double> g(static_cast<std::size_t>(modes));
    for (int j = 0; j < modes; ++j)
        g[static_cast<std::size_t>(j)] =
            0.5 + (modes == 1 ? 0.0 : 1.5 * static_cast<double>(j) / (modes - 1));
    return g;
}

}  // namespace detail

inline CommandResult run_basis(const RunConfig& cfg) {
    const SubspaceBasis basis = detail::make_basis(cfg);
    CommandResult res;
    json j;
    j["schema"] = schema_tag;
    j["spec"] = spec_to_json(basis.spec());
    auto upper = json::array(), lower = json::array();
    std::ostringstream os;
    for (const auto& s : basis.upper()) {
        upper.push_back(s.str());
        os << "upper " << s.str() << '\n';
    }
    for (const auto& s : basis.lower()) {
        lower.push_back(s.str());
        os << "lower " << s.str() << '\n';
    }
    j["upper"] = std::move(upper);
    j["lower"] = std::move(lower);
    res.artifacts.push_back({"basis.json", j.dump(2) + "\n"});
    res.output = os.str();
    return res;
}

inline CommandResult run_hamiltonian(const RunConfig& cfg) {
    const SubspaceBasis basis = detail::make_basis(cfg);
    const BlockHamiltonian bh = assemble_blocks(basis, cfg.model, cfg.frame);
    CommandResult res;
    res.artifacts.push_back({"hamiltonian.json", block_hamiltonian_to_json(bh).dump(2) + "\n"});
    std::ostringstream os;
    os << "U diag: " << bh.upper_diag.transpose() << "\nL diag: " << bh.lower_diag.transpose()
       << "\nC:\n"
       << matrix_to_text(bh.coupling);
    res.output = os.str();
    return res;
}

inline CommandResult run_darkstates(const RunConfig& cfg) {
    const SubspaceBasis basis = detail::make_basis(cfg);
    const BlockHamiltonian bh = assemble_blocks(basis, cfg.model, cfg.frame);
    const DarkStateSet ds = solve_dark_states(bh, cfg.tol, {cfg.allow_nondegenerate});
    const DarknessReport rep = verify_dark(bh, ds, cfg.tol);
    CommandResult res;
    res.artifacts.push_back({"darkstates.json", dark_state_set_to_json(ds, basis).dump(2) + "\n"});
    res.artifacts.push_back({"report.json", darkness_report_to_json(rep).dump(2) + "\n"});
    std::ostringstream os;
    os << ds.vectors.size() << " dark states; annihilation residual " << rep.annihilation_residual
       << "; verification " << (rep.pass() ? "pass" : "FAIL") << '\n';
    res.output = os.str();
    if (!rep.pass()) res.exit_code = exit_verification_failure;
    return res;
}

/// Counting both ways (closed formula and SVD nullity); any mismatch is a
/// verification failure.
inline CommandResult run_count(const RunConfig& cfg) {
    CommandResult res;
    json j;
    j["schema"] = schema_tag;
    auto& rows = j["counts"] = json::array();
    std::ostringstream os;
    os << "  N \\ n";
    for (int n = cfg.count.excitation_min; n <= cfg.count.excitation_max; ++n) os << '\t' << n;
    os << '\n';
    bool mismatch = false;
    for (int modes = cfg.count.modes_min; modes <= cfg.count.modes_max; ++modes) {
        os << "  " << modes;
        const auto g = detail::sweep_couplings(modes);
        for (int n = cfg.count.excitation_min; n <= cfg.count.excitation_max; ++n) {
            const SubspaceBasis basis(SubspaceSpec{modes, n});
            ModelParams params;
            params.modes = modes;
            params.omega0 = 1.0;
            params.omegas.assign(static_cast<std::size_t>(modes), 1.0);
            params.couplings = g;
            const BlockHamiltonian bh = assemble_blocks(basis, params);
            const std::uint64_t formula = dark_state_count(modes, n);
            const std::uint64_t nullity =
                static_cast<std::uint64_t>(bh.coupling.cols() - numerical_rank(bh.coupling, cfg.tol));
            rows.push_back(json{{"N", modes}, {"n", n}, {"formula", formula}, {"nullity", nullity}});
            os << '\t' << formula;
            if (formula != nullity) {
                mismatch = true;
                os << "(!=" << nullity << ")";
            }
        }
        os << '\n';
    }
    j["mismatch"] = mismatch;
    res.artifacts.push_back({"count.json", j.dump(2) + "\n"});
    res.output = os.str();
    if (mismatch) res.exit_code = exit_verification_failure;
    return res;
}

inline CommandResult run_darkmodes(const RunConfig& cfg) {
    if (cfg.model.modes < 2)
        throw std::invalid_argument("darkmodes: need at least two modes");
    const SubspaceBasis basis = detail::make_basis(cfg);
    const BlockHamiltonian bh = assemble_blocks(basis, cfg.model, cfg.frame);
    const ModeTransform t = build_mode_transform(cfg.model.couplings);
    const DarkModeBasisMatrix b = dark_mode_fock_states(t, cfg.excitation);
    const VectorSet a_raw = null_space_echelon(bh.coupling, cfg.tol);
    const QrRelationReport qr = qr_relation(a_raw.as_matrix(), b);
    const DarkStateSet numeric = solve_dark_states(bh, cfg.tol, {cfg.allow_nondegenerate});
    const ProjectorDistance equiv = equivalence_check(numeric, b, cfg.tol);
    const TransformedCouplingReport coupling_rep =
        transformed_hamiltonian_check(cfg.model, t, cfg.allow_nondegenerate);

    CommandResult res;
    json j;
    j["schema"] = schema_tag;
    j["spec"] = spec_to_json(bh.spec);
    j["T"] = matrix_to_json(t.rows);
    j["B"] = matrix_to_json(b.columns);
    j["R"] = matrix_to_json(qr.r);
    res.artifacts.push_back({"darkmodes.json", j.dump(2) + "\n"});
    json rep;
    rep["schema"] = schema_tag;
    rep["qr_reconstruction_residual"] = qr.reconstruction_residual;
    rep["qr_upper_triangular"] = qr.upper_triangular;
    rep["projector_distance_spectral"] = equiv.spectral;
    rep["projector_distance_frobenius"] = equiv.frobenius;
    rep["bright_coupling"] = coupling_rep.bright_coupling;
    rep["bright_coupling_expected"] = coupling_rep.bright_coupling_expected;
    rep["max_dark_coupling"] = coupling_rep.max_dark_coupling;
    const bool pass = qr.pass && equiv.spectral <= 1e-9 && coupling_rep.pass;
    rep["pass"] = pass;
    res.artifacts.push_back({"report.json", rep.dump(2) + "\n"});
    std::ostringstream os;
    os << "A=BR residual " << qr.reconstruction_residual << "; projector distance " << equiv.spectral
       << "; equivalence " << (pass ? "pass" : "FAIL") << '\n';
    res.output = os.str();
    if (!pass) res.exit_code = exit_verification_failure;
    return res;
}

inline CommandResult run_stirap(const RunConfig& cfg) {
    if (cfg.model.modes != 2)
        throw std::invalid_argument("stirap: two-mode model required");
    if (!detail::detunings_degenerate(cfg.model.detunings()) && !cfg.allow_nondegenerate)
        throw std::invalid_argument(
            "stirap: detunings must be degenerate (pass allow_nondegenerate to override)");
    const int n = cfg.excitation;
    PulseSchedule schedule = cfg.stirap.kind == ScheduleKind::sin2_overlap
                                 ? PulseSchedule::sin2_overlap(cfg.stirap.amplitude, cfg.stirap.duration)
                                 : PulseSchedule::theta_ramp(cfg.stirap.amplitude, cfg.stirap.duration);
    const SubspaceBasis basis(SubspaceSpec{2, n});
    ModelParams params = cfg.model;
    params.couplings = schedule.couplings(0.0);
    const Eigen::Index nu = static_cast<Eigen::Index>(basis.upper_size());
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(nu + static_cast<Eigen::Index>(basis.lower_size()));
    psi0(nu + static_cast<Eigen::Index>(basis.lower_index({0, n}))) = 1.0;
    const Trajectory traj = propagate(basis, params, schedule, psi0);
    const auto overlap = instantaneous_dark_overlap(traj, schedule, basis);
    const double fidelity =
        std::norm(traj.states.back()(nu + static_cast<Eigen::Index>(basis.lower_index({n, 0}))));

    CommandResult res;
    res.artifacts.push_back({"trajectory.csv", trajectory_to_csv(traj, basis, overlap)});
    json j;
    j["schema"] = schema_tag;
    j["n"] = n;
    j["T"] = cfg.stirap.duration;
    j["G"] = cfg.stirap.amplitude;
    j["schedule"] = cfg.stirap.kind == ScheduleKind::sin2_overlap ? "sin2_overlap" : "theta_ramp";
    j["fidelity"] = fidelity;
    j["min_dark_overlap"] = *std::min_element(overlap.begin(), overlap.end());
    j["max_norm_drift"] = traj.max_norm_drift;
    j["steps"] = traj.times.size() - 1;
    res.artifacts.push_back({"stirap.json", j.dump(2) + "\n"});
    std::ostringstream os;
    os << "fidelity = " << fidelity << " (norm drift " << traj.max_norm_drift << ")\n";
    res.output = os.str();
    return res;
}

inline CommandResult run_export_graph(const RunConfig& cfg) {
    if (cfg.format == "csv")
        throw std::invalid_argument("export-graph: csv applies to trajectories; use dot or json");
    const SubspaceBasis basis = detail::make_basis(cfg);
    const BlockHamiltonian bh = assemble_blocks(basis, cfg.model, cfg.frame);
    const LatticeGraph g = build_lattice_graph(bh, basis);
    CommandResult res;
    if (cfg.format == "dot") {
        const std::string dot = to_dot(g);
        res.artifacts.push_back({"graph.dot", dot});
        res.output = dot;
    } else {
        const std::string text = lattice_graph_to_json(g).dump(2) + "\n";
        res.artifacts.push_back({"graph.json", text});
        res.output = text;
    }
    return res;
}

inline CommandResult run_command(const std::string& name, const RunConfig& cfg) {
    if (name == "basis") return run_basis(cfg);
    if (name == "hamiltonian") return run_hamiltonian(cfg);
    if (name == "darkstates") return run_darkstates(cfg);
    if (name == "count") return run_count(cfg);
    if (name == "darkmodes") return run_darkmodes(cfg);
    if (name == "stirap") return run_stirap(cfg);
    if (name == "export-graph") return run_export_graph(cfg);
    throw std::invalid_argument("unknown command: " + name);
}

}  // namespace darklattice
