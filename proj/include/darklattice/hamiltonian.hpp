#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "darklattice/basis.hpp"
#include "darklattice/combinatorics.hpp"

namespace darklattice {

enum class Frame { rotating, lab };

/// Physical parameters of the N-mode JC model. Detunings are always derived
/// from omega0 and the mode frequencies, never stored.
struct ModelParams {
    int modes = 0;
    double omega0 = 0.0;
    std::vector<double> omegas;
    std::vector<double> couplings;  // g_j, real

    std::vector<double> detunings() const {
        std::vector<double> d(omegas.size());
        for (std::size_t j = 0; j < omegas.size(); ++j) d[j] = omega0 - omegas[j];
        return d;
    }

    void validate() const {
        if (modes < 1) throw std::invalid_argument("ModelParams: mode count must be >= 1");
        if (static_cast<int>(omegas.size()) != modes)
            throw std::invalid_argument("ModelParams: omegas size must equal mode count");
        if (static_cast<int>(couplings.size()) != modes)
            throw std::invalid_argument("ModelParams: couplings size must equal mode count");
        if (!std::isfinite(omega0)) throw std::invalid_argument("ModelParams: non-finite omega0");
        for (double w : omegas)
            if (!std::isfinite(w)) throw std::invalid_argument("ModelParams: non-finite mode frequency");
        for (double g : couplings)
            if (!std::isfinite(g)) throw std::invalid_argument("ModelParams: non-finite coupling");
    }
};

/// Arrowhead block form of the subspace Hamiltonian: diagonal blocks U
/// (upper sector) and L (lower sector) plus the dense coupling matrix C.
struct BlockHamiltonian {
    SubspaceSpec spec;
    Frame frame = Frame::rotating;
    ModelParams params;          // assembly metadata
    Eigen::VectorXd upper_diag;  // U, length N_u
    Eigen::VectorXd lower_diag;  // L, length N_l
    Eigen::MatrixXd coupling;    // C, N_u x N_l
};

/// Assemble U, L, C on the canonical basis. C couples the upper state u to
/// the lower state obtained by adding one photon to mode j, with amplitude
/// g_j*sqrt(n_j'+1); diagonals are -sum_j Delta_j n_j. The lab frame adds the
/// scalar shift omega0*(n - 1/2) to every diagonal entry.
inline BlockHamiltonian assemble_blocks(const SubspaceBasis& basis, const ModelParams& params,
                                        Frame frame = Frame::rotating) {
    params.validate();
    if (params.modes != basis.spec().modes)
        throw std::invalid_argument("assemble_blocks: params/basis mode count mismatch");

    const auto deltas = params.detunings();
    const int n = basis.spec().excitation;
    const double frame_shift = (frame == Frame::lab) ? params.omega0 * (n - 0.5) : 0.0;

    BlockHamiltonian bh;
    bh.spec = basis.spec();
    bh.frame = frame;
    bh.params = params;
    bh.upper_diag.resize(static_cast<Eigen::Index>(basis.upper_size()));
    bh.lower_diag.resize(static_cast<Eigen::Index>(basis.lower_size()));
    bh.coupling = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.upper_size()),
                                        static_cast<Eigen::Index>(basis.lower_size()));

    auto diagonal_energy = [&](const std::vector<int>& occ) {
        double e = frame_shift;
        for (int j = 0; j < params.modes; ++j) e -= deltas[static_cast<std::size_t>(j)] * occ[static_cast<std::size_t>(j)];
        return e;
    };

    for (std::size_t i = 0; i < basis.lower_size(); ++i)
        bh.lower_diag(static_cast<Eigen::Index>(i)) = diagonal_energy(basis.lower()[i].occupations);

    std::vector<int> target;
    for (std::size_t i = 0; i < basis.upper_size(); ++i) {
        const auto& occ = basis.upper()[i].occupations;
        bh.upper_diag(static_cast<Eigen::Index>(i)) = diagonal_energy(occ);
        target = occ;
        for (int j = 0; j < params.modes; ++j) {
            target[static_cast<std::size_t>(j)] += 1;
            const std::size_t l = basis.lower_index(target);
            bh.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
                params.couplings[static_cast<std::size_t>(j)] *
                std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(j)] + 1));
            target[static_cast<std::size_t>(j)] -= 1;
        }
    }
    return bh;
}

/// [[U, C], [C^T, L]]; symmetric by construction.
inline Eigen::MatrixXd full_matrix(const BlockHamiltonian& bh) {
    const Eigen::Index nu = bh.upper_diag.size(), nl = bh.lower_diag.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nu + nl, nu + nl);
    h.topLeftCorner(nu, nu).diagonal() = bh.upper_diag;
    h.bottomRightCorner(nl, nl).diagonal() = bh.lower_diag;
    h.topRightCorner(nu, nl) = bh.coupling;
    h.bottomLeftCorner(nl, nu) = bh.coupling.transpose();
    return h;
}

/// [[0, C], [C^T, 0]]: the atom-photon interaction alone (all detunings zero).
inline Eigen::MatrixXd interaction_matrix(const SubspaceBasis& basis,
                                          const std::vector<double>& couplings) {
    ModelParams p;
    p.modes = basis.spec().modes;
    p.omega0 = 0.0;
    p.omegas.assign(static_cast<std::size_t>(p.modes), 0.0);
    p.couplings = couplings;
    return full_matrix(assemble_blocks(basis, p, Frame::rotating));
}

struct BlockTemplateViolation {
    Eigen::Index row = 0, col = 0;
    double value = 0.0;
    std::string what;
};

struct BlockTemplateReport {
    bool echelon_shape_ok = true;   // block-bidiagonal with M = g1*sqrt(n-s2')*I
    bool row_sparsity_ok = true;    // exactly N nonzeros per row
    bool triangular_ok = true;      // left N_u x N_u upper triangular, nonzero diagonal
    std::vector<BlockTemplateViolation> violations;
    bool pass() const { return echelon_shape_ok && row_sparsity_ok && triangular_ok; }
};

/// Check the coupling matrix against the row-echelon block template: rows
/// grouped by s2' = (n-1) - n1', columns by s2 = n - n1; nonzero blocks only
/// at s2 in {s2', s2'+1}, with the diagonal M-block equal to
/// g1*sqrt(n-s2') times the identity. Requires all couplings nonzero.
inline BlockTemplateReport verify_block_template(const BlockHamiltonian& bh,
                                                 const SubspaceBasis& basis) {
    for (double g : bh.params.couplings)
        if (g == 0.0)
            throw std::invalid_argument("verify_block_template: requires all couplings nonzero");
    if (basis.spec() != bh.spec)
        throw std::invalid_argument("verify_block_template: basis/spec mismatch");

    const int n = bh.spec.excitation;
    const double g1 = bh.params.couplings[0];
    const Eigen::Index nu = bh.coupling.rows(), nl = bh.coupling.cols();
    const double scale = bh.coupling.cwiseAbs().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, scale);

    // offsets of each state inside its s2 block (upper and lower share the
    // sub-enumeration over modes 2..N)
    std::vector<int> up_block(static_cast<std::size_t>(nu)), up_off(static_cast<std::size_t>(nu));
    std::vector<int> lo_block(static_cast<std::size_t>(nl)), lo_off(static_cast<std::size_t>(nl));
    {
        std::vector<int> seen(static_cast<std::size_t>(n + 1), 0);
        for (Eigen::Index i = 0; i < nu; ++i) {
            const int s2p = (n - 1) - basis.upper()[static_cast<std::size_t>(i)].occupations[0];
            up_block[static_cast<std::size_t>(i)] = s2p;
            up_off[static_cast<std::size_t>(i)] = seen[static_cast<std::size_t>(s2p)]++;
        }
        std::fill(seen.begin(), seen.end(), 0);
        for (Eigen::Index l = 0; l < nl; ++l) {
            const int s2 = n - basis.lower()[static_cast<std::size_t>(l)].occupations[0];
            lo_block[static_cast<std::size_t>(l)] = s2;
            lo_off[static_cast<std::size_t>(l)] = seen[static_cast<std::size_t>(s2)]++;
        }
    }

    BlockTemplateReport rep;
    auto flag = [&](bool& ok, Eigen::Index r, Eigen::Index c, double v, std::string what) {
        ok = false;
        rep.violations.push_back({r, c, v, std::move(what)});
    };

    for (Eigen::Index i = 0; i < nu; ++i) {
        int nonzeros = 0;
        const int s2p = up_block[static_cast<std::size_t>(i)];
        const double m_value = g1 * std::sqrt(static_cast<double>(n - s2p));
        for (Eigen::Index l = 0; l < nl; ++l) {
            const double v = bh.coupling(i, l);
            if (v != 0.0) ++nonzeros;
            const int s2 = lo_block[static_cast<std::size_t>(l)];
            if (s2 == s2p) {
                const bool on_diag = up_off[static_cast<std::size_t>(i)] == lo_off[static_cast<std::size_t>(l)];
                const double expected = on_diag ? m_value : 0.0;
                if (std::abs(v - expected) > tol)
                    flag(rep.echelon_shape_ok, i, l, v, "M-block entry != g1*sqrt(n-s2')*I");
            } else if (s2 != s2p + 1) {
                if (std::abs(v) > tol)
                    flag(rep.echelon_shape_ok, i, l, v, "nonzero outside block bidiagonal");
            }
        }
        if (nonzeros != bh.spec.modes)
            flag(rep.row_sparsity_ok, i, -1, static_cast<double>(nonzeros),
                 "row nonzero count != N");
    }

    for (Eigen::Index i = 0; i < nu; ++i) {
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(bh.coupling(i, j)) > tol)
                flag(rep.triangular_ok, i, j, bh.coupling(i, j), "below-diagonal entry in left block");
        if (std::abs(bh.coupling(i, i)) <= tol)
            flag(rep.triangular_ok, i, i, bh.coupling(i, i), "zero pivot on left-block diagonal");
    }
    return rep;
}

inline BlockTemplateReport verify_block_template(const BlockHamiltonian& bh) {
    return verify_block_template(bh, SubspaceBasis(bh.spec));
}

}  // namespace darklattice
