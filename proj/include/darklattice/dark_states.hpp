#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "darklattice/basis.hpp"
#include "darklattice/combinatorics.hpp"
#include "darklattice/hamiltonian.hpp"
#include "darklattice/linalg.hpp"

namespace darklattice {

enum class DarkLabelKind { numeric, closed_form };

struct DarkLabel {
    DarkLabelKind kind = DarkLabelKind::numeric;
    int p = 0;  // closed-form position index, 1-based; 0 for numeric
};

/// Vectors over the lower-state basis spanning the dark subspace. Upper-state
/// components are zero by construction (the vectors live in the lower sector).
struct DarkStateSet {
    SubspaceSpec spec;
    VectorSet vectors;
    std::vector<DarkLabel> labels;
    bool normalized = false;
};

/// Number of dark states in the n-excitation subspace: C(N+n-2, N-2).
/// A single-mode model has none.
inline std::uint64_t dark_state_count(int modes, int excitation) {
    if (modes < 1 || excitation < 1)
        throw std::invalid_argument("dark_state_count: modes and excitation must be >= 1");
    if (modes == 1) return 0;
    return binomial(static_cast<std::uint64_t>(modes) + excitation - 2,
                    static_cast<std::uint64_t>(modes) - 2);
}

namespace detail {

inline double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline bool detunings_degenerate(const std::vector<double>& deltas) {
    if (deltas.size() < 2) return true;
    const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
    return (*hi - *lo) <= 1e-12 * std::max(1.0, std::abs(mean(deltas)));
}

inline double sigma_max(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

/// Largest-magnitude coefficient made positive (first index wins ties).
inline void apply_phase_convention(VectorSet& vs) {
    for (auto& v : vs.vectors) {
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0) v = -v;
    }
}

}  // namespace detail

struct SolveOptions {
    bool allow_nondegenerate = false;  // annihilates H_int but is not an eigenset
};

/// Dark states as the orthonormal null space of the coupling matrix.
/// Requires all couplings nonzero (a vanishing g_j changes the counting law)
/// and degenerate detunings unless explicitly overridden.
inline DarkStateSet solve_dark_states(const BlockHamiltonian& bh, const TolerancePolicy& pol = {},
                                      const SolveOptions& opts = {}) {
    pol.validate();
    for (std::size_t j = 0; j < bh.params.couplings.size(); ++j)
        if (bh.params.couplings[j] == 0.0)
            throw std::invalid_argument("solve_dark_states: coupling g" + std::to_string(j + 1) +
                                        " is zero; mode decouples and the dark-state count changes");
    if (!detail::detunings_degenerate(bh.params.detunings()) && !opts.allow_nondegenerate)
        throw std::invalid_argument(
            "solve_dark_states: detunings are not degenerate; the null space of C annihilates the "
            "interaction but is not an eigenset (pass allow_nondegenerate to override)");

    DarkStateSet ds;
    ds.spec = bh.spec;
    ds.vectors = null_space_svd(bh.coupling, pol);
    ds.normalized = true;
    const std::uint64_t expected = dark_state_count(bh.spec.modes, bh.spec.excitation);
    if (ds.vectors.size() != expected)
        throw std::runtime_error("solve_dark_states: nullity " + std::to_string(ds.vectors.size()) +
                                 " != counting law " + std::to_string(expected));
    const double smax = detail::sigma_max(bh.coupling);
    for (const auto& v : ds.vectors.vectors)
        if ((bh.coupling * v).norm() > pol.residual_eps * smax)
            throw std::runtime_error("solve_dark_states: annihilation residual above tolerance");
    detail::apply_phase_convention(ds.vectors);
    ds.labels.assign(ds.vectors.size(), DarkLabel{DarkLabelKind::numeric, 0});
    return ds;
}

/// Two-mode dark state: coefficient sqrt(n!/((n-k2)! k2!)) (-g1)^(n-k2) g2^k2 / N
/// on |g,k2,n-k2>, with N = (g1^2+g2^2)^(n/2). Single normalized vector.
inline DarkStateSet two_mode_closed_form(int n, const std::vector<double>& g) {
    if (n < 1) throw std::invalid_argument("two_mode_closed_form: n must be >= 1");
    if (g.size() != 2) throw std::invalid_argument("two_mode_closed_form: expected two couplings");
    const double nn = std::pow(g[0] * g[0] + g[1] * g[1], n / 2.0);
    if (nn == 0.0) throw std::invalid_argument("two_mode_closed_form: both couplings are zero");
    Eigen::VectorXd v(n + 1);
    for (int k2 = 0; k2 <= n; ++k2) {
        const double c = std::sqrt(static_cast<double>(binomial(n, k2))) *
                         std::pow(-g[0], n - k2) * std::pow(g[1], k2) / nn;
        v(n - k2) = c;  // |g,k2,n-k2> sits at canonical position n-k2
    }
    DarkStateSet ds;
    ds.spec = SubspaceSpec{2, n};
    ds.vectors.dim = n + 1;
    ds.vectors.vectors.push_back(std::move(v));
    ds.vectors.orthonormal = true;
    ds.labels.push_back({DarkLabelKind::closed_form, 1});
    ds.normalized = true;
    return ds;
}

/// Mixing-angle form of the two-mode dark state at tan(theta2) = g2/g1.
inline Eigen::VectorXd two_mode_mixing_angle_form(int n, double theta2) {
    if (n < 1) throw std::invalid_argument("two_mode_mixing_angle_form: n must be >= 1");
    Eigen::VectorXd v(n + 1);
    for (int k2 = 0; k2 <= n; ++k2) {
        const double c = std::sqrt(static_cast<double>(binomial(n, k2))) *
                         ((n - k2) % 2 ? -1.0 : 1.0) * std::pow(std::cos(theta2), n - k2) *
                         std::pow(std::sin(theta2), k2);
        v(n - k2) = c;
    }
    return v;
}

/// One raw (unnormalized) closed-form dark vector plus its label and norm.
struct ClosedFormVector {
    Eigen::VectorXd coefficients;
    double norm = 0.0;
    int label = 0;  // position index p
};

inline int three_mode_label(int s3) { return s3 + 1; }
inline int four_mode_label(int s3, int s4) { return s3 * (s3 + 1) / 2 + s4 + 1; }

/// Three-mode dark state at free index s3 (0 <= s3 <= n), summed over
/// k2 + k3 = k1 with the permutation-number coefficients; integer parts are
/// exact, the square root is taken once. Unnormalized.
inline ClosedFormVector three_mode_closed_form(int n, int s3, const std::vector<double>& g) {
    if (n < 1) throw std::invalid_argument("three_mode_closed_form: n must be >= 1");
    if (s3 < 0 || s3 > n) throw std::out_of_range("three_mode_closed_form: s3 out of [0, n]");
    if (g.size() != 3) throw std::invalid_argument("three_mode_closed_form: expected three couplings");
    const SubspaceBasis basis(SubspaceSpec{3, n});
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.lower_size()));
    for (int k1 = 0; k1 <= n; ++k1) {
        for (int k2 = std::max(0, k1 - s3); k2 <= std::min(k1, n - s3); ++k2) {
            const int k3 = k1 - k2;
            const std::uint64_t radicand =
                checked_mul(factorial(static_cast<unsigned>(k1)),
                            checked_mul(permutation_number(static_cast<unsigned>(n - s3),
                                                           static_cast<unsigned>(k2)),
                                        permutation_number(static_cast<unsigned>(s3),
                                                           static_cast<unsigned>(k3))));
            const double denom = static_cast<double>(
                checked_mul(factorial(static_cast<unsigned>(k2)), factorial(static_cast<unsigned>(k3))));
            const double c = (k1 % 2 ? -1.0 : 1.0) * std::sqrt(static_cast<double>(radicand)) / denom *
                             std::pow(g[1], k2) * std::pow(g[2], k3) * std::pow(g[0], n - k1);
            const std::size_t pos = basis.lower_index({k1, n - s3 - k2, s3 - k3});
            v(static_cast<Eigen::Index>(pos)) += c;
        }
    }
    const double nrm = v.norm();
    return {std::move(v), nrm, three_mode_label(s3)};
}

/// Mixing-angle form of the three-mode dark state, tan(theta_j) = g_j/g_1.
/// Proportional to the coupling form (ratio fixed by the cosine powers).
inline Eigen::VectorXd three_mode_mixing_angle_form(int n, int s3, double theta2, double theta3) {
    if (n < 1) throw std::invalid_argument("three_mode_mixing_angle_form: n must be >= 1");
    if (s3 < 0 || s3 > n) throw std::out_of_range("three_mode_mixing_angle_form: s3 out of [0, n]");
    const SubspaceBasis basis(SubspaceSpec{3, n});
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.lower_size()));
    for (int k1 = 0; k1 <= n; ++k1) {
        for (int k2 = std::max(0, k1 - s3); k2 <= std::min(k1, n - s3); ++k2) {
            const int k3 = k1 - k2;
            const std::uint64_t radicand =
                checked_mul(factorial(static_cast<unsigned>(k1)),
                            checked_mul(permutation_number(static_cast<unsigned>(n - s3),
                                                           static_cast<unsigned>(k2)),
                                        permutation_number(static_cast<unsigned>(s3),
                                                           static_cast<unsigned>(k3))));
            const double denom = static_cast<double>(
                checked_mul(factorial(static_cast<unsigned>(k2)), factorial(static_cast<unsigned>(k3))));
            const double c = (k1 % 2 ? -1.0 : 1.0) * std::sqrt(static_cast<double>(radicand)) / denom *
                             std::pow(std::sin(theta2), k2) * std::pow(std::cos(theta2), n - s3 - k2) *
                             std::pow(std::sin(theta3), k3) * std::pow(std::cos(theta3), s3 - k3);
            const std::size_t pos = basis.lower_index({k1, n - s3 - k2, s3 - k3});
            v(static_cast<Eigen::Index>(pos)) += c;
        }
    }
    return v;
}

/// Four-mode dark state at free indices (s3, s4), 0 <= s4 <= s3 <= n.
/// Unnormalized; label p = s3(s3+1)/2 + s4 + 1.
inline ClosedFormVector four_mode_closed_form(int n, int s3, int s4, const std::vector<double>& g) {
    if (n < 1) throw std::invalid_argument("four_mode_closed_form: n must be >= 1");
    if (s4 < 0 || s3 < s4 || s3 > n)
        throw std::out_of_range("four_mode_closed_form: need 0 <= s4 <= s3 <= n");
    if (g.size() != 4) throw std::invalid_argument("four_mode_closed_form: expected four couplings");
    const SubspaceBasis basis(SubspaceSpec{4, n});
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.lower_size()));
    for (int k1 = 0; k1 <= n; ++k1) {
        for (int k2 = 0; k2 <= std::min(k1, n - s3); ++k2) {
            for (int k3 = 0; k3 <= std::min(k1 - k2, s3 - s4); ++k3) {
                const int k4 = k1 - k2 - k3;
                if (k4 < 0 || k4 > s4) continue;
                const std::uint64_t radicand = checked_mul(
                    factorial(static_cast<unsigned>(k1)),
                    checked_mul(permutation_number(static_cast<unsigned>(n - s3),
                                                   static_cast<unsigned>(k2)),
                                checked_mul(permutation_number(static_cast<unsigned>(s3 - s4),
                                                               static_cast<unsigned>(k3)),
                                            permutation_number(static_cast<unsigned>(s4),
                                                               static_cast<unsigned>(k4)))));
                const double denom = static_cast<double>(checked_mul(
                    factorial(static_cast<unsigned>(k2)),
                    checked_mul(factorial(static_cast<unsigned>(k3)), factorial(static_cast<unsigned>(k4)))));
                const double c = (k1 % 2 ? -1.0 : 1.0) * std::sqrt(static_cast<double>(radicand)) /
                                 denom * std::pow(g[0], n - k1) * std::pow(g[1], k2) *
                                 std::pow(g[2], k3) * std::pow(g[3], k4);
                const std::size_t pos = basis.lower_index({k1, n - s3 - k2, s3 - s4 - k3, s4 - k4});
                v(static_cast<Eigen::Index>(pos)) += c;
            }
        }
    }
    const double nrm = v.norm();
    return {std::move(v), nrm, four_mode_label(s3, s4)};
}

/// Mixing-angle form of the four-mode dark state, tan(theta_j) = g_j/g_1.
inline Eigen::VectorXd four_mode_mixing_angle_form(int n, int s3, int s4, double theta2,
                                                   double theta3, double theta4) {
    if (n < 1) throw std::invalid_argument("four_mode_mixing_angle_form: n must be >= 1");
    if (s4 < 0 || s3 < s4 || s3 > n)
        throw std::out_of_range("four_mode_mixing_angle_form: need 0 <= s4 <= s3 <= n");
    const SubspaceBasis basis(SubspaceSpec{4, n});
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.lower_size()));
    for (int k1 = 0; k1 <= n; ++k1) {
        for (int k2 = 0; k2 <= std::min(k1, n - s3); ++k2) {
            for (int k3 = 0; k3 <= std::min(k1 - k2, s3 - s4); ++k3) {
                const int k4 = k1 - k2 - k3;
                if (k4 < 0 || k4 > s4) continue;
                const std::uint64_t radicand = checked_mul(
                    factorial(static_cast<unsigned>(k1)),
                    checked_mul(permutation_number(static_cast<unsigned>(n - s3),
                                                   static_cast<unsigned>(k2)),
                                checked_mul(permutation_number(static_cast<unsigned>(s3 - s4),
                                                               static_cast<unsigned>(k3)),
                                            permutation_number(static_cast<unsigned>(s4),
                                                               static_cast<unsigned>(k4)))));
                const double denom = static_cast<double>(checked_mul(
                    factorial(static_cast<unsigned>(k2)),
                    checked_mul(factorial(static_cast<unsigned>(k3)), factorial(static_cast<unsigned>(k4)))));
                const double c = (k1 % 2 ? -1.0 : 1.0) * std::sqrt(static_cast<double>(radicand)) /
                                 denom * std::pow(std::sin(theta2), k2) *
                                 std::pow(std::cos(theta2), n - s3 - k2) *
                                 std::pow(std::sin(theta3), k3) *
                                 std::pow(std::cos(theta3), s3 - s4 - k3) *
                                 std::pow(std::sin(theta4), k4) * std::pow(std::cos(theta4), s4 - k4);
                const std::size_t pos = basis.lower_index({k1, n - s3 - k2, s3 - s4 - k3, s4 - k4});
                v(static_cast<Eigen::Index>(pos)) += c;
            }
        }
    }
    return v;
}

/// All three-mode closed-form vectors for s3 = 0..n, raw, labelled p = s3+1.
inline DarkStateSet three_mode_closed_form_family(int n, const std::vector<double>& g) {
    DarkStateSet ds;
    ds.spec = SubspaceSpec{3, n};
    ds.normalized = false;
    for (int s3 = 0; s3 <= n; ++s3) {
        auto cf = three_mode_closed_form(n, s3, g);
        ds.vectors.dim = cf.coefficients.size();
        ds.vectors.vectors.push_back(std::move(cf.coefficients));
        ds.labels.push_back({DarkLabelKind::closed_form, cf.label});
    }
    return ds;
}

/// All four-mode closed-form vectors for 0 <= s4 <= s3 <= n, raw, in label order.
inline DarkStateSet four_mode_closed_form_family(int n, const std::vector<double>& g) {
    DarkStateSet ds;
    ds.spec = SubspaceSpec{4, n};
    ds.normalized = false;
    for (int s3 = 0; s3 <= n; ++s3) {
        for (int s4 = 0; s4 <= s3; ++s4) {
            auto cf = four_mode_closed_form(n, s3, s4, g);
            ds.vectors.dim = cf.coefficients.size();
            ds.vectors.vectors.push_back(std::move(cf.coefficients));
            ds.labels.push_back({DarkLabelKind::closed_form, cf.label});
        }
    }
    return ds;
}

/// Prefix norms N_[l] = sqrt(g1^2 + ... + gl^2) for l = 1..N.
inline std::vector<double> prefix_norms(const std::vector<double>& g) {
    std::vector<double> n(g.size());
    double acc = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l) {
        acc += g[l] * g[l];
        n[l] = std::sqrt(acc);
    }
    return n;
}

/// N-mode single-excitation dark states, already orthonormal: the l'-th
/// vector has support on the first l'+1 lower states with coefficients
/// (g_{l'+1} g_1, ..., g_{l'+1} g_{l'}, -N_[l']^2) / (N_[l'] N_[l'+1]).
inline DarkStateSet n_mode_single_excitation_closed_form(int modes, const std::vector<double>& g) {
    if (modes < 2) throw std::invalid_argument("n_mode_single_excitation_closed_form: need N >= 2");
    if (static_cast<int>(g.size()) != modes)
        throw std::invalid_argument("n_mode_single_excitation_closed_form: coupling count != N");
    for (double gj : g)
        if (gj == 0.0)
            throw std::invalid_argument("n_mode_single_excitation_closed_form: zero coupling");
    const auto norms = prefix_norms(g);
    DarkStateSet ds;
    ds.spec = SubspaceSpec{modes, 1};
    ds.vectors.dim = modes;
    ds.vectors.orthonormal = true;
    ds.normalized = true;
    for (int lp = 1; lp <= modes - 1; ++lp) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(modes);
        const double denom = norms[static_cast<std::size_t>(lp - 1)] * norms[static_cast<std::size_t>(lp)];
        for (int j = 1; j <= lp; ++j)
            v(j - 1) = g[static_cast<std::size_t>(lp)] * g[static_cast<std::size_t>(j - 1)] / denom;
        v(lp) = -norms[static_cast<std::size_t>(lp - 1)] * norms[static_cast<std::size_t>(lp - 1)] / denom;
        ds.vectors.vectors.push_back(std::move(v));
        ds.labels.push_back({DarkLabelKind::closed_form, lp});
    }
    return ds;
}

/// Embed a lower-sector vector into the full subspace (zero upper component).
inline Eigen::VectorXd embed_lower(const BlockHamiltonian& bh, const Eigen::VectorXd& v) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(bh.upper_diag.size() + bh.lower_diag.size());
    full.tail(bh.lower_diag.size()) = v;
    return full;
}

struct DarknessReport {
    double annihilation_residual = 0.0;  // max ||C v|| / sigma_max
    double eigen_residual = 0.0;         // max ||H vhat - lambda vhat|| / denom
    bool detunings_degenerate = true;
    double expected_eigenvalue = 0.0;
    double gram_deviation = 0.0;
    double upper_leakage = 0.0;  // exactly 0: vectors live in the lower sector
    bool annihilation_pass = false;
    bool eigen_pass = false;
    bool gram_pass = false;
    bool pass() const { return annihilation_pass && eigen_pass && gram_pass; }
};

/// Check H_int |D> = 0 and, at degenerate detunings, the eigenvalue -n*Delta
/// (plus the lab-frame shift when applicable).
inline DarknessReport verify_dark(const BlockHamiltonian& bh, const DarkStateSet& ds,
                                  const TolerancePolicy& pol = {}) {
    pol.validate();
    if (ds.spec != bh.spec) throw std::invalid_argument("verify_dark: spec mismatch");
    DarknessReport rep;
    const double smax = detail::sigma_max(bh.coupling);
    const auto deltas = bh.params.detunings();
    rep.detunings_degenerate = detail::detunings_degenerate(deltas);
    const double delta = detail::mean(deltas);
    const int n = bh.spec.excitation;
    const double frame_shift = (bh.frame == Frame::lab) ? bh.params.omega0 * (n - 0.5) : 0.0;
    rep.expected_eigenvalue = -n * delta + frame_shift;

    const Eigen::MatrixXd h = full_matrix(bh);
    const double eig_denom = (std::abs(n * delta) > 0.0) ? std::abs(n * delta) : smax;
    for (const auto& v : ds.vectors.vectors) {
        if (v.size() != bh.lower_diag.size())
            throw std::invalid_argument("verify_dark: vector not over the lower basis");
        const double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        rep.annihilation_residual =
            std::max(rep.annihilation_residual, (bh.coupling * v).norm() / (smax * vnorm));
        const Eigen::VectorXd vhat = embed_lower(bh, v) / vnorm;
        rep.eigen_residual = std::max(rep.eigen_residual,
                                      (h * vhat - rep.expected_eigenvalue * vhat).norm() / eig_denom);
    }
    if (!ds.vectors.vectors.empty() && ds.vectors.orthonormal) {
        const Eigen::MatrixXd m = ds.vectors.as_matrix();
        const Eigen::MatrixXd gram = m.transpose() * m;
        rep.gram_deviation =
            (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    }
    rep.annihilation_pass = rep.annihilation_residual <= pol.residual_eps;
    rep.eigen_pass = rep.detunings_degenerate && rep.eigen_residual <= pol.residual_eps;
    rep.gram_pass = !ds.vectors.orthonormal || rep.gram_deviation <= 1e-12;
    return rep;
}

}  // namespace darklattice
