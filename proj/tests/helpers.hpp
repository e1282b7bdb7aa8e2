#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "darklattice/hamiltonian.hpp"

namespace test_helpers {

/// Model with all detunings zero (omega_j = omega0): the degenerate case the
/// dark-state theory requires.
inline darklattice::ModelParams resonant_params(std::vector<double> couplings, double omega0 = 1.0) {
    darklattice::ModelParams p;
    p.modes = static_cast<int>(couplings.size());
    p.omega0 = omega0;
    p.omegas.assign(couplings.size(), omega0);
    p.couplings = std::move(couplings);
    return p;
}

/// Equal detunings Delta for every mode: omega_j = omega0 - Delta.
inline darklattice::ModelParams detuned_params(std::vector<double> couplings, double delta,
                                               double omega0 = 1.0) {
    darklattice::ModelParams p;
    p.modes = static_cast<int>(couplings.size());
    p.omega0 = omega0;
    p.omegas.assign(couplings.size(), omega0 - delta);
    p.couplings = std::move(couplings);
    return p;
}

inline std::vector<double> random_couplings(int modes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    std::vector<double> g(static_cast<std::size_t>(modes));
    for (auto& v : g) v = dist(rng);
    return g;
}

/// Max |a - s*b| over entries with the global sign s chosen by the
/// largest-magnitude entry of b.
inline double diff_up_to_sign(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) return 1e300;
    Eigen::Index imax = 0;
    b.cwiseAbs().maxCoeff(&imax);
    const double s = (a(imax) * b(imax) < 0) ? -1.0 : 1.0;
    return (a - s * b).cwiseAbs().maxCoeff();
}

}  // namespace test_helpers
