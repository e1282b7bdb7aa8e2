#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "darklattice/basis.hpp"
#include "darklattice/dark_states.hpp"
#include "darklattice/hamiltonian.hpp"

namespace darklattice {

enum class ScheduleKind { theta_ramp, sin2_overlap, constant };

inline double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

/// Time-dependent coupling profile g_j(t) on [0, T].
class PulseSchedule {
public:
    /// g1 = G cos(theta), g2 = G sin(theta) with theta a smooth monotone ramp
    /// 0 -> pi/2 (smoothstep). Two-mode.
    static PulseSchedule theta_ramp(double amplitude, double duration) {
        return PulseSchedule(ScheduleKind::theta_ramp, amplitude, duration, {});
    }

    /// Two overlapping sin^2 pulses in counterintuitive order (the coupling to
    /// the initially empty mode opens first). Two-mode.
    static PulseSchedule sin2_overlap(double amplitude, double duration) {
        return PulseSchedule(ScheduleKind::sin2_overlap, amplitude, duration, {});
    }

    static PulseSchedule constant(std::vector<double> couplings, double duration) {
        double g2 = 0.0;
        for (double g : couplings) g2 += g * g;
        PulseSchedule s(ScheduleKind::constant, std::sqrt(g2), duration, std::move(couplings));
        return s;
    }

    ScheduleKind kind() const { return kind_; }
    double duration() const { return duration_; }
    double amplitude() const { return amplitude_; }

    /// Bound on ||g(t)|| over the run. Tight for the theta ramp (the ramp
    /// moves on the circle of radius G) and for constant schedules.
    double max_magnitude() const {
        return kind_ == ScheduleKind::sin2_overlap ? std::sqrt(2.0) * amplitude_ : amplitude_;
    }

    int modes() const { return kind_ == ScheduleKind::constant ? static_cast<int>(fixed_.size()) : 2; }

    double theta(double t) const {
        if (kind_ == ScheduleKind::theta_ramp)
            return std::numbers::pi / 2.0 * smoothstep(t / duration_);
        const auto g = couplings(t);
        return std::atan2(g[1], g[0]);
    }

    std::vector<double> couplings(double t) const {
        switch (kind_) {
            case ScheduleKind::theta_ramp: {
                const double th = std::numbers::pi / 2.0 * smoothstep(t / duration_);
                return {amplitude_ * std::cos(th), amplitude_ * std::sin(th)};
            }
            case ScheduleKind::sin2_overlap: {
                auto pulse = [](double x) {
                    return (x <= 0.0 || x >= 1.0) ? 0.0 : std::pow(std::sin(std::numbers::pi * x), 2);
                };
                const double w = 0.75 * duration_;
                return {amplitude_ * pulse(t / w), amplitude_ * pulse((t - 0.25 * duration_) / w)};
            }
            case ScheduleKind::constant:
                return fixed_;
        }
        throw std::logic_error("PulseSchedule: unknown kind");
    }

private:
    PulseSchedule(ScheduleKind kind, double amplitude, double duration, std::vector<double> fixed)
        : kind_(kind), amplitude_(amplitude), duration_(duration), fixed_(std::move(fixed)) {
        if (!(duration_ > 0.0)) throw std::invalid_argument("PulseSchedule: duration must be > 0");
        if (!std::isfinite(amplitude_)) throw std::invalid_argument("PulseSchedule: non-finite amplitude");
    }

    ScheduleKind kind_;
    double amplitude_;
    double duration_;
    std::vector<double> fixed_;
};

struct IntegratorParams {
    double initial_step = 0.05;    // halved until the drift budget is met
    double norm_drift_tol = 1e-8;  // max |(norm - 1)| over the run
    int max_halvings = 24;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    double max_norm_drift = 0.0;
    double step = 0.0;  // accepted step size
};

namespace detail {

/// H(t) v with fixed diagonal and per-mode coupling patterns scaled by g_j(t).
struct SubspaceHamiltonianAction {
    Eigen::VectorXd diagonal;  // (U; L)
    struct Link {
        Eigen::Index upper, lower;
        double amplitude;  // sqrt(n_j + 1)
    };
    std::vector<std::vector<Link>> mode_links;
    Eigen::Index nu = 0;

    SubspaceHamiltonianAction(const SubspaceBasis& basis, const ModelParams& params) {
        auto bh = assemble_blocks(basis, params, Frame::rotating);
        nu = bh.upper_diag.size();
        diagonal.resize(nu + bh.lower_diag.size());
        diagonal << bh.upper_diag, bh.lower_diag;
        mode_links.resize(static_cast<std::size_t>(params.modes));
        std::vector<int> target;
        for (std::size_t i = 0; i < basis.upper_size(); ++i) {
            const auto& occ = basis.upper()[i].occupations;
            target = occ;
            for (int j = 0; j < params.modes; ++j) {
                target[static_cast<std::size_t>(j)] += 1;
                mode_links[static_cast<std::size_t>(j)].push_back(
                    {static_cast<Eigen::Index>(i),
                     nu + static_cast<Eigen::Index>(basis.lower_index(target)),
                     std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(j)] + 1))});
                target[static_cast<std::size_t>(j)] -= 1;
            }
        }
    }

    void apply(const std::vector<double>& g, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
        out = diagonal.cast<std::complex<double>>().cwiseProduct(v);
        for (std::size_t j = 0; j < mode_links.size(); ++j) {
            const double gj = g[j];
            if (gj == 0.0) continue;
            for (const auto& link : mode_links[j]) {
                out(link.upper) += gj * link.amplitude * v(link.lower);
                out(link.lower) += gj * link.amplitude * v(link.upper);
            }
        }
    }
};

}  // namespace detail

/// Classical RK4 with a fixed step count; records every step. The evolution
/// stays inside the subspace by construction, so the excitation number is
/// conserved exactly.
inline Trajectory propagate_fixed_steps(const SubspaceBasis& basis, const ModelParams& params,
                                        const PulseSchedule& schedule, const Eigen::VectorXcd& psi0,
                                        std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("propagate_fixed_steps: need at least one step");
    const Eigen::Index dim =
        static_cast<Eigen::Index>(basis.upper_size()) + static_cast<Eigen::Index>(basis.lower_size());
    if (psi0.size() != dim) throw std::invalid_argument("propagate: initial state not in subspace");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("propagate: initial state not normalized");
    if (schedule.modes() != params.modes)
        throw std::invalid_argument("propagate: schedule/model mode count mismatch");

    const detail::SubspaceHamiltonianAction ham(basis, params);
    const double h = schedule.duration() / static_cast<double>(steps);
    const std::complex<double> mi(0.0, -1.0);

    Trajectory traj;
    traj.step = h;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(psi0);

    Eigen::VectorXcd psi = psi0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), hv(dim);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * h;
        const auto g1 = schedule.couplings(t);
        const auto g2 = schedule.couplings(t + h / 2.0);
        const auto g3 = schedule.couplings(t + h);
        ham.apply(g1, psi, hv);
        k1 = mi * hv;
        tmp = psi + (h / 2.0) * k1;
        ham.apply(g2, tmp, hv);
        k2 = mi * hv;
        tmp = psi + (h / 2.0) * k2;
        ham.apply(g2, tmp, hv);
        k3 = mi * hv;
        tmp = psi + h * k3;
        ham.apply(g3, tmp, hv);
        k4 = mi * hv;
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(psi.norm() - 1.0));
        traj.times.push_back(static_cast<double>(s + 1) * h);
        traj.states.push_back(psi);
    }
    return traj;
}

/// Fixed-step RK4 with automatic step halving until the norm-drift budget is
/// met. Throws if the budget is unreachable within max_halvings.
inline Trajectory propagate(const SubspaceBasis& basis, const ModelParams& params,
                            const PulseSchedule& schedule, const Eigen::VectorXcd& psi0,
                            const IntegratorParams& ip = {}) {
    std::size_t steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(schedule.duration() / ip.initial_step)));
    for (int attempt = 0; attempt <= ip.max_halvings; ++attempt) {
        Trajectory traj = propagate_fixed_steps(basis, params, schedule, psi0, steps);
        if (traj.max_norm_drift <= ip.norm_drift_tol) return traj;
        steps *= 2;
    }
    throw std::runtime_error("propagate: norm-drift budget unreachable at minimum step");
}

/// Exact propagation of a time-independent block Hamiltonian through its
/// eigendecomposition: psi(t) = V exp(-i scale t) V^T psi0.
inline Eigen::VectorXcd propagate_exact_constant(const BlockHamiltonian& bh,
                                                 const Eigen::VectorXcd& psi0, double t) {
    const Eigen::MatrixXd h = full_matrix(bh);
    if (psi0.size() != h.rows())
        throw std::invalid_argument("propagate_exact_constant: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXcd phases =
        (-std::complex<double>(0.0, 1.0) * t * es.eigenvalues().cast<std::complex<double>>().array())
            .exp();
    return es.eigenvectors().cast<std::complex<double>>() *
           phases.cwiseProduct(es.eigenvectors().transpose().cast<std::complex<double>>() * psi0);
}

/// |<g,n,0| psi(T) >|^2 after a two-mode schedule starting from |g,0,n>,
/// at equal detunings given by params-free resonance (all detunings zero).
inline double stirap_fidelity(int n, double amplitude, ScheduleKind kind, double duration,
                              const IntegratorParams& ip = {}) {
    if (n < 1) throw std::invalid_argument("stirap_fidelity: n must be >= 1");
    PulseSchedule schedule = (kind == ScheduleKind::theta_ramp)
                                 ? PulseSchedule::theta_ramp(amplitude, duration)
                                 : PulseSchedule::sin2_overlap(amplitude, duration);
    const SubspaceBasis basis(SubspaceSpec{2, n});
    ModelParams params;
    params.modes = 2;
    params.omega0 = 0.0;
    params.omegas = {0.0, 0.0};
    params.couplings = schedule.couplings(0.0);

    const Eigen::Index nu = static_cast<Eigen::Index>(basis.upper_size());
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(nu + static_cast<Eigen::Index>(basis.lower_size()));
    psi0(nu + static_cast<Eigen::Index>(basis.lower_index({0, n}))) = 1.0;
    const Trajectory traj = propagate(basis, params, schedule, psi0, ip);
    const Eigen::Index target = nu + static_cast<Eigen::Index>(basis.lower_index({n, 0}));
    return std::norm(traj.states.back()(target));
}

/// Overlap |<D(theta(t)) | psi(t)>|^2 with the instantaneous two-mode
/// mixing-angle dark state, per grid point.
inline std::vector<double> instantaneous_dark_overlap(const Trajectory& traj,
                                                      const PulseSchedule& schedule,
                                                      const SubspaceBasis& basis) {
    if (basis.spec().modes != 2)
        throw std::invalid_argument("instantaneous_dark_overlap: two-mode runs only");
    const int n = basis.spec().excitation;
    std::vector<double> overlap;
    overlap.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const Eigen::VectorXd dark = two_mode_mixing_angle_form(n, schedule.theta(traj.times[i]));
        const std::complex<double> amp =
            dark.cast<std::complex<double>>().dot(traj.states[i].tail(dark.size()));
        overlap.push_back(std::norm(amp));
    }
    return overlap;
}

}  // namespace darklattice
