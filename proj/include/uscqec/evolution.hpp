#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "linalg.hpp"
#include "rabi.hpp"

// Closed-form propagator for the longitudinally coupled system and the
// ultrafast controlled-phase construction built on it.
//
// With every cx_j = 0 the Hamiltonian is diagonal in the qubit configs: for
// z-pattern s the modes see a driven oscillator with displacement parameter
// xi_s = sum_j g_j cz_j z_j / omega, and the exact propagator factorizes as
//   U_s(t) = e^{-i t sum_j (omega_q_j/2) z_j}
//            e^{+i M xi_s^2 (omega t - sin omega t)}
//            prod_m e^{-i omega t n_m} D_m((1 - e^{i omega t}) xi_s).
// At t = n 2 pi / omega the mode factors collapse to the identity and only
// the config phases survive, which yields a two-qubit controlled-phase gate
// once per-qubit z rotations strip the free precession.

namespace uscqec::evolution {

using linalg::cxd;
using linalg::MatrixXcd;
using linalg::VectorXcd;

struct BasisMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct ConfigFactors {
    cxd phase;      // config-dependent scalar phase
    MatrixXcd mode_op;  // common per-mode operator for this config
};

inline ConfigFactors config_factors(const rabi::RabiParams& p, unsigned config, double t) {
    double z_energy = 0;
    double xi = 0;
    for (std::size_t j = 0; j < p.qubits.size(); ++j) {
        const double zj = (config >> j) & 1u ? 1.0 : -1.0;
        z_energy += 0.5 * p.qubits[j].omega_q * zj;
        xi += p.qubits[j].g * p.qubits[j].cz * zj / p.omega;
    }
    const double wt = p.omega * t;
    ConfigFactors f;
    f.phase = std::exp(cxd(0, -z_energy * t)) *
              std::exp(cxd(0, p.mode_count * xi * xi * (wt - std::sin(wt))));
    MatrixXcd rot = MatrixXcd::Zero(p.mode_dim(), p.mode_dim());
    for (Eigen::Index n = 0; n < p.mode_dim(); ++n)
        rot(n, n) = std::exp(cxd(0, -wt * double(n)));
    const cxd alpha = (1.0 - std::exp(cxd(0, wt))) * xi;
    f.mode_op = rot * linalg::displacement(alpha, p.mode_dim());
    return f;
}

} // namespace detail

inline VectorXcd evolve_analytic(const rabi::RabiParams& p, const VectorXcd& psi,
                                 double t) {
    p.validate();
    for (const auto& q : p.qubits)
        if (std::abs(q.cx) > 1e-12)
            throw BasisMismatch("evolution: closed form needs purely longitudinal "
                                "coupling, got a nonzero transverse component");
    if (psi.size() != p.dim())
        throw std::invalid_argument("evolution: state dimension mismatch");

    const Eigen::Index nq = p.qubit_dim();
    const Eigen::Index d = p.mode_dim();
    VectorXcd out(psi.size());
    for (unsigned s = 0; s < unsigned(nq); ++s) {
        const auto f = detail::config_factors(p, s, t);
        if (p.mode_count == 1) {
            VectorXcd blk(d);
            for (Eigen::Index m = 0; m < d; ++m) blk(m) = psi(s + nq * m);
            blk = (f.mode_op * blk).eval();
            for (Eigen::Index m = 0; m < d; ++m) out(s + nq * m) = f.phase * blk(m);
        } else {
            MatrixXcd blk(d, d);  // (m0, m1)
            for (Eigen::Index m1 = 0; m1 < d; ++m1)
                for (Eigen::Index m0 = 0; m0 < d; ++m0)
                    blk(m0, m1) = psi(s + nq * (m0 + d * m1));
            blk = (f.mode_op * blk * f.mode_op.transpose()).eval();
            for (Eigen::Index m1 = 0; m1 < d; ++m1)
                for (Eigen::Index m0 = 0; m0 < d; ++m0)
                    out(s + nq * (m0 + d * m1)) = f.phase * blk(m0, m1);
        }
    }
    return out;
}

// symmetric two-qubit pulse schedule: both couplings sit at kappa = g/omega =
// 1/(4 sqrt(n M)) and the gate runs for n full mode periods
struct GateSchedule {
    int periods = 1;
    int mode_count = 2;

    void validate() const {
        if (periods < 1) throw std::invalid_argument("schedule: periods must be positive");
        if (mode_count < 1 || mode_count > 2)
            throw std::invalid_argument("schedule: need one or two modes");
    }
    double kappa() const {
        validate();
        return 1.0 / (4.0 * std::sqrt(double(periods) * double(mode_count)));
    }
    double gate_time(double omega) const {
        validate();
        return periods * constants::two_pi / omega;
    }
};

// both phase-matching constraints for a controlled-phase gate after n periods
inline void check_phase_conditions(double kappa_i, double kappa_j, int periods,
                                   int mode_count, double tol = 1e-12) {
    const double nm = double(periods) * double(mode_count);
    const double sum_sq = kappa_i * kappa_i + kappa_j * kappa_j;
    const double prod = kappa_i * kappa_j;
    if (std::abs(sum_sq - 1.0 / (8.0 * nm)) > tol)
        throw ConditionViolated("schedule: kappa_i^2 + kappa_j^2 misses 1/(8 n M)");
    if (std::abs(prod - 1.0 / (16.0 * nm)) > tol)
        throw ConditionViolated("schedule: kappa_i kappa_j misses 1/(16 n M)");
}

// z rotation angle that strips the free qubit precession accumulated over
// the gate and centers the conditional phase on the controlled-phase gate
inline double correction_theta(double omega_q, double gate_time) {
    return constants::pi / 4.0 + 0.5 * omega_q * gate_time;
}

inline Eigen::Vector4cd cz_plus_target() {
    Eigen::Vector4cd v;
    v << 0.5, 0.5, 0.5, -0.5;
    return v;
}

// target reached when each correction angle is advanced by pi/2: a local-Z
// dressing of the controlled-phase target with the same fidelity for any
// evolved state
inline Eigen::Vector4cd z_dressed_target() {
    Eigen::Vector4cd v;
    v << -0.5, 0.5, 0.5, 0.5;
    return v;
}

struct CzGateReport {
    Eigen::Vector4cd uncorrected;  // diagonal gate phases at t = T, (gg, eg... q0 fastest)
    double theta0 = 0, theta1 = 0;
    Eigen::Vector4cd corrected;
    double max_error = 0;  // entrywise distance to diag(1, 1, 1, -1)
};

inline CzGateReport ultrafast_cz(double omega, double omega_q0, double omega_q1,
                                 const GateSchedule& sched) {
    sched.validate();
    const double kappa = sched.kappa();
    check_phase_conditions(kappa, kappa, sched.periods, sched.mode_count);
    const double t = sched.gate_time(omega);
    const double wt = omega * t;  // 2 pi n, sin(wt) = 0 up to roundoff

    CzGateReport rep;
    rep.theta0 = correction_theta(omega_q0, t);
    rep.theta1 = correction_theta(omega_q1, t);
    for (unsigned s = 0; s < 4; ++s) {
        const double z0 = (s & 1u) ? 1.0 : -1.0;
        const double z1 = (s & 2u) ? 1.0 : -1.0;
        const double xi = kappa * (z0 + z1);
        const double phase = -0.5 * (omega_q0 * z0 + omega_q1 * z1) * t +
                             sched.mode_count * xi * xi * wt;
        rep.uncorrected(s) = std::exp(cxd(0, phase));
        rep.corrected(s) =
            rep.uncorrected(s) * std::exp(cxd(0, rep.theta0 * z0 + rep.theta1 * z1));
    }
    const Eigen::Vector4cd cz = (Eigen::Vector4cd() << 1, 1, 1, -1).finished();
    rep.max_error = (rep.corrected - cz).cwiseAbs().maxCoeff();
    return rep;
}

} // namespace uscqec::evolution
