#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "linalg.hpp"

// Six-junction flux qubit in the two-dimensional charge basis.
//
// Phase variables phi1, phi2; conjugate charges n1, n2 truncated to
// [-n_max, n_max]. Basis index = i1 * (2 n_max + 1) + i2 with n = i - n_max.
// Potential (in units of E_J, external coupling phase frozen to zero):
//   U = -( cos phi1 + cos phi2 + alpha cos(phi2 - phi1 + 2 pi f1)
//          + 2 beta cos(pi f3) cos(phi2 - phi1 + 2 pi (f1 - f2 + f3/2)) )
// Kinetic energy from the circuit capacitance matrix (units of C_J):
//   C = [[1+s, -s], [-s, 1+s]], s = alpha + 2 beta
//   H_kin = 4 E_C n^T C^-1 n,  E_C = E_J / E_C_ratio  (single-electron
//   charging energy e^2 / 2 C_J; Cooper-pair charge 2e gives the factor 4).
// Energies are E/h in GHz throughout.

namespace uscqec::fluxqubit {

using linalg::cxd;
using linalg::MatrixXcd;
using linalg::VectorXcd;

struct QubitParams {
    double E_J_GHz = 221.0;
    double E_C_ratio = 32.0;  // E_C = E_J / E_C_ratio
    double alpha = 0.8;
    double beta = 0.2;
    double gamma = 0.7;
    double f1 = 0.5;
    double f2 = 0.0;
    double f3 = 0.0;
    int n_max = 10;

    void validate() const {
        if (E_J_GHz <= 0) throw std::invalid_argument("flux qubit: E_J must be positive");
        if (E_C_ratio <= 0) throw std::invalid_argument("flux qubit: E_C_ratio must be positive");
        if (alpha <= 0 || alpha > 2) throw std::invalid_argument("flux qubit: alpha outside (0, 2]");
        if (beta < 0 || beta >= 1) throw std::invalid_argument("flux qubit: beta outside [0, 1)");
        if (gamma < 0 || gamma >= 1) throw std::invalid_argument("flux qubit: gamma outside [0, 1)");
        if (std::abs(f1) > 1 || std::abs(f2) > 1 || std::abs(f3) > 1)
            throw std::invalid_argument("flux qubit: frustrations must lie in [-1, 1]");
        if (n_max < 3) throw std::invalid_argument("flux qubit: n_max must be at least 3");
    }

    Eigen::Index dim() const {
        const Eigen::Index d = 2 * Eigen::Index(n_max) + 1;
        return d * d;
    }
};

// potential energy in units of E_J at a phase-space point (coupling phase zero)
inline double potential_energy(const QubitParams& p, double phi1, double phi2) {
    using constants::pi;
    const double th_a = 2.0 * pi * p.f1;
    const double th_b = 2.0 * pi * (p.f1 - p.f2 + 0.5 * p.f3);
    return -(std::cos(phi1) + std::cos(phi2) + p.alpha * std::cos(phi2 - phi1 + th_a) +
             2.0 * p.beta * std::cos(pi * p.f3) * std::cos(phi2 - phi1 + th_b));
}

namespace detail {

// raising operator on one charge index: S |n> = |n+1>
inline MatrixXcd charge_raise(Eigen::Index d) {
    MatrixXcd s = MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i + 1 < d; ++i) s(i + 1, i) = 1.0;
    return s;
}

struct ChargeOps {
    MatrixXcd s1p, s2p;  // e^{i phi_1}, e^{i phi_2}
    Eigen::VectorXd n1, n2;
};

inline ChargeOps charge_ops(int n_max) {
    const Eigen::Index d = 2 * Eigen::Index(n_max) + 1;
    MatrixXcd s = charge_raise(d);
    MatrixXcd id = MatrixXcd::Identity(d, d);
    ChargeOps ops;
    ops.s1p = linalg::kron(s, id);
    ops.s2p = linalg::kron(id, s);
    ops.n1.resize(d * d);
    ops.n2.resize(d * d);
    for (Eigen::Index i1 = 0; i1 < d; ++i1)
        for (Eigen::Index i2 = 0; i2 < d; ++i2) {
            ops.n1(i1 * d + i2) = double(i1 - n_max);
            ops.n2(i1 * d + i2) = double(i2 - n_max);
        }
    return ops;
}

// fix the eigenvector gauge so the wavefunction is real in phase space:
// rotate by arg(sum_n v(n) v(-n))/2, then pin the sign of the largest entry
inline void fix_gauge(VectorXcd& v, int n_max) {
    const Eigen::Index d = 2 * Eigen::Index(n_max) + 1;
    cxd s = 0;
    for (Eigen::Index i1 = 0; i1 < d; ++i1)
        for (Eigen::Index i2 = 0; i2 < d; ++i2)
            s += v(i1 * d + i2) * v((d - 1 - i1) * d + (d - 1 - i2));
    if (std::abs(s) > 1e-14) v *= std::exp(cxd(0, -0.5 * std::arg(s)));
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax).real() < 0) v = -v;
}

} // namespace detail

inline MatrixXcd build_hamiltonian(const QubitParams& p) {
    using constants::pi;
    p.validate();
    const auto ops = detail::charge_ops(p.n_max);
    const double EC = p.E_J_GHz / p.E_C_ratio;
    const double s = p.alpha + 2.0 * p.beta;
    const double det = (1.0 + s) * (1.0 + s) - s * s;
    const double inv_diag = (1.0 + s) / det;
    const double inv_off = s / det;

    const Eigen::Index dim = p.dim();
    MatrixXcd h = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double n1 = ops.n1(k), n2 = ops.n2(k);
        h(k, k) = 4.0 * EC * (inv_diag * (n1 * n1 + n2 * n2) + 2.0 * inv_off * n1 * n2);
    }
    const MatrixXcd s1m = ops.s1p.adjoint();
    const MatrixXcd s2m = ops.s2p.adjoint();
    auto add_cos = [&h](double coeff, const MatrixXcd& shift) {
        h.noalias() += coeff * 0.5 * shift;
        h.noalias() += coeff * 0.5 * shift.adjoint();
    };
    add_cos(-p.E_J_GHz, ops.s1p);
    add_cos(-p.E_J_GHz, ops.s2p);
    const double th_a = 2.0 * pi * p.f1;
    const MatrixXcd rel = ops.s2p * s1m;  // e^{i (phi_2 - phi_1)}
    add_cos(-p.E_J_GHz * p.alpha, (std::exp(cxd(0, th_a)) * rel).eval());
    const double th_b = 2.0 * pi * (p.f1 - p.f2 + 0.5 * p.f3);
    add_cos(-2.0 * p.E_J_GHz * p.beta * std::cos(pi * p.f3),
            (std::exp(cxd(0, th_b)) * rel).eval());
    return h;
}

// sine of the junction phase entering the qubit-resonator coupling
inline MatrixXcd coupling_operator(const QubitParams& p) {
    using constants::pi;
    const auto ops = detail::charge_ops(p.n_max);
    const double th_b = 2.0 * pi * (p.f1 - p.f2 + 0.5 * p.f3);
    const MatrixXcd e = std::exp(cxd(0, th_b)) * (ops.s2p * ops.s1p.adjoint());
    return (e - e.adjoint()) / cxd(0, 2);
}

struct QubitModel {
    QubitParams params;
    double E0_GHz = 0, E1_GHz = 0, E2_GHz = 0;  // lowest three levels, E/h
    double omega_q = 0;          // angular transition frequency, rad/ns
    double gap_delta_GHz = 0;    // gap at the f1 = 1/2 symmetry point
    double tilt_epsilon_GHz = 0; // signed sqrt(gap^2 - delta^2)
    double ip_scale = 0;         // tilt per unit frustration, in units of E_J
    VectorXcd ground, excited;

    double transition_GHz() const { return E1_GHz - E0_GHz; }
    double two_level_separation() const {
        return (E2_GHz - E1_GHz) / std::max(E1_GHz - E0_GHz, 1e-300);
    }
};

namespace detail {

struct LowLevels {
    double e0, e1, e2;
    VectorXcd v0, v1;
};

inline LowLevels lowest_levels(const QubitParams& p) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(build_hamiltonian(p));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("flux qubit: eigensolver failed");
    LowLevels out;
    out.e0 = solver.eigenvalues()(0);
    out.e1 = solver.eigenvalues()(1);
    out.e2 = solver.eigenvalues()(2);
    out.v0 = solver.eigenvectors().col(0);
    out.v1 = solver.eigenvectors().col(1);
    fix_gauge(out.v0, p.n_max);
    fix_gauge(out.v1, p.n_max);
    return out;
}

} // namespace detail

// relative change of the qubit gap when the charge cutoff grows by two
inline double cutoff_gap_drift(const QubitParams& p) {
    QubitParams bigger = p;
    bigger.n_max = p.n_max + 2;
    const auto a = detail::lowest_levels(p);
    const auto b = detail::lowest_levels(bigger);
    const double gap = b.e1 - b.e0;
    if (gap <= 0) throw std::runtime_error("flux qubit: non-positive gap");
    return std::abs((a.e1 - a.e0) - gap) / gap;
}

inline QubitModel solve_qubit(const QubitParams& p, bool check_cutoff = false) {
    p.validate();
    if (check_cutoff && cutoff_gap_drift(p) > 1e-6)
        throw std::runtime_error("flux qubit: charge cutoff too small for requested bias");

    QubitModel m;
    m.params = p;
    const auto lv = detail::lowest_levels(p);
    m.E0_GHz = lv.e0;
    m.E1_GHz = lv.e1;
    m.E2_GHz = lv.e2;
    m.ground = lv.v0;
    m.excited = lv.v1;
    m.omega_q = constants::ghz_to_angular(lv.e1 - lv.e0);

    QubitParams sym = p;
    sym.f1 = 0.5;
    const auto sv = detail::lowest_levels(sym);
    m.gap_delta_GHz = sv.e1 - sv.e0;

    const double gap = lv.e1 - lv.e0;
    const double eps2 = gap * gap - m.gap_delta_GHz * m.gap_delta_GHz;
    const double eps = eps2 > 0 ? std::sqrt(eps2) : 0.0;
    const double df = p.f1 - 0.5;
    m.tilt_epsilon_GHz = (df >= 0 ? eps : -eps);
    m.ip_scale = (std::abs(df) > 1e-12) ? m.tilt_epsilon_GHz / (2.0 * df * p.E_J_GHz) : 0.0;
    return m;
}

// Pauli decomposition of the sine coupling operator on the two lowest levels.
// raw_* are the bare moments r_nu = tr(sigma_nu P O P)/2; (cx, cy, cz) are
// the direction cosines r_vec/|r_vec| and c0 is r_0/|r_vec|, so a clean
// operating point has cx^2 + cz^2 close to one and |c0|, |cy| small.
struct CouplingCoefficients {
    double raw_c0 = 0, raw_cx = 0, raw_cy = 0, raw_cz = 0;
    double magnitude = 0;  // |(raw_cx, raw_cy, raw_cz)|
    double c0 = 0, cx = 0, cy = 0, cz = 0;
    double residual = 0;  // max |O_2 - sum_nu raw_nu sigma_nu|
};

inline CouplingCoefficients coupling_coefficients(const QubitModel& m) {
    if (m.E1_GHz - m.E0_GHz < 1e-9)
        throw std::runtime_error("flux qubit: degenerate ground doublet, coupling basis undefined");
    const MatrixXcd o = coupling_operator(m.params);
    MatrixXcd o2(2, 2);
    o2(0, 0) = (m.ground.adjoint() * o * m.ground)(0, 0);
    o2(0, 1) = (m.ground.adjoint() * o * m.excited)(0, 0);
    o2(1, 0) = std::conj(o2(0, 1));
    o2(1, 1) = (m.excited.adjoint() * o * m.excited)(0, 0);

    CouplingCoefficients c;
    c.raw_c0 = 0.5 * (o2(0, 0) + o2(1, 1)).real();
    c.raw_cz = 0.5 * (o2(1, 1) - o2(0, 0)).real();  // sigma_z = diag(-1, +1)
    c.raw_cx = o2(0, 1).real();
    c.raw_cy = -o2(0, 1).imag();  // tr(sigma_y O)/2 with sigma_y(0,1) = -i

    MatrixXcd rec = c.raw_c0 * linalg::id2() + c.raw_cx * linalg::sigma_x() +
                    c.raw_cy * linalg::sigma_y() + c.raw_cz * linalg::sigma_z();
    c.residual = linalg::max_abs(rec - o2);

    c.magnitude =
        std::sqrt(c.raw_cx * c.raw_cx + c.raw_cy * c.raw_cy + c.raw_cz * c.raw_cz);
    if (c.magnitude < 1e-14)
        throw std::runtime_error("flux qubit: coupling projection vanishes on the doublet");
    c.c0 = c.raw_c0 / c.magnitude;
    c.cx = c.raw_cx / c.magnitude;
    c.cy = c.raw_cy / c.magnitude;
    c.cz = c.raw_cz / c.magnitude;
    return c;
}

struct SweepPoint {
    double alpha = 0, f1 = 0;
    double transition_GHz = 0;
    double gap_delta_GHz = 0;
    double separation = 0;
    CouplingCoefficients coupling;
};

struct GridSpec {
    double min = 0, max = 0;
    int count = 1;

    double at(int i) const {
        if (count < 1) throw std::invalid_argument("grid count must be positive");
        if (count == 1) return min;
        return min + (max - min) * double(i) / double(count - 1);
    }
};

// full bias sweep; rows walk f1 at fixed alpha. The (cx, cy) pair carries a
// residual sign freedom per point, removed by aligning against the previous
// point of the row (and the previous row head for the first column).
inline std::vector<SweepPoint> sweep_bias(const QubitParams& base, const GridSpec& alphas,
                                          const GridSpec& f1s) {
    std::vector<SweepPoint> out(std::size_t(alphas.count) * std::size_t(f1s.count));
    std::map<int, double> delta_cache;
    for (int ia = 0; ia < alphas.count; ++ia) {
        QubitParams sym = base;
        sym.alpha = alphas.at(ia);
        sym.f1 = 0.5;
        const auto sv = detail::lowest_levels(sym);
        delta_cache[ia] = sv.e1 - sv.e0;
    }
    for (int ia = 0; ia < alphas.count; ++ia) {
        for (int jf = 0; jf < f1s.count; ++jf) {
            QubitParams p = base;
            p.alpha = alphas.at(ia);
            p.f1 = f1s.at(jf);
            const auto lv = detail::lowest_levels(p);
            QubitModel m;
            m.params = p;
            m.E0_GHz = lv.e0;
            m.E1_GHz = lv.e1;
            m.E2_GHz = lv.e2;
            m.ground = lv.v0;
            m.excited = lv.v1;
            SweepPoint pt;
            pt.alpha = p.alpha;
            pt.f1 = p.f1;
            pt.transition_GHz = lv.e1 - lv.e0;
            pt.gap_delta_GHz = delta_cache[ia];
            pt.separation = m.two_level_separation();
            pt.coupling = coupling_coefficients(m);
            out[std::size_t(ia) * std::size_t(f1s.count) + std::size_t(jf)] = pt;
        }
    }
    auto flip_xy = [](SweepPoint& pt) {
        pt.coupling.raw_cx = -pt.coupling.raw_cx;
        pt.coupling.raw_cy = -pt.coupling.raw_cy;
        pt.coupling.cx = -pt.coupling.cx;
        pt.coupling.cy = -pt.coupling.cy;
    };
    for (int ia = 0; ia < alphas.count; ++ia) {
        for (int jf = 0; jf < f1s.count; ++jf) {
            const std::size_t k = std::size_t(ia) * std::size_t(f1s.count) + std::size_t(jf);
            const SweepPoint* prev = nullptr;
            if (jf > 0) prev = &out[k - 1];
            else if (ia > 0) prev = &out[k - std::size_t(f1s.count)];
            if (!prev) continue;
            const double dot = out[k].coupling.cx * prev->coupling.cx +
                               out[k].coupling.cy * prev->coupling.cy;
            if (dot < 0) flip_xy(out[k]);
        }
    }
    return out;
}

} // namespace uscqec::fluxqubit
