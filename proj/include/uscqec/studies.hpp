#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "evolution.hpp"
#include "linalg.hpp"
#include "rabi.hpp"

// Gate-quality studies: controlled-phase fidelity against the cavity
// preparation, and the adiabatic coupling release that maps the dressed
// ground state onto the bare one.

namespace uscqec::studies {

using linalg::cxd;
using linalg::MatrixXcd;
using linalg::VectorXcd;

struct TailMassTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepCountTooLow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline VectorXcd coherent_state(double amplitude, Eigen::Index dim,
                                double tail_tol = 1e-9) {
    VectorXcd v(dim);
    double term = std::exp(-0.5 * amplitude * amplitude);
    for (Eigen::Index n = 0; n < dim; ++n) {
        v(n) = term;
        term *= amplitude / std::sqrt(double(n + 1));
    }
    const double mass = v.squaredNorm();
    if (1.0 - mass > tail_tol)
        throw TailMassTooLarge("cavity: coherent amplitude leaks past the cutoff, "
                               "truncated mass " + std::to_string(1.0 - mass));
    return v / std::sqrt(mass);
}

// Boltzmann ladder weights for one mode at ratio x = hbar omega / k T,
// collected until the neglected tail drops below `tail`, then renormalized
inline std::vector<std::pair<double, int>> thermal_weights(double x, Eigen::Index dim,
                                                           double tail = 1e-12) {
    if (x <= 0) throw std::invalid_argument("cavity: thermal ratio must be positive");
    const double q = std::exp(-x);
    std::vector<std::pair<double, int>> out;
    double mass = 0;
    for (int n = 0; n < int(dim); ++n) {
        const double w = (1.0 - q) * std::pow(q, n);
        out.emplace_back(w, n);
        mass += w;
        if (1.0 - mass < tail) break;
    }
    if (1.0 - mass >= tail)
        throw TailMassTooLarge("cavity: thermal ladder does not fit below the cutoff");
    for (auto& [w, n] : out) w /= mass;
    return out;
}

enum class CavityKind { vacuum, coherent, thermal };

inline const char* cavity_name(CavityKind k) {
    switch (k) {
        case CavityKind::vacuum: return "vacuum";
        case CavityKind::coherent: return "coherent";
        case CavityKind::thermal: return "thermal";
    }
    return "unknown";
}

struct CavitySpec {
    CavityKind kind = CavityKind::vacuum;
    double amplitude = 0.0;        // coherent only
    double temperature_K = 0.015;  // thermal only
};

struct GateFidelityParams {
    double omega = constants::two_pi * 5.0;    // rad/ns
    double omega_q = constants::two_pi * 1.0;  // rad/ns
    double cx = 0.0;                           // transverse direction cosine
    int cutoff = 15;
    evolution::GateSchedule schedule;
    CavitySpec cavity;
    double tail_tol = 1e-9;

    void validate() const {
        schedule.validate();
        if (std::abs(cx) > 1.0)
            throw std::invalid_argument("gate study: |cx| cannot exceed one");
        if (omega <= 0 || omega_q <= 0)
            throw std::invalid_argument("gate study: frequencies must be positive");
        if (cutoff < 2) throw std::invalid_argument("gate study: cutoff too small");
    }
};

namespace detail {

struct Component {
    double weight;
    std::vector<VectorXcd> mode_parts;
};

inline std::vector<Component> cavity_ensemble(const GateFidelityParams& p) {
    const Eigen::Index d = Eigen::Index(p.cutoff) + 1;
    const int m = p.schedule.mode_count;
    std::vector<Component> comps;
    switch (p.cavity.kind) {
        case CavityKind::vacuum: {
            comps.push_back({1.0, std::vector<VectorXcd>(std::size_t(m),
                                                         rabi::fock_state(0, d))});
            break;
        }
        case CavityKind::coherent: {
            const VectorXcd c = coherent_state(p.cavity.amplitude, d, p.tail_tol);
            comps.push_back({1.0, std::vector<VectorXcd>(std::size_t(m), c)});
            break;
        }
        case CavityKind::thermal: {
            const double x = constants::thermal_ratio(p.omega, p.cavity.temperature_K);
            const auto singles = thermal_weights(x, d);
            std::vector<Component> acc = {{1.0, {}}};
            for (int k = 0; k < m; ++k) {
                std::vector<Component> next;
                for (const auto& base : acc)
                    for (const auto& [w, n] : singles) {
                        Component c = base;
                        c.weight *= w;
                        c.mode_parts.push_back(rabi::fock_state(n, d));
                        next.push_back(std::move(c));
                    }
                acc.swap(next);
            }
            comps = std::move(acc);
            break;
        }
    }
    return comps;
}

} // namespace detail

// Fidelity of the phase-corrected gate on |++> against the controlled-phase
// target, averaged over the cavity preparation. The cavity density operator
// is expanded into pure components, so only matrix-vector work follows the
// single eigendecomposition of the Hamiltonian. The sweep form reuses that
// decomposition across several cavity preparations at the same coupling.
inline std::vector<double> gate_fidelity_sweep(GateFidelityParams p,
                                               const std::vector<CavitySpec>& cavities) {
    p.validate();
    const double kappa = p.schedule.kappa();
    const double cz = std::sqrt(1.0 - p.cx * p.cx);

    rabi::RabiParams rp;
    rp.omega = p.omega;
    rp.cutoff = p.cutoff;
    rp.mode_count = p.schedule.mode_count;
    rp.qubits = {{p.omega_q, kappa * p.omega, p.cx, cz},
                 {p.omega_q, kappa * p.omega, p.cx, cz}};
    const linalg::HermitianPropagator prop(rabi::hamiltonian(rp));

    const double t = p.schedule.gate_time(p.omega);
    const double theta = evolution::correction_theta(p.omega_q, t);
    const cxd r_g = std::exp(cxd(0, -theta));
    const cxd r_e = std::exp(cxd(0, theta));
    const Eigen::Vector4cd target = evolution::cz_plus_target();

    const Eigen::Index nq = 4;
    const Eigen::Index modes_dim = rp.dim() / nq;
    std::vector<double> out;
    out.reserve(cavities.size());
    for (const CavitySpec& spec : cavities) {
        p.cavity = spec;
        double total = 0;
        for (const auto& comp : detail::cavity_ensemble(p)) {
            VectorXcd psi = rabi::assemble_state(rp, rabi::plus_register(2), comp.mode_parts);
            psi = prop.apply(psi, t);
            double f = 0;
            for (Eigen::Index m = 0; m < modes_dim; ++m) {
                cxd amp = 0;
                for (Eigen::Index q = 0; q < nq; ++q) {
                    const cxd corr = ((q & 1) ? r_e : r_g) * ((q & 2) ? r_e : r_g);
                    amp += std::conj(target(q)) * corr * psi(q + nq * m);
                }
                f += std::norm(amp);
            }
            total += comp.weight * f;
        }
        out.push_back(total);
    }
    return out;
}

inline double gate_fidelity(const GateFidelityParams& p) {
    return gate_fidelity_sweep(p, {p.cavity}).front();
}

struct AdiabaticParams {
    double omega = constants::two_pi * 5.0;
    double omega_q = constants::two_pi * 1.0;
    double cx = 0.0;  // 0 rides the closed-form stepper, otherwise full numerics
    double ramp_omega_T = 250.0;  // dimensionless ramp duration omega*T
    int steps = 500;
    int cutoff = 8;
    int mode_count = 2;
    double g0_frac = 1.0 / (4.0 * std::sqrt(2.0));  // initial g / omega
    int record_every = 25;

    void validate() const {
        if (steps < 500)
            throw StepCountTooLow("adiabatic: fewer than 500 ramp steps");
        if (std::abs(cx) > 1.0)
            throw std::invalid_argument("adiabatic: |cx| cannot exceed one");
        if (ramp_omega_T <= 0)
            throw std::invalid_argument("adiabatic: ramp duration must be positive");
        if (record_every < 1)
            throw std::invalid_argument("adiabatic: record stride must be positive");
    }
};

struct AdiabaticResult {
    double fidelity = 0;  // against the bare ground state at the end
    std::vector<std::pair<double, double>> curve;  // (t / T, fidelity so far)
};

// Ramp the coupling linearly from g0 to zero across `steps` piecewise
// constant slices (midpoint sampled), starting in the dressed ground state.
inline AdiabaticResult adiabatic_initialize(const AdiabaticParams& p) {
    p.validate();
    const double cz = std::sqrt(1.0 - p.cx * p.cx);
    const double g0 = p.g0_frac * p.omega;
    const double t_total = p.ramp_omega_T / p.omega;
    const double dt = t_total / p.steps;

    rabi::RabiParams rp;
    rp.omega = p.omega;
    rp.cutoff = p.cutoff;
    rp.mode_count = p.mode_count;
    rp.qubits = {{p.omega_q, g0, p.cx, cz}, {p.omega_q, g0, p.cx, cz}};
    rp.validate();
    const bool longitudinal = p.cx == 0.0;

    VectorXcd psi;
    if (longitudinal) {
        // dressed ground state: both qubits down, each mode displaced
        const cxd alpha = 2.0 * g0 * cz / p.omega;
        const VectorXcd mode =
            linalg::displacement(alpha, rp.mode_dim()).col(0);
        psi = rabi::assemble_state(rp, rabi::fock_state(0, 4),
                                   std::vector<VectorXcd>(std::size_t(p.mode_count), mode));
    } else {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(rabi::hamiltonian(rp));
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("adiabatic: ground-state solve failed");
        psi = eig.eigenvectors().col(0);
    }

    AdiabaticResult out;
    for (int k = 0; k < p.steps; ++k) {
        const double gk = g0 * (1.0 - (k + 0.5) / p.steps);
        rp.qubits[0].g = gk;
        rp.qubits[1].g = gk;
        if (longitudinal) {
            psi = evolution::evolve_analytic(rp, psi, dt);
        } else {
            const linalg::HermitianPropagator prop(rabi::hamiltonian(rp));
            psi = prop.apply(psi, dt);
        }
        if ((k + 1) % p.record_every == 0 || k + 1 == p.steps)
            out.curve.emplace_back(double(k + 1) / p.steps, std::norm(psi(0)));
    }
    out.fidelity = std::norm(psi(0));
    return out;
}

} // namespace uscqec::studies
