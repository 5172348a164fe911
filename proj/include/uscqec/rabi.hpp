#pragma once

#include <stdexcept>
#include <vector>

#include "constants.hpp"
#include "linalg.hpp"

// Multi-qubit multimode Rabi system: N two-level systems coupled through a
// fixed spin axis to M degenerate boson modes truncated at `cutoff` levels.
//
//   H = sum_j (omega_q_j/2) sz_j + omega sum_m n_m
//       + sum_j sum_m g_j (cx_j sx_j + cz_j sz_j)(a_m + a_m^dag)
//
// Angular frequencies in rad/ns, times in ns. State layout is little-endian
// with qubit 0 fastest, then the modes: index = q + 2^N (m_0 + d m_1 + ...).

namespace uscqec::rabi {

using linalg::cxd;
using linalg::MatrixXcd;
using linalg::VectorXcd;

struct DimensionGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QubitSpec {
    double omega_q = constants::two_pi * 1.0;  // rad/ns
    double g = 0.0;                            // coupling amplitude, rad/ns
    double cx = 0.0;
    double cz = 1.0;
};

struct RabiParams {
    std::vector<QubitSpec> qubits;
    int mode_count = 2;
    double omega = constants::two_pi * 5.0;  // common mode frequency, rad/ns
    int cutoff = 15;                         // boson levels kept per mode

    void validate() const {
        if (qubits.empty() || qubits.size() > 3)
            throw std::invalid_argument("rabi: need one to three qubits");
        if (mode_count < 1 || mode_count > 2)
            throw std::invalid_argument("rabi: need one or two modes");
        if (omega <= 0) throw std::invalid_argument("rabi: mode frequency must be positive");
        if (cutoff < 2) throw std::invalid_argument("rabi: cutoff must be at least 2");
        if (dim() > (Eigen::Index(1) << 20))
            throw DimensionGuard("rabi: state dimension exceeds the 2^20 guard");
    }

    Eigen::Index qubit_dim() const { return Eigen::Index(1) << qubits.size(); }
    Eigen::Index mode_dim() const { return Eigen::Index(cutoff) + 1; }
    Eigen::Index dim() const {
        Eigen::Index d = qubit_dim();
        for (int m = 0; m < mode_count; ++m) d *= mode_dim();
        return d;
    }
    std::vector<Eigen::Index> local_dims() const {
        std::vector<Eigen::Index> dims(qubits.size(), 2);
        dims.insert(dims.end(), std::size_t(mode_count), mode_dim());
        return dims;
    }
};

inline MatrixXcd hamiltonian(const RabiParams& p) {
    p.validate();
    const auto dims = p.local_dims();
    const Eigen::Index d = p.dim();
    MatrixXcd h = MatrixXcd::Zero(d, d);
    const MatrixXcd a = linalg::annihilator(p.mode_dim());
    const MatrixXcd quad = a + a.adjoint().eval();
    const MatrixXcd num = linalg::number_op(p.mode_dim());

    for (std::size_t j = 0; j < p.qubits.size(); ++j)
        h += 0.5 * p.qubits[j].omega_q * linalg::op_on_site(dims, j, linalg::sigma_z());
    for (int m = 0; m < p.mode_count; ++m)
        h += p.omega * linalg::op_on_site(dims, p.qubits.size() + std::size_t(m), num);
    for (std::size_t j = 0; j < p.qubits.size(); ++j) {
        const auto& q = p.qubits[j];
        if (q.g == 0) continue;
        const MatrixXcd spin = q.cx * linalg::sigma_x() + q.cz * linalg::sigma_z();
        const MatrixXcd lifted = linalg::op_on_site(dims, j, spin);
        for (int m = 0; m < p.mode_count; ++m)
            h += q.g * lifted *
                 linalg::op_on_site(dims, p.qubits.size() + std::size_t(m), quad);
    }
    return h;
}

// tensor product of one qubit-register factor with one factor per mode
inline VectorXcd assemble_state(const RabiParams& p, const VectorXcd& qubit_part,
                                const std::vector<VectorXcd>& mode_parts) {
    if (qubit_part.size() != p.qubit_dim())
        throw std::invalid_argument("rabi: qubit factor has wrong dimension");
    if (int(mode_parts.size()) != p.mode_count)
        throw std::invalid_argument("rabi: expected one factor per mode");
    VectorXcd out = qubit_part;
    for (const auto& m : mode_parts) {
        if (m.size() != p.mode_dim())
            throw std::invalid_argument("rabi: mode factor has wrong dimension");
        VectorXcd next(out.size() * m.size());
        for (Eigen::Index i = 0; i < m.size(); ++i)
            next.segment(i * out.size(), out.size()) = m(i) * out;
        out.swap(next);
    }
    return out;
}

inline VectorXcd plus_register(std::size_t n_qubits) {
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    return VectorXcd::Constant(d, cxd(1.0 / std::sqrt(double(d)), 0));
}

inline VectorXcd fock_state(int n, Eigen::Index dim) {
    if (n < 0 || n >= dim) throw std::invalid_argument("rabi: fock level outside cutoff");
    VectorXcd v = VectorXcd::Zero(dim);
    v(n) = 1.0;
    return v;
}

// exact propagation by full diagonalization; prefer building one
// HermitianPropagator and reusing it when many times are needed
inline VectorXcd evolve_numeric(const RabiParams& p, const VectorXcd& psi, double t) {
    linalg::HermitianPropagator prop(hamiltonian(p));
    return prop.apply(psi, t);
}

} // namespace uscqec::rabi
