#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Dense linear-algebra helpers shared by all modules.
//
// Tensor-product convention: site 0 is the least significant index
// (little-endian). kron_chain({A0, A1, A2}) builds A2 (x) A1 (x) A0 so that
// the composite index is i = i0 + d0*(i1 + d1*i2).

namespace uscqec::linalg {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline MatrixXcd kron_chain(const std::vector<MatrixXcd>& sites) {
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (const auto& s : sites) out = kron(s, out);
    return out;
}

// operator acting as `op` on one site of a chain with the given local dims
inline MatrixXcd op_on_site(const std::vector<Eigen::Index>& dims, std::size_t site,
                            const MatrixXcd& op) {
    if (site >= dims.size()) throw std::invalid_argument("op_on_site: site out of range");
    if (op.rows() != dims[site] || op.cols() != dims[site])
        throw std::invalid_argument("op_on_site: operator dim mismatch");
    std::vector<MatrixXcd> sites;
    sites.reserve(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k)
        sites.push_back(k == site ? op : MatrixXcd::Identity(dims[k], dims[k]).eval());
    return kron_chain(sites);
}

// ------------------ qubit and Fock primitives ------------------

// Qubit basis ordering is (|g>, |e>) = (0, 1). sigma_z is the energy
// splitting operator, sigma_z|e> = +|e>, so its matrix is diag(-1, +1)
// and the product rule reads sigma_x sigma_y = -i sigma_z.
inline MatrixXcd sigma_x() { return (MatrixXcd(2, 2) << 0, 1, 1, 0).finished(); }
inline MatrixXcd sigma_y() {
    return (MatrixXcd(2, 2) << 0, cxd(0, -1), cxd(0, 1), 0).finished();
}
inline MatrixXcd sigma_z() { return (MatrixXcd(2, 2) << -1, 0, 0, 1).finished(); }
inline MatrixXcd id2() { return MatrixXcd::Identity(2, 2); }

inline MatrixXcd annihilator(Eigen::Index dim) {
    MatrixXcd a = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

inline MatrixXcd number_op(Eigen::Index dim) {
    MatrixXcd n = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) n(k, k) = double(k);
    return n;
}

// ------------------ exponentials ------------------

// exp(-i H t) for Hermitian H, through a full eigendecomposition
struct HermitianPropagator {
    VectorXd evals;
    MatrixXcd evecs;

    explicit HermitianPropagator(const MatrixXcd& h) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eigensolver failed on hamiltonian");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors();
    }

    VectorXcd apply(const VectorXcd& psi, double t) const {
        VectorXcd w = evecs.adjoint() * psi;
        for (Eigen::Index k = 0; k < w.size(); ++k)
            w(k) *= std::exp(cxd(0, -evals(k) * t));
        return evecs * w;
    }

    MatrixXcd matrix(double t) const {
        VectorXcd ph(evals.size());
        for (Eigen::Index k = 0; k < evals.size(); ++k)
            ph(k) = std::exp(cxd(0, -evals(k) * t));
        return evecs * ph.asDiagonal() * evecs.adjoint();
    }
};

// exp(G) for anti-Hermitian G, exactly unitary on the truncated space
inline MatrixXcd expm_antihermitian(const MatrixXcd& g) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(cxd(0, 1) * g);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed on generator");
    const VectorXd& w = solver.eigenvalues();
    const MatrixXcd& v = solver.eigenvectors();
    VectorXcd ph(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) ph(k) = std::exp(cxd(0, -w(k)));
    return v * ph.asDiagonal() * v.adjoint();
}

// displacement operator D(alpha) = exp(alpha a^dag - conj(alpha) a)
inline MatrixXcd displacement(cxd alpha, Eigen::Index dim) {
    MatrixXcd a = annihilator(dim);
    MatrixXcd g = alpha * a.adjoint() - std::conj(alpha) * a;
    return expm_antihermitian(g);
}

// ------------------ state utilities ------------------

inline double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline double unitarity_defect(const MatrixXcd& u) {
    return max_abs(u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols()));
}

// reduced qubit density matrix: state indexed q + 2^N * m over mode configs
inline MatrixXcd reduce_to_qubits(const VectorXcd& psi, Eigen::Index qubit_dim) {
    if (psi.size() % qubit_dim != 0)
        throw std::invalid_argument("reduce_to_qubits: dim mismatch");
    const Eigen::Index mode_dim = psi.size() / qubit_dim;
    MatrixXcd rho = MatrixXcd::Zero(qubit_dim, qubit_dim);
    for (Eigen::Index m = 0; m < mode_dim; ++m) {
        const auto blk = psi.segment(m * qubit_dim, qubit_dim);
        rho.noalias() += blk * blk.adjoint();
    }
    return rho;
}

inline MatrixXcd reduce_to_qubits_density(const MatrixXcd& rho, Eigen::Index qubit_dim) {
    if (rho.rows() % qubit_dim != 0)
        throw std::invalid_argument("reduce_to_qubits_density: dim mismatch");
    const Eigen::Index mode_dim = rho.rows() / qubit_dim;
    MatrixXcd out = MatrixXcd::Zero(qubit_dim, qubit_dim);
    for (Eigen::Index m = 0; m < mode_dim; ++m)
        out += rho.block(m * qubit_dim, m * qubit_dim, qubit_dim, qubit_dim);
    return out;
}

inline double state_fidelity(const VectorXcd& a, const VectorXcd& b) {
    return std::norm(a.dot(b));  // |<a|b>|^2 (Eigen dot conjugates the left arg)
}

inline double fidelity_with_pure(const MatrixXcd& rho, const VectorXcd& psi) {
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

} // namespace uscqec::linalg
