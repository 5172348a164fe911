#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "linalg.hpp"

// Pauli strings on up to 32 qubits in the raw phase convention
//   P = i^phase * prod_q X_q^{x_q} Z_q^{z_q}
// with qubit 0 the least significant bit and the first character of a
// string literal. Y carries (x, z) = (1, 1) and an intrinsic factor i, so a
// Hermitian string has phase congruent to its Y count mod 2.

namespace uscqec::pauli {

using linalg::cxd;
using linalg::VectorXcd;

class PauliString {
  public:
    PauliString() = default;
    PauliString(int n_qubits, std::uint64_t x_bits, std::uint64_t z_bits, int phase = 0)
        : n_(n_qubits), x_(x_bits), z_(z_bits), r_(((phase % 4) + 4) % 4) {
        if (n_qubits < 1 || n_qubits > 32)
            throw std::invalid_argument("pauli: need 1 to 32 qubits");
        const std::uint64_t mask = (1ull << n_qubits) - 1;
        if ((x_bits | z_bits) & ~mask)
            throw std::invalid_argument("pauli: bit outside the register");
    }

    static PauliString identity(int n_qubits) { return PauliString(n_qubits, 0, 0, 0); }

    // "XZZXI" or with a leading sign, "+XZZXI" / "-ZZZZZ"
    static PauliString parse(const std::string& text) {
        std::size_t start = 0;
        int phase = 0;
        if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
            if (text[0] == '-') phase = 2;
            start = 1;
        }
        const std::size_t n = text.size() - start;
        if (n == 0) throw std::invalid_argument("pauli: empty string");
        std::uint64_t x = 0, z = 0;
        int ys = 0;
        for (std::size_t i = 0; i < n; ++i) {
            switch (text[start + i]) {
                case 'I': break;
                case 'X': x |= 1ull << i; break;
                case 'Y': x |= 1ull << i; z |= 1ull << i; ++ys; break;
                case 'Z': z |= 1ull << i; break;
                default:
                    throw std::invalid_argument("pauli: unexpected letter in string");
            }
        }
        return PauliString(int(n), x, z, phase + ys);
    }

    int qubits() const { return n_; }
    std::uint64_t x_bits() const { return x_; }
    std::uint64_t z_bits() const { return z_; }
    int phase() const { return r_; }
    bool is_identity_op() const { return x_ == 0 && z_ == 0; }

    int weight() const { return std::popcount(x_ | z_); }

    PauliString operator*(const PauliString& o) const {
        require_same_register(o);
        const int phase = r_ + o.r_ + 2 * std::popcount(z_ & o.x_);
        return PauliString(n_, x_ ^ o.x_, z_ ^ o.z_, phase);
    }

    bool commutes_with(const PauliString& o) const {
        require_same_register(o);
        return ((std::popcount(x_ & o.z_) + std::popcount(z_ & o.x_)) & 1) == 0;
    }

    bool is_hermitian() const { return ((r_ - std::popcount(x_ & z_)) & 1) == 0; }

    // +1 or -1 for a Hermitian string
    int sign() const {
        if (!is_hermitian())
            throw std::logic_error("pauli: sign undefined for a non-hermitian string");
        return (((r_ - std::popcount(x_ & z_)) & 3) == 0) ? 1 : -1;
    }

    PauliString negated() const { return PauliString(n_, x_, z_, r_ + 2); }

    bool operator==(const PauliString& o) const {
        return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && r_ == o.r_;
    }
    bool same_operator(const PauliString& o) const {
        return n_ == o.n_ && x_ == o.x_ && z_ == o.z_;
    }

    std::string to_string() const {
        if (!is_hermitian())
            throw std::logic_error("pauli: only hermitian strings print");
        std::string out = sign() < 0 ? "-" : "+";
        for (int q = 0; q < n_; ++q) {
            const bool xb = (x_ >> q) & 1, zb = (z_ >> q) & 1;
            out += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
        }
        return out;
    }

    // dense action on a little-endian statevector
    VectorXcd apply_dense(const VectorXcd& psi) const {
        if (psi.size() != (Eigen::Index(1) << n_))
            throw std::invalid_argument("pauli: statevector dimension mismatch");
        static const cxd i_pow[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
        VectorXcd out(psi.size());
        for (std::uint64_t idx = 0; idx < std::uint64_t(psi.size()); ++idx) {
            const cxd val = psi(Eigen::Index(idx)) * i_pow[r_] *
                            ((std::popcount(z_ & idx) & 1) ? -1.0 : 1.0);
            out(Eigen::Index(idx ^ x_)) = val;
        }
        return out;
    }

    double expectation_dense(const VectorXcd& psi) const {
        return psi.dot(apply_dense(psi)).real();
    }

  private:
    void require_same_register(const PauliString& o) const {
        if (n_ != o.n_) throw std::invalid_argument("pauli: register size mismatch");
    }

    int n_ = 1;
    std::uint64_t x_ = 0, z_ = 0;
    int r_ = 0;
};

// single-qubit letters lifted to an n-qubit register
inline PauliString x_on(int n, int q) { return PauliString(n, 1ull << q, 0, 0); }
inline PauliString y_on(int n, int q) {
    return PauliString(n, 1ull << q, 1ull << q, 1);
}
inline PauliString z_on(int n, int q) { return PauliString(n, 0, 1ull << q, 0); }

} // namespace uscqec::pauli
