#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "pauli.hpp"

// Stabilizer states as a full-rank list of n commuting Hermitian Pauli
// generators. Gates act by conjugating every generator; measurements follow
// the usual anticommutation split.

namespace uscqec::tableau {

using pauli::PauliString;

// conjugation rules for the gates the toolkit uses, sign tracked exactly
inline PauliString conjugate_cz(const PauliString& g, int u, int v) {
    std::uint64_t x = g.x_bits(), z = g.z_bits();
    const bool xu = (x >> u) & 1, xv = (x >> v) & 1;
    if (xu) z ^= 1ull << v;
    if (xv) z ^= 1ull << u;
    return PauliString(g.qubits(), x, z, g.phase() + (xu && xv ? 2 : 0));
}

inline PauliString conjugate_h(const PauliString& g, int q) {
    const std::uint64_t bit = 1ull << q;
    std::uint64_t x = g.x_bits(), z = g.z_bits();
    const bool xq = x & bit, zq = z & bit;
    x = (x & ~bit) | (zq ? bit : 0);
    z = (z & ~bit) | (xq ? bit : 0);
    return PauliString(g.qubits(), x, z, g.phase() + (xq && zq ? 2 : 0));
}

inline PauliString conjugate_s(const PauliString& g, int q) {
    const std::uint64_t bit = 1ull << q;
    std::uint64_t z = g.z_bits();
    const bool xq = g.x_bits() & bit;
    if (xq) z ^= bit;
    return PauliString(g.qubits(), g.x_bits(), z, g.phase() + (xq ? 1 : 0));
}

namespace detail {

inline std::uint64_t symplectic_word(const PauliString& p) {
    // x bits in the high half so echelon pivots prefer X-type leads
    return (std::uint64_t(p.x_bits()) << p.qubits()) | p.z_bits();
}

inline std::uint64_t top_bit(std::uint64_t w) {
    return w == 0 ? 0 : (1ull << (63 - std::countl_zero(w)));
}

// In-place reduced echelon form over GF(2) with signs carried through the
// Pauli products. The result is the unique canonical generator list of the
// row space, so two groups are equal exactly when their reduced lists match.
inline void reduce_rows(std::vector<PauliString>& rows) {
    std::size_t done = 0;
    for (int bit = 2 * rows[0].qubits() - 1; bit >= 0 && done < rows.size(); --bit) {
        const std::uint64_t mask = 1ull << bit;
        std::size_t pick = rows.size();
        for (std::size_t i = done; i < rows.size(); ++i)
            if (symplectic_word(rows[i]) & mask) {
                pick = i;
                break;
            }
        if (pick == rows.size()) continue;
        std::swap(rows[done], rows[pick]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != done && (symplectic_word(rows[i]) & mask))
                rows[i] = rows[i] * rows[done];
        ++done;
    }
}

} // namespace detail

class StabilizerTableau {
  public:
    explicit StabilizerTableau(std::vector<PauliString> generators)
        : rows_(std::move(generators)) {
        if (rows_.empty()) throw std::invalid_argument("tableau: no generators");
        n_ = rows_[0].qubits();
        if (int(rows_.size()) > n_)
            throw std::invalid_argument("tableau: more generators than qubits");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i].qubits() != n_)
                throw std::invalid_argument("tableau: mixed register sizes");
            if (!rows_[i].is_hermitian())
                throw std::invalid_argument("tableau: generators must be hermitian");
            for (std::size_t j = 0; j < i; ++j)
                if (!rows_[i].commutes_with(rows_[j]))
                    throw std::invalid_argument("tableau: generators must commute");
        }
        std::vector<PauliString> probe = rows_;
        detail::reduce_rows(probe);
        for (const auto& g : probe)
            if (g.is_identity_op())
                throw std::invalid_argument("tableau: generators are dependent");
    }

    // |+>^n, stabilized by X on every qubit
    static StabilizerTableau plus_state(int n_qubits) {
        std::vector<PauliString> gens;
        gens.reserve(std::size_t(n_qubits));
        for (int q = 0; q < n_qubits; ++q) gens.push_back(pauli::x_on(n_qubits, q));
        return StabilizerTableau(std::move(gens));
    }

    int qubits() const { return n_; }
    const std::vector<PauliString>& generators() const { return rows_; }

    void apply_cz(int u, int v) {
        check_qubit(u);
        check_qubit(v);
        if (u == v) throw std::invalid_argument("tableau: cz needs two distinct qubits");
        for (auto& g : rows_) g = conjugate_cz(g, u, v);
        canon_.reset();
    }

    void apply_h(int q) {
        check_qubit(q);
        for (auto& g : rows_) g = conjugate_h(g, q);
        canon_.reset();
    }

    void apply_s(int q) {
        check_qubit(q);
        for (auto& g : rows_) g = conjugate_s(g, q);
        canon_.reset();
    }

    // P g P^dag flips the sign of every generator anticommuting with P
    void apply_pauli(const PauliString& p) {
        for (auto& g : rows_)
            if (!g.commutes_with(p)) g = g.negated();
        canon_.reset();
    }

    // Measure a Hermitian Pauli observable and return +1 or -1. The outcome
    // is deterministic when the observable commutes with every generator and
    // a fair coin otherwise.
    template <typename Rng>
    int measure(const PauliString& obs, Rng& rng) {
        check_observable(obs);
        const std::size_t pivot = first_anticommuting(obs);
        if (pivot == rows_.size()) {
            const int value = contains(obs);
            if (value != 0) return value;
            const int outcome = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? 1 : -1;
            extend(obs, outcome);
            return outcome;
        }
        const int outcome = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? 1 : -1;
        collapse(pivot, obs, outcome);
        return outcome;
    }

    // Project onto the wanted branch. Returns false (state untouched) when
    // the branch has zero probability.
    bool postselect(const PauliString& obs, int want) {
        check_observable(obs);
        if (want != 1 && want != -1)
            throw std::invalid_argument("tableau: branch must be +1 or -1");
        const std::size_t pivot = first_anticommuting(obs);
        if (pivot == rows_.size()) {
            const int value = contains(obs);
            if (value != 0) return value == want;
            extend(obs, want);
            return true;
        }
        collapse(pivot, obs, want);
        return true;
    }

    // +1 / -1 when the observable is in the group with that sign, 0 otherwise
    int contains(const PauliString& obs) const {
        PauliString rest = obs;
        for (const auto& g : canonical_rows()) {
            if (detail::symplectic_word(rest) & detail::top_bit(detail::symplectic_word(g)))
                rest = rest * g;
        }
        if (!rest.is_identity_op()) return 0;
        return rest.sign();
    }

    const std::vector<PauliString>& canonical_rows() const& {
        if (!canon_) {
            std::vector<PauliString> work = rows_;
            detail::reduce_rows(work);
            canon_ = std::move(work);
        }
        return *canon_;
    }

    std::vector<PauliString> canonical_rows() const&& { return canonical_rows(); }

    bool group_equal(const StabilizerTableau& other) const {
        if (n_ != other.n_) return false;
        const auto& a = canonical_rows();
        const auto& b = other.canonical_rows();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!(a[i] == b[i])) return false;
        return true;
    }

    // Overlap |<a|b>|^2 of two stabilizer states: 2^(m - n) with m the
    // dimension of the group intersection when every shared element carries
    // the same sign in both groups, and 0 otherwise.
    static double overlap(const StabilizerTableau& sa, const StabilizerTableau& sb) {
        if (sa.n_ != sb.n_) throw std::invalid_argument("tableau: register size mismatch");
        if (int(sa.rows_.size()) != sa.n_ || int(sb.rows_.size()) != sb.n_)
            throw std::invalid_argument("tableau: overlap needs fully determined states");
        const auto& basis_a = sa.canonical_rows();
        const auto& basis_b = sb.canonical_rows();
        int shared = 0;
        for (const auto& elem : intersection_basis(basis_a, basis_b)) {
            PauliString rest = elem;
            for (const auto& g : basis_b)
                if (detail::symplectic_word(rest) & detail::top_bit(detail::symplectic_word(g)))
                    rest = rest * g;
            if (!rest.is_identity_op())
                throw std::logic_error("tableau: intersection element failed to reduce");
            if (rest.sign() < 0) return 0.0;
            ++shared;
        }
        return std::ldexp(1.0, shared - sa.n_);
    }

  private:
    void check_qubit(int q) const {
        if (q < 0 || q >= n_) throw std::invalid_argument("tableau: qubit index out of range");
    }

    static void check_observable(const PauliString& obs) {
        if (!obs.is_hermitian() || obs.is_identity_op())
            throw std::invalid_argument("tableau: observable must be a hermitian pauli");
    }

    std::size_t first_anticommuting(const PauliString& obs) const {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (!rows_[i].commutes_with(obs)) return i;
        return rows_.size();
    }

    // An observable commuting with every generator but outside the group is
    // only possible on an underdetermined tableau; measuring it fixes a
    // fresh generator.
    void extend(const PauliString& obs, int outcome) {
        if (int(rows_.size()) == n_)
            throw std::logic_error("tableau: full-rank reduction failed");
        rows_.push_back(outcome > 0 ? obs : obs.negated());
        canon_.reset();
    }

    void collapse(std::size_t pivot, const PauliString& obs, int outcome) {
        const PauliString anchor = rows_[pivot];
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (i != pivot && !rows_[i].commutes_with(obs)) rows_[i] = rows_[i] * anchor;
        rows_[pivot] = (outcome > 0) ? obs : obs.negated();
        canon_.reset();
    }

    // Basis of span(basis_a) intersected with span(basis_b): the kernel of
    // the map sending coefficients over basis_a to the word residue after
    // reduction by basis_b. basis_b must already be in echelon form.
    static std::vector<PauliString> intersection_basis(const std::vector<PauliString>& basis_a,
                                                       const std::vector<PauliString>& basis_b) {
        struct Row {
            std::uint64_t residue;
            std::uint64_t coeffs;
        };
        std::vector<Row> pivots;
        std::vector<std::uint64_t> kernel;
        for (std::size_t i = 0; i < basis_a.size(); ++i) {
            std::uint64_t res = detail::symplectic_word(basis_a[i]);
            for (const auto& g : basis_b) {
                const std::uint64_t gw = detail::symplectic_word(g);
                if (res & detail::top_bit(gw)) res ^= gw;
            }
            std::uint64_t coeffs = 1ull << i;
            for (const auto& p : pivots)
                if (res & detail::top_bit(p.residue)) {
                    res ^= p.residue;
                    coeffs ^= p.coeffs;
                }
            if (res == 0) {
                kernel.push_back(coeffs);
            } else {
                pivots.push_back({res, coeffs});
                std::sort(pivots.begin(), pivots.end(),
                          [](const Row& l, const Row& r) { return l.residue > r.residue; });
            }
        }
        std::vector<PauliString> out;
        out.reserve(kernel.size());
        for (const std::uint64_t coeffs : kernel) {
            PauliString prod = PauliString::identity(basis_a[0].qubits());
            for (std::size_t i = 0; i < basis_a.size(); ++i)
                if ((coeffs >> i) & 1) prod = prod * basis_a[i];
            out.push_back(prod);
        }
        return out;
    }

    int n_ = 0;
    std::vector<PauliString> rows_;
    mutable std::optional<std::vector<PauliString>> canon_;
};

} // namespace uscqec::tableau
