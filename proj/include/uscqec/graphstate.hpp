#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "pauli.hpp"
#include "tableau.hpp"

// Cluster states on small graphs, the controlled-phase construction circuit,
// X-basis measurement with byproduct correction, and the verification tools
// (local-unitary code map, brute-force distance, local-Clifford equivalence
// search) for the five-qubit and Steane codes.
//
// Dense statevectors here use the standard computational-basis convention:
// qubit 0 is the least significant bit, Z = diag(1, -1), and the two-qubit
// controlled phase is diag(1, 1, 1, -1).

namespace uscqec::graphstate {

using linalg::cxd;
using linalg::VectorXcd;
using pauli::PauliString;
using tableau::StabilizerTableau;

struct ZeroProjection : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SearchBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GraphSpec {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> measure_set;

    void validate() const {
        if (vertices < 1 || vertices > 32)
            throw std::invalid_argument("graph: vertex count out of range");
        std::set<std::pair<int, int>> seen;
        for (const auto& [u, v] : edges) {
            if (u < 0 || u >= vertices || v < 0 || v >= vertices)
                throw std::invalid_argument("graph: edge endpoint out of range");
            if (u == v) throw std::invalid_argument("graph: self loop");
            if (!seen.insert(std::minmax(u, v)).second)
                throw std::invalid_argument("graph: duplicate edge");
        }
        std::set<int> measured;
        for (const int q : measure_set) {
            if (q < 0 || q >= vertices)
                throw std::invalid_argument("graph: measured vertex out of range");
            if (!measured.insert(q).second)
                throw std::invalid_argument("graph: vertex measured twice");
        }
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (const auto& [a, b] : edges) {
            if (a == v) out.push_back(b);
            if (b == v) out.push_back(a);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<int> kept_vertices() const {
        std::vector<int> out;
        for (int v = 0; v < vertices; ++v)
            if (std::find(measure_set.begin(), measure_set.end(), v) == measure_set.end())
                out.push_back(v);
        return out;
    }
};

// ring of five qubits, edges listed in the construction-circuit order
inline GraphSpec five_qubit_graph() {
    return GraphSpec{5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}, {}};
}

// ten-qubit graph whose three X-measured vertices leave the Steane codeword;
// the edge list doubles as the gate order of the construction circuit
inline GraphSpec steane_graph() {
    return GraphSpec{10,
                     {{0, 9},
                      {1, 8},
                      {2, 8},
                      {2, 9},
                      {3, 7},
                      {4, 7},
                      {4, 9},
                      {5, 7},
                      {5, 8},
                      {6, 7},
                      {6, 8},
                      {6, 9}},
                     {7, 8, 9}};
}

// Edge-list text: one `u v` pair per line with 1-based vertex labels, blank
// lines and `#` comments ignored, plus an optional `measure: a b ...` line.
inline GraphSpec parse_graph_text(std::istream& in) {
    GraphSpec g;
    std::string line;
    int max_label = 0;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string first;
        if (!(row >> first)) continue;
        if (first == "measure:") {
            int label = 0;
            while (row >> label) {
                if (label < 1) throw std::invalid_argument("graph text: labels are 1-based");
                g.measure_set.push_back(label - 1);
                max_label = std::max(max_label, label);
            }
            continue;
        }
        int u = 0, v = 0;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw std::invalid_argument("graph text: expected a vertex label");
        }
        if (!(row >> v)) throw std::invalid_argument("graph text: edge line needs two labels");
        if (u < 1 || v < 1) throw std::invalid_argument("graph text: labels are 1-based");
        g.edges.emplace_back(u - 1, v - 1);
        max_label = std::max({max_label, u, v});
    }
    g.vertices = max_label;
    g.validate();
    return g;
}

inline GraphSpec parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    return parse_graph_text(in);
}

// stabilizer generators K_v = X_v prod_{u in nb(v)} Z_u
inline std::vector<PauliString> cluster_generators(const GraphSpec& g) {
    g.validate();
    std::vector<PauliString> out;
    out.reserve(std::size_t(g.vertices));
    for (int v = 0; v < g.vertices; ++v) {
        std::uint64_t z = 0;
        for (const int u : g.neighbors(v)) z |= 1ull << u;
        out.emplace_back(g.vertices, 1ull << v, z, 0);
    }
    return out;
}

inline StabilizerTableau cluster_tableau(const GraphSpec& g) {
    return StabilizerTableau(cluster_generators(g));
}

// ---------------------------------------------------------------------------
// dense construction

inline Eigen::Vector4cd ideal_cz_diag() {
    return (Eigen::Vector4cd() << 1, 1, 1, -1).finished();
}

inline VectorXcd plus_register(int n) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    return VectorXcd::Constant(dim, cxd(1.0 / std::sqrt(double(dim)), 0));
}

// diagonal two-qubit gate; the first qubit argument indexes the low bit
inline void apply_diag_gate(VectorXcd& psi, int u, int v, const Eigen::Vector4cd& diag) {
    for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
        const int key = int((idx >> u) & 1) | (int((idx >> v) & 1) << 1);
        psi(idx) *= diag(key);
    }
}

inline void apply_local_gate(VectorXcd& psi, int q, const Eigen::Matrix2cd& gate) {
    const Eigen::Index bit = Eigen::Index(1) << q;
    for (Eigen::Index base = 0; base < psi.size(); ++base) {
        if (base & bit) continue;
        const cxd lo = psi(base), hi = psi(base | bit);
        psi(base) = gate(0, 0) * lo + gate(0, 1) * hi;
        psi(base | bit) = gate(1, 0) * lo + gate(1, 1) * hi;
    }
}

inline VectorXcd build_cluster_statevector(const GraphSpec& g, const Eigen::Vector4cd& edge_gate) {
    g.validate();
    if (g.vertices > 12)
        throw DimensionGuard("cluster state: dense construction limited to 12 qubits");
    VectorXcd psi = plus_register(g.vertices);
    for (const auto& [u, v] : g.edges) apply_diag_gate(psi, u, v, edge_gate);
    return psi;
}

inline VectorXcd build_cluster_statevector(const GraphSpec& g) {
    return build_cluster_statevector(g, ideal_cz_diag());
}

// ---------------------------------------------------------------------------
// X measurement of the graph's measure set
//
// A minus outcome on vertex a is repaired by the stabilizer K_b of the
// smallest neighbor b, which anticommutes with X_a and therefore maps the
// minus branch onto the plus branch. An isolated vertex has no such
// stabilizer; Z_a restores the qubit itself and is only reachable on noisy
// branches, where no better repair exists.

inline PauliString byproduct_operator(const GraphSpec& g, int v) {
    const auto nb = g.neighbors(v);
    if (nb.empty()) return pauli::z_on(g.vertices, v);
    return cluster_generators(g)[std::size_t(nb.front())];
}

struct MeasuredState {
    VectorXcd state;           // reduced to the kept vertices, index order preserved
    std::vector<int> outcomes; // per measure_set entry
    double probability = 1;    // joint probability of the realized branch
};

namespace detail {

// contract the measured qubits of psi against <s| in the X basis and compact
// the kept qubits; sign_per_measured holds +1/-1 per measure_set entry
inline VectorXcd contract_x_basis(const VectorXcd& psi, const GraphSpec& g,
                                  const std::vector<int>& sign_per_measured) {
    const auto kept = g.kept_vertices();
    VectorXcd out = VectorXcd::Zero(Eigen::Index(1) << kept.size());
    const double scale = std::pow(0.5, 0.5 * double(g.measure_set.size()));
    for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
        double weight = scale;
        for (std::size_t k = 0; k < g.measure_set.size(); ++k)
            if (((idx >> g.measure_set[k]) & 1) && sign_per_measured[k] < 0) weight = -weight;
        Eigen::Index key = 0;
        for (std::size_t k = 0; k < kept.size(); ++k)
            key |= ((idx >> kept[k]) & 1) << k;
        out(key) += weight * psi(idx);
    }
    return out;
}

} // namespace detail

// project every measured vertex onto <+| and renormalize
inline MeasuredState postselect_plus_dense(const GraphSpec& g, const VectorXcd& psi) {
    g.validate();
    if (psi.size() != (Eigen::Index(1) << g.vertices))
        throw std::invalid_argument("measure: statevector dimension mismatch");
    MeasuredState res;
    res.outcomes.assign(g.measure_set.size(), 1);
    res.state = detail::contract_x_basis(psi, g, res.outcomes);
    res.probability = res.state.squaredNorm();
    if (res.probability < 1e-12)
        throw ZeroProjection("measure: all-plus branch has zero probability");
    res.state /= std::sqrt(res.probability);
    return res;
}

// sample each measured vertex in order, repairing minus outcomes with the
// byproduct stabilizer so every branch lands on the all-plus state
template <typename Rng>
inline MeasuredState measure_x_corrected_dense(const GraphSpec& g, VectorXcd psi, Rng& rng) {
    g.validate();
    if (psi.size() != (Eigen::Index(1) << g.vertices))
        throw std::invalid_argument("measure: statevector dimension mismatch");
    MeasuredState res;
    for (const int a : g.measure_set) {
        const Eigen::Index bit = Eigen::Index(1) << a;
        double w_plus = 0;
        for (Eigen::Index base = 0; base < psi.size(); ++base) {
            if (base & bit) continue;
            w_plus += 0.5 * std::norm(psi(base) + psi(base | bit));
        }
        const int outcome = (std::uniform_real_distribution<double>(0, 1)(rng) < w_plus) ? 1 : -1;
        const double weight = outcome > 0 ? w_plus : 1.0 - w_plus;
        const double sign = outcome > 0 ? 1.0 : -1.0;
        for (Eigen::Index base = 0; base < psi.size(); ++base) {
            if (base & bit) continue;
            const cxd half = 0.5 * (psi(base) + sign * psi(base | bit));
            psi(base) = half;
            psi(base | bit) = sign * half;
        }
        psi /= std::sqrt(weight);
        res.probability *= weight;
        if (outcome < 0) psi = byproduct_operator(g, a).apply_dense(psi);
        res.outcomes.push_back(outcome);
    }
    const std::vector<int> all_plus(g.measure_set.size(), 1);
    res.state = detail::contract_x_basis(psi, g, all_plus);
    res.state /= res.state.norm();
    return res;
}

struct MeasuredTableau {
    StabilizerTableau tab;
    std::vector<int> outcomes;
};

// Drop the measured qubits from a tableau whose group contains +/-X_a for
// each of them. Every generator then carries identity or X on a measured
// vertex; the canonical form isolates the X rows, which are removed, and the
// rest compacts onto the kept vertices.
inline StabilizerTableau reduce_to_kept(const StabilizerTableau& tab, const GraphSpec& g) {
    const int n = tab.qubits();
    if (n != g.vertices) throw std::invalid_argument("measure: tableau register mismatch");
    std::vector<PauliString> rows = tab.canonical_rows();
    for (const int a : g.measure_set) {
        const int value = tab.contains(pauli::x_on(n, a));
        if (value == 0)
            throw std::logic_error("measure: measured qubit is not in an X eigenstate");
        const std::uint64_t lead = 1ull << (n + a);
        bool replaced = false;
        for (auto& row : rows) {
            if (tableau::detail::top_bit(tableau::detail::symplectic_word(row)) == lead) {
                row = PauliString(n, 1ull << a, 0, value > 0 ? 0 : 2);
                replaced = true;
                break;
            }
        }
        if (!replaced) throw std::logic_error("measure: canonical form lacks the X row");
    }
    const auto kept = g.kept_vertices();
    std::uint64_t measured_mask = 0;
    for (const int a : g.measure_set) measured_mask |= 1ull << a;
    std::vector<PauliString> reduced;
    for (const auto& row : rows) {
        if (row.x_bits() & measured_mask) {
            if (std::popcount(row.x_bits()) == 1 && row.z_bits() == 0) continue;
            throw std::logic_error("measure: residual support on a measured qubit");
        }
        if (row.z_bits() & measured_mask)
            throw std::logic_error("measure: residual support on a measured qubit");
        std::uint64_t x = 0, z = 0;
        for (std::size_t k = 0; k < kept.size(); ++k) {
            x |= ((row.x_bits() >> kept[k]) & 1) << k;
            z |= ((row.z_bits() >> kept[k]) & 1) << k;
        }
        reduced.emplace_back(int(kept.size()), x, z, row.phase());
    }
    if (reduced.size() != kept.size())
        throw std::logic_error("measure: reduced tableau has the wrong rank");
    return StabilizerTableau(std::move(reduced));
}

template <typename Rng>
inline MeasuredTableau measure_x_corrected_tableau(const GraphSpec& g, StabilizerTableau tab,
                                                   Rng& rng) {
    g.validate();
    MeasuredTableau res{std::move(tab), {}};
    for (const int a : g.measure_set) {
        const int outcome = res.tab.measure(pauli::x_on(res.tab.qubits(), a), rng);
        if (outcome < 0) res.tab.apply_pauli(byproduct_operator(g, a));
        res.outcomes.push_back(outcome);
    }
    res.tab = reduce_to_kept(res.tab, g);
    return res;
}

inline MeasuredTableau postselect_plus_tableau(const GraphSpec& g, StabilizerTableau tab) {
    g.validate();
    MeasuredTableau res{std::move(tab), {}};
    for (const int a : g.measure_set) {
        if (!res.tab.postselect(pauli::x_on(res.tab.qubits(), a), 1))
            throw ZeroProjection("measure: all-plus branch has zero probability");
        res.outcomes.push_back(1);
    }
    res.tab = reduce_to_kept(res.tab, g);
    return res;
}

// ---------------------------------------------------------------------------
// local-unitary code map: conjugation by the phase-then-Hadamard gate S H on
// every qubit

inline StabilizerTableau lu_map(StabilizerTableau tab) {
    for (int q = 0; q < tab.qubits(); ++q) {
        tab.apply_h(q);
        tab.apply_s(q);
    }
    return tab;
}

inline StabilizerTableau lu_map_inverse(StabilizerTableau tab) {
    for (int q = 0; q < tab.qubits(); ++q) {
        tab.apply_s(q);
        tab.apply_s(q);
        tab.apply_s(q);
        tab.apply_h(q);
    }
    return tab;
}

inline void lu_map_dense(VectorXcd& psi, int n) {
    Eigen::Matrix2cd sh;
    const double r = 1.0 / std::sqrt(2.0);
    sh << cxd(r, 0), cxd(r, 0), cxd(0, r), cxd(0, -r);
    for (int q = 0; q < n; ++q) apply_local_gate(psi, q, sh);
}

// ---------------------------------------------------------------------------
// reference code groups

inline std::vector<PauliString> five_qubit_code() {
    return {PauliString::parse("+XZZXI"), PauliString::parse("+IXZZX"),
            PauliString::parse("+XIXZZ"), PauliString::parse("+ZXIXZ")};
}

// state left by the construction: the code space fixed to the -1 eigenstate
// of the transversal logical Z
inline StabilizerTableau five_qubit_state_group() {
    auto gens = five_qubit_code();
    gens.push_back(PauliString::parse("-ZZZZZ"));
    return StabilizerTableau(std::move(gens));
}

inline std::vector<PauliString> steane_code() {
    return {PauliString::parse("+IIIXXXX"), PauliString::parse("+IXXIIXX"),
            PauliString::parse("+XIXIXIX"), PauliString::parse("+IIIZZZZ"),
            PauliString::parse("+IZZIIZZ"), PauliString::parse("+ZIZIZIZ")};
}

// state left by the construction: the code space fixed to the +1 eigenstate
// of the transversal logical X
inline StabilizerTableau steane_state_group() {
    auto gens = steane_code();
    gens.push_back(PauliString::parse("+XXXXXXX"));
    return StabilizerTableau(std::move(gens));
}

// ---------------------------------------------------------------------------
// brute-force code distance: smallest weight of a Pauli commuting with every
// generator yet outside the generated group, or nullopt when every operator
// up to w_max is exhausted

inline std::optional<int> code_distance(const std::vector<PauliString>& generators, int w_max) {
    if (generators.empty()) throw std::invalid_argument("distance: no generators");
    const int n = generators[0].qubits();
    for (const auto& gen : generators)
        if (gen.qubits() != n) throw std::invalid_argument("distance: register size mismatch");
    if (w_max < 1 || w_max > n) throw std::invalid_argument("distance: weight cap out of range");

    std::vector<std::uint64_t> basis;
    for (const auto& gen : generators) {
        std::uint64_t word = tableau::detail::symplectic_word(gen);
        for (const std::uint64_t b : basis)
            if (word & tableau::detail::top_bit(b)) word ^= b;
        if (word != 0) {
            basis.push_back(word);
            std::sort(basis.rbegin(), basis.rend());
        }
    }

    auto in_span = [&](std::uint64_t word) {
        for (const std::uint64_t b : basis)
            if (word & tableau::detail::top_bit(b)) word ^= b;
        return word == 0;
    };
    auto commutes_with_all = [&](std::uint64_t x, std::uint64_t z) {
        for (const auto& gen : generators) {
            const int parity =
                std::popcount(x & gen.z_bits()) + std::popcount(z & gen.x_bits());
            if (parity & 1) return false;
        }
        return true;
    };

    static constexpr std::array<std::pair<unsigned, unsigned>, 3> letters = {
        {{1u, 0u}, {0u, 1u}, {1u, 1u}}};
    for (int w = 1; w <= w_max; ++w) {
        std::vector<char> mask(std::size_t(n), 0);
        std::fill(mask.begin(), mask.begin() + w, char(1));
        do {
            std::vector<int> support;
            for (int q = 0; q < n; ++q)
                if (mask[std::size_t(q)]) support.push_back(q);
            long patterns = 1;
            for (int k = 0; k < w; ++k) patterns *= 3;
            for (long pat = 0; pat < patterns; ++pat) {
                std::uint64_t x = 0, z = 0;
                long digits = pat;
                for (const int q : support) {
                    const auto& [lx, lz] = letters[std::size_t(digits % 3)];
                    digits /= 3;
                    x |= std::uint64_t(lx) << q;
                    z |= std::uint64_t(lz) << q;
                }
                if (!commutes_with_all(x, z)) continue;
                if (!in_span((x << n) | z)) return w;
            }
        } while (std::prev_permutation(mask.begin(), mask.end()));
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// local-Clifford equivalence search
//
// Single-qubit Cliffords act on {X, Y, Z} as the six letter permutations,
// with any leftover signs absorbable into a Pauli layer. The search walks
// every per-qubit permutation assignment, compares the transported group to
// the target over GF(2), and on a hit reconstructs concrete H/S words plus
// the sign-fixing Pauli layer, verifying the witness before returning it.
// For graph states this decides exactly the local-complementation orbit
// question, with the Clifford layer itself as the witness.

struct LcWitness {
    std::vector<std::string> words; // per-qubit gate letters in application order
    PauliString pauli_layer;        // applied after the single-qubit gates

    bool identity() const {
        for (const auto& w : words)
            if (!w.empty()) return false;
        return pauli_layer.is_identity_op();
    }
};

struct LcResult {
    bool equivalent = false;
    LcWitness witness;
    std::uint64_t assignments_checked = 0;
};

namespace detail {

struct LocalClifford {
    std::string word;       // 'H'/'S' operations in application order
    PauliString img_x{1, 1, 0, 0};
    PauliString img_z{1, 0, 1, 0};
};

// the six letter permutations, realized by breadth-first search over H/S
// words so the identity comes first and words are shortest
inline const std::vector<LocalClifford>& local_clifford_catalogue() {
    static const std::vector<LocalClifford> table = [] {
        auto key_of = [](const LocalClifford& c) {
            return int(c.img_x.x_bits() | (c.img_x.z_bits() << 1)) * 4 +
                   int(c.img_z.x_bits() | (c.img_z.z_bits() << 1));
        };
        std::vector<LocalClifford> found;
        std::set<int> seen;
        std::vector<LocalClifford> frontier{LocalClifford{}};
        while (found.size() < 6) {
            std::vector<LocalClifford> next;
            for (const auto& c : frontier) {
                if (seen.insert(key_of(c)).second) found.push_back(c);
                for (const char op : {'H', 'S'}) {
                    LocalClifford grown = c;
                    grown.word += op;
                    if (op == 'H') {
                        grown.img_x = tableau::conjugate_h(grown.img_x, 0);
                        grown.img_z = tableau::conjugate_h(grown.img_z, 0);
                    } else {
                        grown.img_x = tableau::conjugate_s(grown.img_x, 0);
                        grown.img_z = tableau::conjugate_s(grown.img_z, 0);
                    }
                    next.push_back(grown);
                }
            }
            frontier = std::move(next);
        }
        return found;
    }();
    return table;
}

// conjugate one generator through the per-qubit permutation assignment
inline PauliString transport(const PauliString& gen, const std::vector<int>& assignment) {
    const auto& table = local_clifford_catalogue();
    const int n = gen.qubits();
    PauliString out = PauliString(n, 0, 0, gen.phase());
    for (int q = 0; q < n; ++q) {
        const bool xb = (gen.x_bits() >> q) & 1, zb = (gen.z_bits() >> q) & 1;
        const auto& cl = table[std::size_t(assignment[std::size_t(q)])];
        if (xb) {
            const auto& img = cl.img_x;
            out = out * PauliString(n, img.x_bits() << q, img.z_bits() << q, img.phase());
        }
        if (zb) {
            const auto& img = cl.img_z;
            out = out * PauliString(n, img.x_bits() << q, img.z_bits() << q, img.phase());
        }
    }
    return out;
}

// canonical GF(2) row space of the words alone
inline std::vector<std::uint64_t> word_basis(const std::vector<std::uint64_t>& words) {
    std::vector<std::uint64_t> basis;
    for (std::uint64_t w : words) {
        for (const std::uint64_t b : basis)
            if (w & tableau::detail::top_bit(b)) w ^= b;
        if (w != 0) {
            basis.push_back(w);
            std::sort(basis.rbegin(), basis.rend());
        }
    }
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (i != j && (basis[j] & tableau::detail::top_bit(basis[i]))) basis[j] ^= basis[i];
    std::sort(basis.rbegin(), basis.rend());
    return basis;
}

// solve <p, row_i>_symplectic = flip_i over GF(2) for the sign-fixing layer;
// always solvable when the rows are independent
inline PauliString solve_pauli_layer(const std::vector<PauliString>& rows,
                                     const std::vector<int>& flips) {
    const int n = rows[0].qubits();
    struct Eq {
        std::uint64_t coeff;
        int rhs;
    };
    std::vector<Eq> eqs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        // unknown packed as (px << n) | pz; <p, row> couples px with z bits
        // and pz with x bits
        eqs.push_back({(rows[i].z_bits() << n) | rows[i].x_bits(), flips[i]});
    }
    std::uint64_t px = 0, pz = 0;
    std::vector<Eq> pivots;
    for (auto eq : eqs) {
        for (const auto& p : pivots)
            if (eq.coeff & tableau::detail::top_bit(p.coeff)) {
                eq.coeff ^= p.coeff;
                eq.rhs ^= p.rhs;
            }
        if (eq.coeff == 0) {
            if (eq.rhs != 0)
                throw std::logic_error("lc search: inconsistent sign system");
            continue;
        }
        pivots.push_back(eq);
        std::sort(pivots.begin(), pivots.end(),
                  [](const Eq& a, const Eq& b) { return a.coeff > b.coeff; });
    }
    // back-substitute, assigning each pivot's leading unknown
    std::uint64_t solution = 0;
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const std::uint64_t lead = tableau::detail::top_bit(it->coeff);
        const int parity = std::popcount(it->coeff & solution) & 1;
        if (parity != it->rhs) solution |= lead;
    }
    px = solution >> n;
    pz = solution & ((1ull << n) - 1);
    return PauliString(n, px, pz, std::popcount(px & pz));
}

} // namespace detail

// Decide whether the graph's post-measurement state is local-Clifford
// equivalent to the target group, returning the verified per-qubit witness.
inline LcResult lc_orbit_check(const GraphSpec& g, const StabilizerTableau& target,
                               std::uint64_t budget = 1000000) {
    g.validate();
    StabilizerTableau source = g.measure_set.empty()
                                   ? cluster_tableau(g)
                                   : postselect_plus_tableau(g, cluster_tableau(g)).tab;
    const int n = source.qubits();
    if (n != target.qubits())
        throw std::invalid_argument("lc search: register size mismatch with target");
    if (target.generators().size() != std::size_t(n))
        throw std::invalid_argument("lc search: target must be a fully determined state");

    std::uint64_t total = 1;
    for (int q = 0; q < n; ++q) {
        if (total > budget / 6 + 1) throw SearchBudgetExceeded("lc search: assignment count");
        total *= 6;
    }
    if (total > budget) throw SearchBudgetExceeded("lc search: assignment count");

    const auto& table = detail::local_clifford_catalogue();
    const auto& src_rows = source.canonical_rows();
    std::vector<std::uint64_t> target_words;
    for (const auto& row : target.canonical_rows())
        target_words.push_back(tableau::detail::symplectic_word(row));
    const auto target_basis = detail::word_basis(target_words);

    // per qubit and permutation: images of the (x, z) bit pair as bit pairs
    struct LetterMap {
        std::array<std::pair<std::uint64_t, std::uint64_t>, 4> img;
    };
    std::vector<LetterMap> maps(6);
    for (int p = 0; p < 6; ++p) {
        for (unsigned letter = 0; letter < 4; ++letter) {
            std::uint64_t x = 0, z = 0;
            if (letter & 1u) {
                x ^= table[std::size_t(p)].img_x.x_bits();
                z ^= table[std::size_t(p)].img_x.z_bits();
            }
            if (letter & 2u) {
                x ^= table[std::size_t(p)].img_z.x_bits();
                z ^= table[std::size_t(p)].img_z.z_bits();
            }
            maps[std::size_t(p)].img[letter] = {x, z};
        }
    }

    LcResult res;
    std::vector<int> assignment(std::size_t(n), 0);
    std::vector<std::uint64_t> words(src_rows.size());
    for (std::uint64_t counter = 0; counter < total; ++counter) {
        std::uint64_t c = counter;
        for (int q = 0; q < n; ++q) {
            assignment[std::size_t(q)] = int(c % 6);
            c /= 6;
        }
        ++res.assignments_checked;
        for (std::size_t i = 0; i < src_rows.size(); ++i) {
            std::uint64_t x = 0, z = 0;
            for (int q = 0; q < n; ++q) {
                const unsigned letter = unsigned(((src_rows[i].x_bits() >> q) & 1) |
                                                 (((src_rows[i].z_bits() >> q) & 1) << 1));
                const auto& [ix, iz] = maps[std::size_t(assignment[std::size_t(q)])].img[letter];
                x |= ix << q;
                z |= iz << q;
            }
            words[i] = (x << n) | z;
        }
        if (detail::word_basis(words) != target_basis) continue;

        // honest reconstruction: conjugate the source generators through the
        // chosen words, then solve for the sign-fixing Pauli layer
        std::vector<PauliString> moved;
        for (const auto& row : src_rows) moved.push_back(detail::transport(row, assignment));
        StabilizerTableau moved_tab{moved};
        const auto& target_rows = target.canonical_rows();
        std::vector<int> flips;
        for (const auto& trow : target_rows) {
            const int value = moved_tab.contains(trow);
            if (value == 0) throw std::logic_error("lc search: word match without group match");
            flips.push_back(value < 0 ? 1 : 0);
        }
        LcWitness witness;
        for (int q = 0; q < n; ++q)
            witness.words.push_back(table[std::size_t(assignment[std::size_t(q)])].word);
        witness.pauli_layer = detail::solve_pauli_layer(target_rows, flips);
        moved_tab.apply_pauli(witness.pauli_layer);
        if (!moved_tab.group_equal(target))
            throw std::logic_error("lc search: witness failed verification");
        res.equivalent = true;
        res.witness = witness;
        return res;
    }
    return res;
}

} // namespace uscqec::graphstate
