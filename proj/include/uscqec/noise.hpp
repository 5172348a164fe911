#pragma once

// Monte Carlo fidelity estimation for graph-code construction circuits under
// uncorrelated depolarizing gate noise and classical measurement flips.
//
// A trial replays the construction schedule: prepare the plus register, draw
// a single-qubit depolarizing error after each preparation (p1), apply the
// controlled-phase gates in edge order with a two-qubit error after each
// (p2), then measure the designated vertices in the X basis. Each recorded
// outcome flips with probability p_m before the byproduct correction is
// applied, so a flipped record leaves the wrong branch uncorrected. The
// trial fidelity is the overlap of the surviving register with the ideal
// code state.
//
// All randomness is drawn by the shared trial driver, so the stabilizer
// backend and the dense statevector backend consume identical streams and
// can be compared trajectory by trajectory. Measurement coins are fair: an
// X measurement on a Pauli-corrupted cluster state with a connected measured
// vertex is balanced, and both backends check the branch they are forced
// into is reachable.

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "uscqec/graphstate.hpp"
#include "uscqec/pauli.hpp"
#include "uscqec/tableau.hpp"

namespace uscqec::noise {

using linalg::cxd;
using linalg::MatrixXcd;
using linalg::VectorXcd;
using pauli::PauliString;
using tableau::StabilizerTableau;

struct NoiseModel {
    double p1 = 0;
    double p2 = 0;
    double p_m = 0;

    void validate() const {
        for (const double p : {p1, p2, p_m})
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise: probability outside [0,1]");
    }
};

struct FidelityEstimate {
    double mean = 0;
    double std_error = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

enum class CodeKind { five_qubit, steane };

namespace detail {

inline void check_support(int n_qubits, const std::vector<int>& support) {
    if (support.empty() || support.size() > 2)
        throw std::invalid_argument("noise: support must hold one or two qubits");
    for (const int q : support)
        if (q < 0 || q >= n_qubits) throw std::invalid_argument("noise: support qubit out of range");
    if (support.size() == 2 && support[0] == support[1])
        throw std::invalid_argument("noise: support qubits must be distinct");
}

// nontrivial Pauli on the given support, indexed 1 .. 4^k - 1 by the
// (x, z) bit pairs of each support qubit
inline PauliString support_pauli(int n_qubits, const std::vector<int>& support, unsigned index) {
    std::uint64_t x = 0, z = 0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if ((index >> (2 * i)) & 1u) x |= std::uint64_t(1) << support[i];
        if ((index >> (2 * i + 1)) & 1u) z |= std::uint64_t(1) << support[i];
    }
    return PauliString(n_qubits, x, z, std::popcount(x & z));
}

// P rho P for a Hermitian Pauli, column-wise to avoid materializing P
inline MatrixXcd pauli_sandwich(const PauliString& p, const MatrixXcd& rho) {
    MatrixXcd a(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < rho.cols(); ++c) a.col(c) = p.apply_dense(rho.col(c));
    const MatrixXcd b = a.adjoint();
    for (Eigen::Index c = 0; c < b.cols(); ++c) a.col(c) = p.apply_dense(b.col(c));
    return a.adjoint();
}

inline int qubits_of_density(const MatrixXcd& rho) {
    const auto dim = std::uint64_t(rho.rows());
    if (rho.rows() != rho.cols() || dim == 0 || (dim & (dim - 1)) != 0)
        throw std::invalid_argument("noise: density matrix dimension is not a power of two");
    return std::countr_zero(dim);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d49bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index));
}

} // namespace detail

// one draw of the depolarizing channel: identity with probability 1 - p,
// otherwise a uniformly chosen nontrivial Pauli on the support
template <typename Rng>
PauliString sample_depolarizing(int n_qubits, const std::vector<int>& support, double p, Rng& rng) {
    detail::check_support(n_qubits, support);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise: probability outside [0,1]");
    const double u = std::uniform_real_distribution<double>(0, 1)(rng);
    if (u >= p) return PauliString::identity(n_qubits);
    const unsigned top = (1u << (2 * support.size())) - 1;
    const unsigned index = std::uniform_int_distribution<unsigned>(1, top)(rng);
    return detail::support_pauli(n_qubits, support, index);
}

// exact mixture: (1 - p) rho + p / (4^k - 1) * sum of P rho P over the
// nontrivial Paulis on the support
inline MatrixXcd depolarize_density(const MatrixXcd& rho, const std::vector<int>& support, double p) {
    const int n = detail::qubits_of_density(rho);
    detail::check_support(n, support);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noise: probability outside [0,1]");
    const unsigned top = (1u << (2 * support.size())) - 1;
    MatrixXcd out = (1.0 - p) * rho;
    const double w = p / double(top);
    for (unsigned index = 1; index <= top; ++index)
        out += w * detail::pauli_sandwich(detail::support_pauli(n, support, index), rho);
    return out;
}

// rho = F |psi><psi| + (1 - F) I / 2^nu
inline MatrixXcd logical_state_model(const VectorXcd& pure, double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0))
        throw std::invalid_argument("noise: fidelity outside [0,1]");
    if (std::abs(pure.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("noise: logical state must be normalized");
    const auto dim = pure.size();
    return fidelity * (pure * pure.adjoint()) +
           ((1.0 - fidelity) / double(dim)) * MatrixXcd::Identity(dim, dim);
}

inline MatrixXcd logical_state_model(double fidelity, int nu) {
    if (nu < 1 || nu > 12) throw std::invalid_argument("noise: qubit count outside 1..12");
    VectorXcd pure = VectorXcd::Zero(Eigen::Index(1) << nu);
    pure(0) = 1.0;
    return logical_state_model(pure, fidelity);
}

// construction target bundled with its ideal end states on the kept qubits
struct CodeProtocol {
    graphstate::GraphSpec graph;
    StabilizerTableau ideal_tableau;
    VectorXcd ideal_state;
};

inline CodeProtocol graph_protocol(const graphstate::GraphSpec& g) {
    g.validate();
    const VectorXcd full = graphstate::build_cluster_statevector(g);
    if (g.measure_set.empty())
        return CodeProtocol{g, graphstate::cluster_tableau(g), full};
    return CodeProtocol{g, graphstate::postselect_plus_tableau(g, graphstate::cluster_tableau(g)).tab,
                        graphstate::postselect_plus_dense(g, full).state};
}

inline CodeProtocol protocol_for(CodeKind code) {
    switch (code) {
    case CodeKind::five_qubit: return graph_protocol(graphstate::five_qubit_graph());
    case CodeKind::steane: return graph_protocol(graphstate::steane_graph());
    }
    throw std::invalid_argument("noise: unknown code");
}

// stabilizer-tableau trial state
class TrajectoryTableau {
public:
    void prepare(int n_qubits) { tab_.emplace(StabilizerTableau::plus_state(n_qubits)); }
    void apply_cz(int u, int v) { tab_->apply_cz(u, v); }
    void apply_pauli(const PauliString& p) { tab_->apply_pauli(p); }

    void collapse_x(int q, int outcome) {
        if (!tab_->postselect(pauli::x_on(tab_->qubits(), q), outcome))
            throw std::logic_error("noise: forced measurement branch has zero probability");
    }

    double fidelity(const CodeProtocol& protocol) const {
        if (protocol.graph.measure_set.empty())
            return StabilizerTableau::overlap(*tab_, protocol.ideal_tableau);
        return StabilizerTableau::overlap(graphstate::reduce_to_kept(*tab_, protocol.graph),
                                          protocol.ideal_tableau);
    }

    const StabilizerTableau& state() const { return *tab_; }

private:
    std::optional<StabilizerTableau> tab_;
};

// dense statevector trial state, for validating the tableau path
class TrajectoryDense {
public:
    void prepare(int n_qubits) { psi_ = graphstate::plus_register(n_qubits); }

    void apply_cz(int u, int v) { graphstate::apply_diag_gate(psi_, u, v, graphstate::ideal_cz_diag()); }
    void apply_pauli(const PauliString& p) { psi_ = p.apply_dense(psi_); }

    void collapse_x(int q, int outcome) {
        const Eigen::Index bit = Eigen::Index(1) << q;
        const double sign = outcome > 0 ? 1.0 : -1.0;
        double weight = 0;
        for (Eigen::Index base = 0; base < psi_.size(); ++base) {
            if (base & bit) continue;
            weight += 0.5 * std::norm(psi_(base) + sign * psi_(base | bit));
        }
        if (std::abs(weight - 0.5) > 1e-9)
            throw std::logic_error("noise: X measurement is not balanced");
        for (Eigen::Index base = 0; base < psi_.size(); ++base) {
            if (base & bit) continue;
            const cxd half = 0.5 * (psi_(base) + sign * psi_(base | bit));
            psi_(base) = half;
            psi_(base | bit) = sign * half;
        }
        psi_ /= std::sqrt(weight);
    }

    double fidelity(const CodeProtocol& protocol) const {
        if (protocol.graph.measure_set.empty()) return std::norm(protocol.ideal_state.dot(psi_));
        // each measured qubit sits in a definite X eigenstate; read it off
        // and contract it away
        std::vector<int> signs;
        for (const int a : protocol.graph.measure_set) {
            const Eigen::Index bit = Eigen::Index(1) << a;
            double w_plus = 0;
            for (Eigen::Index base = 0; base < psi_.size(); ++base) {
                if (base & bit) continue;
                w_plus += 0.5 * std::norm(psi_(base) + psi_(base | bit));
            }
            if (std::abs(w_plus) > 1e-9 && std::abs(w_plus - 1.0) > 1e-9)
                throw std::logic_error("noise: measured qubit left in superposition");
            signs.push_back(w_plus > 0.5 ? 1 : -1);
        }
        VectorXcd kept = graphstate::detail::contract_x_basis(psi_, protocol.graph, signs);
        kept /= kept.norm();
        return std::norm(protocol.ideal_state.dot(kept));
    }

    const VectorXcd& state() const { return psi_; }

private:
    VectorXcd psi_;
};

// one full construction run; all random draws happen here so every backend
// sees the same stream
template <typename Backend, typename Rng>
double run_code_trial(Backend& backend, const CodeProtocol& protocol, const NoiseModel& noise,
                      Rng& rng) {
    noise.validate();
    const int n = protocol.graph.vertices;
    backend.prepare(n);
    for (int q = 0; q < n; ++q) {
        const PauliString err = sample_depolarizing(n, {q}, noise.p1, rng);
        if (!err.is_identity_op()) backend.apply_pauli(err);
    }
    for (const auto& [u, v] : protocol.graph.edges) {
        backend.apply_cz(u, v);
        const PauliString err = sample_depolarizing(n, {u, v}, noise.p2, rng);
        if (!err.is_identity_op()) backend.apply_pauli(err);
    }
    for (const int a : protocol.graph.measure_set) {
        const int outcome = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
        backend.collapse_x(a, outcome);
        int recorded = outcome;
        if (std::uniform_real_distribution<double>(0, 1)(rng) < noise.p_m) recorded = -recorded;
        if (recorded < 0) backend.apply_pauli(graphstate::byproduct_operator(protocol.graph, a));
    }
    return backend.fidelity(protocol);
}

inline FidelityEstimate montecarlo_fidelity(const CodeProtocol& protocol, const NoiseModel& noise,
                                            std::uint64_t trials, std::uint64_t seed, int jobs = 1) {
    noise.validate();
    if (trials < 1) throw std::invalid_argument("noise: need at least one trial");
    if (jobs < 1) throw std::invalid_argument("noise: need at least one job");
    protocol.ideal_tableau.canonical_rows();

    std::vector<double> values(trials);
    const auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            std::mt19937_64 rng(detail::trial_seed(seed, i));
            TrajectoryTableau backend;
            values[i] = run_code_trial(backend, protocol, noise, rng);
        }
    };

    const auto workers = std::uint64_t(std::min<std::uint64_t>(std::uint64_t(jobs), trials));
    if (workers <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (trials + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * chunk;
            if (lo >= trials) break;
            pool.emplace_back(run_range, lo, std::min(trials, lo + chunk));
        }
        for (auto& t : pool) t.join();
    }

    // aggregate in trial order so the estimate is independent of jobs
    double sum = 0;
    for (const double v : values) sum += v;
    const double mean = sum / double(trials);
    double sq = 0;
    for (const double v : values) sq += (v - mean) * (v - mean);
    const double sample_var = trials > 1 ? sq / double(trials - 1) : 0.0;
    return FidelityEstimate{mean, std::sqrt(sample_var / double(trials)), trials, seed};
}

inline FidelityEstimate montecarlo_fidelity(CodeKind code, const NoiseModel& noise,
                                            std::uint64_t trials, std::uint64_t seed, int jobs = 1) {
    return montecarlo_fidelity(protocol_for(code), noise, trials, seed, jobs);
}

// exact channel composition for measurement-free construction graphs; the
// oracle the trajectory estimates must converge to
inline double exact_channel_fidelity(const graphstate::GraphSpec& g, const NoiseModel& noise) {
    g.validate();
    noise.validate();
    if (!g.measure_set.empty())
        throw std::invalid_argument("noise: exact channel needs a measurement-free graph");
    if (g.vertices > 6) throw std::invalid_argument("noise: exact channel limited to 6 qubits");

    const Eigen::Index dim = Eigen::Index(1) << g.vertices;
    const VectorXcd ideal = graphstate::build_cluster_statevector(g);
    VectorXcd plus = graphstate::plus_register(g.vertices);
    MatrixXcd rho = plus * plus.adjoint();
    for (int q = 0; q < g.vertices; ++q) rho = depolarize_density(rho, {q}, noise.p1);
    for (const auto& [u, v] : g.edges) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            const bool ru = (r >> u) & 1, rv = (r >> v) & 1;
            for (Eigen::Index c = 0; c < dim; ++c) {
                const bool cu = (c >> u) & 1, cv = (c >> v) & 1;
                const double s = ((ru && rv) ? -1.0 : 1.0) * ((cu && cv) ? -1.0 : 1.0);
                rho(r, c) *= s;
            }
        }
        rho = depolarize_density(rho, {u, v}, noise.p2);
    }
    return (ideal.adjoint() * rho * ideal)(0).real();
}

} // namespace uscqec::noise
