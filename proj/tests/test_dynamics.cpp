#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include <uscqec/constants.hpp>
#include <uscqec/evolution.hpp>
#include <uscqec/rabi.hpp>
#include <uscqec/studies.hpp>

using namespace uscqec;
using linalg::cxd;
using linalg::MatrixXcd;
using linalg::VectorXcd;

namespace {

rabi::RabiParams two_qubit_params(double g0, double g1, double cx, double cz,
                                  int cutoff) {
    rabi::RabiParams p;
    p.omega = constants::two_pi * 5.0;
    p.cutoff = cutoff;
    p.mode_count = 2;
    const double wq = constants::two_pi * 1.0;
    p.qubits = {{wq, g0, cx, cz}, {wq, g1, cx, cz}};
    return p;
}

double state_overlap(const VectorXcd& a, const VectorXcd& b) {
    return std::norm(a.dot(b));
}

// fidelity of the corrected evolved state against a 4-component qubit target
double corrected_overlap(const VectorXcd& psi, double theta,
                         const Eigen::Vector4cd& target) {
    const Eigen::Index modes_dim = psi.size() / 4;
    double f = 0;
    for (Eigen::Index m = 0; m < modes_dim; ++m) {
        cxd amp = 0;
        for (Eigen::Index q = 0; q < 4; ++q) {
            const double z0 = (q & 1) ? 1.0 : -1.0;
            const double z1 = (q & 2) ? 1.0 : -1.0;
            amp += std::conj(target(q)) * std::exp(cxd(0, theta * (z0 + z1))) *
                   psi(q + 4 * m);
        }
        f += std::norm(amp);
    }
    return f;
}

} // namespace

TEST_CASE("rabi: hamiltonian is hermitian and the dimension guard holds") {
    auto p = two_qubit_params(1.3, 0.8, 0.2, 0.9, 5);
    const MatrixXcd h = rabi::hamiltonian(p);
    CHECK(linalg::max_abs(h - h.adjoint()) < 1e-12);

    rabi::RabiParams big;
    big.qubits = {{1, 0, 0, 1}, {1, 0, 0, 1}, {1, 0, 0, 1}};
    big.mode_count = 2;
    big.cutoff = 400;
    CHECK_THROWS_AS(big.validate(), rabi::DimensionGuard);

    rabi::RabiParams none;
    CHECK_THROWS_AS(none.validate(), std::invalid_argument);
}

TEST_CASE("evolution: closed form matches full diagonalization") {
    const double omega = constants::two_pi * 5.0;
    auto p = two_qubit_params(0.10 * omega, 0.15 * omega, 0.0, 1.0, 15);
    const linalg::HermitianPropagator prop(rabi::hamiltonian(p));

    const VectorXcd vac = rabi::fock_state(0, p.mode_dim());
    const VectorXcd coh = studies::coherent_state(0.2, p.mode_dim());
    const VectorXcd psi0 = rabi::assemble_state(p, rabi::plus_register(2), {vac, coh});

    for (double t : {0.013, 0.05, 0.087, 0.121, 0.15, 0.199}) {
        const VectorXcd numeric = prop.apply(psi0, t);
        const VectorXcd analytic = evolution::evolve_analytic(p, psi0, t);
        CHECK(analytic.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(linalg::max_abs(numeric - analytic) < 1e-8);
        CHECK(1.0 - state_overlap(numeric, analytic) < 1e-10);
    }
}

TEST_CASE("evolution: closed form works with a single mode") {
    const double omega = constants::two_pi * 5.0;
    auto p = two_qubit_params(0.17 * omega, 0.17 * omega, 0.0, 1.0, 25);
    p.mode_count = 1;
    const linalg::HermitianPropagator prop(rabi::hamiltonian(p));
    const VectorXcd psi0 = rabi::assemble_state(
        p, rabi::plus_register(2), {studies::coherent_state(0.4, p.mode_dim())});
    const VectorXcd numeric = prop.apply(psi0, 0.11);
    const VectorXcd analytic = evolution::evolve_analytic(p, psi0, 0.11);
    CHECK(linalg::max_abs(numeric - analytic) < 1e-10);
}

TEST_CASE("evolution: closed form refuses transverse coupling") {
    auto p = two_qubit_params(1.0, 1.0, 0.3, std::sqrt(1 - 0.09), 6);
    const VectorXcd psi0 = rabi::assemble_state(
        p, rabi::plus_register(2),
        {rabi::fock_state(0, p.mode_dim()), rabi::fock_state(0, p.mode_dim())});
    CHECK_THROWS_AS(evolution::evolve_analytic(p, psi0, 0.1), evolution::BasisMismatch);
}

TEST_CASE("evolution: schedule satisfies both phase-matching conditions") {
    evolution::GateSchedule sched;  // one period, two modes
    CHECK(sched.kappa() == doctest::Approx(1.0 / (4.0 * std::sqrt(2.0))).epsilon(1e-15));
    CHECK(sched.gate_time(constants::two_pi * 5.0) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK_NOTHROW(
        evolution::check_phase_conditions(sched.kappa(), sched.kappa(), 1, 2));
    CHECK_THROWS_AS(
        evolution::check_phase_conditions(sched.kappa() * 1.01, sched.kappa(), 1, 2),
        evolution::ConditionViolated);

    evolution::GateSchedule slow{3, 1};
    CHECK_NOTHROW(evolution::check_phase_conditions(slow.kappa(), slow.kappa(), 3, 1));
}

TEST_CASE("evolution: corrected phases land exactly on the controlled-phase gate") {
    const double omega = constants::two_pi * 5.0;
    for (auto [wq0, wq1] : {std::pair{constants::two_pi * 1.0, constants::two_pi * 1.0},
                            std::pair{constants::two_pi * 0.9, constants::two_pi * 1.7}}) {
        const auto rep = evolution::ultrafast_cz(omega, wq0, wq1, {1, 2});
        CHECK(rep.max_error < 1e-12);
        for (int s = 0; s < 4; ++s)
            CHECK(std::abs(rep.uncorrected(s)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto rep_slow =
        evolution::ultrafast_cz(omega, constants::two_pi * 1.0, constants::two_pi * 1.0,
                                {2, 1});
    CHECK(rep_slow.max_error < 1e-12);
}

TEST_CASE("evolution: gate phases agree with the numeric propagator at closure") {
    const double omega = constants::two_pi * 5.0;
    evolution::GateSchedule sched;
    const double g = sched.kappa() * omega;
    auto p = two_qubit_params(g, g, 0.0, 1.0, 10);
    const linalg::HermitianPropagator prop(rabi::hamiltonian(p));
    const auto rep = evolution::ultrafast_cz(omega, p.qubits[0].omega_q,
                                             p.qubits[1].omega_q, sched);
    const double t = sched.gate_time(omega);
    const VectorXcd vac = rabi::fock_state(0, p.mode_dim());
    for (Eigen::Index q = 0; q < 4; ++q) {
        VectorXcd basis = VectorXcd::Zero(4);
        basis(q) = 1.0;
        const VectorXcd psi = prop.apply(rabi::assemble_state(p, basis, {vac, vac}), t);
        const cxd amp = psi(q);  // modes return to vacuum at closure
        CHECK(std::abs(amp - rep.uncorrected(q)) < 1e-9);
        CHECK(std::abs(amp) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("rabi: imaginary-time projection matches the eigensolver ground state") {
    auto p = two_qubit_params(0.8, 0.8, 0.35, std::sqrt(1 - 0.35 * 0.35), 4);
    const MatrixXcd h = rabi::hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(h);
    REQUIRE(eig.info() == Eigen::Success);
    const VectorXcd ground = eig.eigenvectors().col(0);

    std::mt19937_64 rng(42);
    std::normal_distribution<double> dist(0.0, 1.0);
    VectorXcd v(h.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cxd(dist(rng), dist(rng));
    const MatrixXcd projector = (-4.0 * h).exp();
    VectorXcd cooled = projector * v;
    cooled /= cooled.norm();
    CHECK(1.0 - state_overlap(cooled, ground) < 1e-9);
}

TEST_CASE("studies: coherent state moments and tail guard") {
    const VectorXcd c = studies::coherent_state(0.5, 16);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-13));
    double mean = 0;
    for (Eigen::Index n = 0; n < c.size(); ++n) mean += double(n) * std::norm(c(n));
    CHECK(mean == doctest::Approx(0.25).epsilon(1e-10));

    CHECK_THROWS_AS(studies::coherent_state(4.0, 8), studies::TailMassTooLarge);
    const VectorXcd zero = studies::coherent_state(0.0, 8);
    CHECK(std::abs(zero(0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("studies: thermal weights follow the closed-form occupancy") {
    const double x = 2.0;
    const auto weights = studies::thermal_weights(x, 40);
    double total = 0, mean = 0;
    for (const auto& [w, n] : weights) {
        total += w;
        mean += w * n;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(mean == doctest::Approx(1.0 / std::expm1(x)).epsilon(1e-9));

    CHECK_THROWS_AS(studies::thermal_weights(0.1, 5), studies::TailMassTooLarge);
}

TEST_CASE("studies: ideal longitudinal gate reaches unit fidelity on vacuum") {
    studies::GateFidelityParams p;
    p.cx = 0.0;
    p.cutoff = 15;
    CHECK(studies::gate_fidelity(p) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("studies: the two dressed targets give identical fidelities") {
    const double omega = constants::two_pi * 5.0;
    evolution::GateSchedule sched;
    const double g = sched.kappa() * omega;
    const double cx = 0.2;
    auto p = two_qubit_params(g, g, cx, std::sqrt(1 - cx * cx), 12);
    const linalg::HermitianPropagator prop(rabi::hamiltonian(p));
    const VectorXcd vac = rabi::fock_state(0, p.mode_dim());
    const VectorXcd psi =
        prop.apply(rabi::assemble_state(p, rabi::plus_register(2), {vac, vac}),
                   sched.gate_time(omega));
    const double theta = evolution::correction_theta(p.qubits[0].omega_q,
                                                     sched.gate_time(omega));
    const double f_cz = corrected_overlap(psi, theta, evolution::cz_plus_target());
    const double f_dressed = corrected_overlap(psi, theta + constants::pi / 2.0,
                                               evolution::z_dressed_target());
    CHECK(f_cz == doctest::Approx(f_dressed).epsilon(1e-12));
    CHECK(f_cz < 1.0);
    CHECK(f_cz > 0.9);
}

TEST_CASE("studies: coherent cavities outperform vacuum under transverse admixture") {
    for (double cx : {0.05, 0.3}) {
        studies::GateFidelityParams p;
        p.cx = cx;
        p.cutoff = 12;
        p.cavity.kind = studies::CavityKind::vacuum;
        const double f_vac = studies::gate_fidelity(p);
        double prev = f_vac;
        p.cavity.kind = studies::CavityKind::coherent;
        for (double amp : {0.25, 0.5, 1.0}) {
            p.cavity.amplitude = amp;
            const double f = studies::gate_fidelity(p);
            CHECK(f >= prev - 1e-4);
            prev = f;
        }
        CHECK(prev > f_vac);
        CHECK(f_vac > 0.85);
        CHECK(prev <= 1.0 + 1e-12);
    }
}

TEST_CASE("studies: millikelvin thermal cavity sits next to vacuum") {
    studies::GateFidelityParams p;
    p.cx = 0.1;
    p.cutoff = 12;
    p.cavity.kind = studies::CavityKind::vacuum;
    const double f_vac = studies::gate_fidelity(p);
    p.cavity.kind = studies::CavityKind::thermal;
    p.cavity.temperature_K = 0.015;
    const double f_th = studies::gate_fidelity(p);
    CHECK(std::abs(f_th - f_vac) < 1e-5);
}

TEST_CASE("studies: adiabatic release concentrates the bare ground state") {
    studies::AdiabaticParams p;
    const auto res = studies::adiabatic_initialize(p);
    CHECK(res.fidelity > 0.9999);
    REQUIRE(!res.curve.empty());
    CHECK(res.curve.front().second > std::exp(-0.25) - 0.05);
    CHECK(res.curve.back().second == doctest::Approx(res.fidelity).epsilon(1e-12));
    CHECK(res.fidelity > res.curve.front().second);

    studies::AdiabaticParams fine = p;
    fine.steps = 1000;
    const auto res_fine = studies::adiabatic_initialize(fine);
    CHECK(std::abs(res_fine.fidelity - res.fidelity) < 1e-6);
}

TEST_CASE("studies: adiabatic rejects short schedules") {
    studies::AdiabaticParams p;
    p.steps = 499;
    CHECK_THROWS_AS(studies::adiabatic_initialize(p), studies::StepCountTooLow);
}

TEST_CASE("studies: transverse adiabatic release also concentrates") {
    studies::AdiabaticParams p;
    p.cx = 1.0;
    p.cutoff = 5;
    const auto res = studies::adiabatic_initialize(p);
    CHECK(res.fidelity > 0.999);
}
