#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <random>
#include <set>
#include <vector>

#include "uscqec/graphstate.hpp"
#include "uscqec/noise.hpp"

using namespace uscqec;
using graphstate::GraphSpec;
using linalg::MatrixXcd;
using linalg::VectorXcd;
using noise::CodeKind;
using noise::NoiseModel;
using pauli::PauliString;

namespace {

GraphSpec path_graph(int n) {
    GraphSpec g;
    g.vertices = n;
    for (int v = 0; v + 1 < n; ++v) g.edges.emplace_back(v, v + 1);
    return g;
}

MatrixXcd plus_density() {
    VectorXcd plus = graphstate::plus_register(1);
    return plus * plus.adjoint();
}

double density_fidelity(const VectorXcd& pure, const MatrixXcd& rho) {
    return (pure.adjoint() * rho * pure)(0).real();
}

} // namespace

TEST_CASE("noise model validation") {
    NoiseModel{0, 0, 0}.validate();
    NoiseModel{1, 1, 1}.validate();
    CHECK_THROWS_AS((NoiseModel{-0.1, 0, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NoiseModel{0, 1.1, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NoiseModel{0, 0, 2.0}.validate()), std::invalid_argument);
}

TEST_CASE("depolarizing samples: support and uniformity") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep)
        CHECK(noise::sample_depolarizing(3, {1}, 0.0, rng).is_identity_op());

    std::set<std::string> seen_single;
    for (int rep = 0; rep < 300; ++rep) {
        const PauliString p = noise::sample_depolarizing(2, {1}, 1.0, rng);
        CHECK_FALSE(p.is_identity_op());
        CHECK(((p.x_bits() | p.z_bits()) & ~std::uint64_t(2)) == 0);
        seen_single.insert(p.to_string());
    }
    CHECK(seen_single.size() == 3);

    std::set<std::string> seen_pair;
    for (int rep = 0; rep < 2000; ++rep) {
        const PauliString p = noise::sample_depolarizing(3, {0, 2}, 1.0, rng);
        CHECK_FALSE(p.is_identity_op());
        CHECK(((p.x_bits() | p.z_bits()) & ~std::uint64_t(5)) == 0);
        CHECK(p.is_hermitian());
        seen_pair.insert(p.to_string());
    }
    CHECK(seen_pair.size() == 15);

    CHECK_THROWS_AS(noise::sample_depolarizing(2, {}, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(noise::sample_depolarizing(2, {0, 0}, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(noise::sample_depolarizing(2, {2}, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(noise::sample_depolarizing(2, {0}, 1.5, rng), std::invalid_argument);
}

TEST_CASE("depolarizing channel on densities") {
    const MatrixXcd rho = plus_density();
    const VectorXcd plus = graphstate::plus_register(1);

    CHECK((noise::depolarize_density(rho, {0}, 0.0) - rho).cwiseAbs().maxCoeff() < 1e-15);
    // full strength maps |+> to fidelity 1/3: X fixes it, Y and Z flip it
    CHECK(density_fidelity(plus, noise::depolarize_density(rho, {0}, 1.0)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (const double p : {0.05, 0.3, 0.8})
        CHECK(density_fidelity(plus, noise::depolarize_density(rho, {0}, p)) ==
              doctest::Approx(1.0 - 2.0 * p / 3.0).epsilon(1e-12));

    // trace and positivity survive on a generic two-qubit state
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0, 1);
    VectorXcd psi(4);
    for (int i = 0; i < 4; ++i) psi(i) = linalg::cxd(gauss(rng), gauss(rng));
    psi /= psi.norm();
    MatrixXcd rho2 = psi * psi.adjoint();
    rho2 = noise::depolarize_density(rho2, {0, 1}, 0.4);
    rho2 = noise::depolarize_density(rho2, {1}, 0.2);
    CHECK(std::abs(rho2.trace().real() - 1.0) < 1e-12);
    CHECK(std::abs(rho2.trace().imag()) < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(rho2);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("logical state mixture") {
    const MatrixXcd pure = noise::logical_state_model(1.0, 3);
    CHECK(std::abs(pure.trace().real() - 1.0) < 1e-12);
    CHECK((pure * pure - pure).cwiseAbs().maxCoeff() < 1e-12);

    const MatrixXcd mixed = noise::logical_state_model(0.0, 3);
    CHECK((mixed - MatrixXcd::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-14);

    const MatrixXcd rho = noise::logical_state_model(0.75, 5);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(rho);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
    CHECK(eig.eigenvalues().maxCoeff() == doctest::Approx(0.7578125).epsilon(1e-12));
    CHECK(eig.eigenvalues()(0) == doctest::Approx(0.25 / 32.0).epsilon(1e-10));

    CHECK_THROWS_AS(noise::logical_state_model(1.2, 3), std::invalid_argument);
    CHECK_THROWS_AS(noise::logical_state_model(0.5, 0), std::invalid_argument);
}

TEST_CASE("exact channel composition") {
    const GraphSpec single{1, {}, {}};
    CHECK(noise::exact_channel_fidelity(single, NoiseModel{0, 0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // one prepared qubit and no gates reduces to the closed-form single
    // depolarizing channel
    for (const double p : {0.02, 0.1, 0.5})
        CHECK(noise::exact_channel_fidelity(single, NoiseModel{p, 0, 0}) ==
              doctest::Approx(1.0 - 2.0 * p / 3.0).epsilon(1e-12));

    const GraphSpec pair = path_graph(2);
    CHECK(noise::exact_channel_fidelity(pair, NoiseModel{0, 0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    const double f = noise::exact_channel_fidelity(pair, NoiseModel{0.01, 0.02, 0});
    CHECK(f < 1.0);
    CHECK(f > 0.9);

    GraphSpec measured = pair;
    measured.measure_set = {1};
    CHECK_THROWS_AS(noise::exact_channel_fidelity(measured, NoiseModel{0, 0, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(noise::exact_channel_fidelity(path_graph(7), NoiseModel{0, 0, 0}),
                    std::invalid_argument);
}

TEST_CASE("monte carlo: noiseless runs are exact") {
    for (const CodeKind code : {CodeKind::five_qubit, CodeKind::steane}) {
        const auto est = noise::montecarlo_fidelity(code, NoiseModel{0, 0, 0}, 64, 99);
        CHECK(est.mean == 1.0);
        CHECK(est.std_error == 0.0);
        CHECK(est.trials == 64);
        CHECK(est.seed == 99);
    }
}

TEST_CASE("monte carlo: deterministic and jobs-independent") {
    const NoiseModel nm{0.01, 0.02, 0.01};
    const auto a = noise::montecarlo_fidelity(CodeKind::steane, nm, 200, 1234, 1);
    const auto b = noise::montecarlo_fidelity(CodeKind::steane, nm, 200, 1234, 1);
    const auto c = noise::montecarlo_fidelity(CodeKind::steane, nm, 200, 1234, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean == c.mean);
    CHECK(a.std_error == c.std_error);
    const auto d = noise::montecarlo_fidelity(CodeKind::steane, nm, 200, 1235, 1);
    CHECK(a.mean != d.mean);
}

TEST_CASE("monte carlo matches the exact channel on a small graph") {
    const auto protocol = noise::graph_protocol(path_graph(2));
    std::mt19937_64 pick(42);
    std::uniform_real_distribution<double> unit(0.0, 0.3);
    for (int point = 0; point < 10; ++point) {
        const NoiseModel nm{unit(pick), unit(pick), 0};
        const double exact = noise::exact_channel_fidelity(path_graph(2), nm);
        const auto est = noise::montecarlo_fidelity(protocol, nm, 20000, 7000 + std::uint64_t(point));
        const double sigma = std::max(est.std_error, 1e-12);
        CHECK(std::abs(est.mean - exact) < 3.0 * sigma + 1e-9);
    }
}

TEST_CASE("tableau and dense backends follow the same trajectories") {
    const std::array<std::pair<noise::CodeProtocol, NoiseModel>, 2> setups = {
        std::make_pair(noise::protocol_for(CodeKind::five_qubit), NoiseModel{0.1, 0.05, 0}),
        std::make_pair(noise::protocol_for(CodeKind::steane), NoiseModel{0.05, 0.05, 0.1})};
    for (const auto& [protocol, nm] : setups) {
        for (std::uint64_t trial = 0; trial < 50; ++trial) {
            std::mt19937_64 rng_a(1000 + trial), rng_b(1000 + trial);
            noise::TrajectoryTableau fast;
            noise::TrajectoryDense slow;
            const double fa = noise::run_code_trial(fast, protocol, nm, rng_a);
            const double fb = noise::run_code_trial(slow, protocol, nm, rng_b);
            CHECK(fa == doctest::Approx(fb).epsilon(1e-12));
        }
    }
}

TEST_CASE("noise strength degrades the estimate") {
    const auto weak = noise::montecarlo_fidelity(CodeKind::five_qubit, NoiseModel{0.002, 0.002, 0},
                                                 3000, 21);
    const auto strong = noise::montecarlo_fidelity(CodeKind::five_qubit, NoiseModel{0.03, 0.03, 0},
                                                   3000, 21);
    CHECK(weak.mean - strong.mean >
          -3.0 * std::sqrt(weak.std_error * weak.std_error + strong.std_error * strong.std_error));
    CHECK(weak.mean > strong.mean);

    // measurement flips alone break the correction step
    const auto flips = noise::montecarlo_fidelity(CodeKind::steane, NoiseModel{0, 0, 0.5}, 400, 8);
    CHECK(flips.mean < 0.9);
    const auto clean = noise::montecarlo_fidelity(CodeKind::steane, NoiseModel{0, 0, 0}, 400, 8);
    CHECK(clean.mean == 1.0);
}

TEST_CASE("estimates stay inside the unit interval") {
    for (const auto seed : {1ull, 2ull, 3ull}) {
        const auto est =
            noise::montecarlo_fidelity(CodeKind::five_qubit, NoiseModel{0.2, 0.2, 0}, 50, seed);
        CHECK(est.mean >= 0.0);
        CHECK(est.mean <= 1.0);
        CHECK(est.std_error >= 0.0);
    }
    CHECK_THROWS_AS(noise::montecarlo_fidelity(CodeKind::steane, NoiseModel{0, 0, 0}, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(noise::montecarlo_fidelity(CodeKind::steane, NoiseModel{0, 0, 0}, 5, 1, 0),
                    std::invalid_argument);
}
