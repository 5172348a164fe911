#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include <uscqec/constants.hpp>
#include <uscqec/fluxqubit.hpp>

using namespace uscqec;
using fluxqubit::QubitParams;
using linalg::cxd;
using linalg::MatrixXcd;

namespace {

// Independent Hamiltonian assembled entry by entry from the analytic charge-basis
// matrix elements, with no shared operator code.
MatrixXcd reference_hamiltonian(const QubitParams& p) {
    const int n = p.n_max;
    const int d = 2 * n + 1;
    const double EC = p.E_J_GHz / p.E_C_ratio;
    const double s = p.alpha + 2.0 * p.beta;
    const double det = (1.0 + s) * (1.0 + s) - s * s;
    const double th_a = 2.0 * constants::pi * p.f1;
    const double th_b = 2.0 * constants::pi * (p.f1 - p.f2 + 0.5 * p.f3);
    const double b_coeff = 2.0 * p.beta * std::cos(constants::pi * p.f3);

    auto idx = [d, n](int n1, int n2) { return (n1 + n) * d + (n2 + n); };
    MatrixXcd h = MatrixXcd::Zero(d * d, d * d);
    for (int n1 = -n; n1 <= n; ++n1) {
        for (int n2 = -n; n2 <= n; ++n2) {
            const int col = idx(n1, n2);
            h(col, col) = 4.0 * EC *
                          ((1.0 + s) * (n1 * n1 + n2 * n2) + 2.0 * s * n1 * n2) / det;
            if (n1 + 1 <= n) h(idx(n1 + 1, n2), col) += -0.5 * p.E_J_GHz;
            if (n1 - 1 >= -n) h(idx(n1 - 1, n2), col) += -0.5 * p.E_J_GHz;
            if (n2 + 1 <= n) h(idx(n1, n2 + 1), col) += -0.5 * p.E_J_GHz;
            if (n2 - 1 >= -n) h(idx(n1, n2 - 1), col) += -0.5 * p.E_J_GHz;
            if (n1 - 1 >= -n && n2 + 1 <= n) {
                h(idx(n1 - 1, n2 + 1), col) +=
                    -0.5 * p.E_J_GHz * (p.alpha * std::exp(cxd(0, th_a)) +
                                        b_coeff * std::exp(cxd(0, th_b)));
            }
            if (n1 + 1 <= n && n2 - 1 >= -n) {
                h(idx(n1 + 1, n2 - 1), col) +=
                    -0.5 * p.E_J_GHz * (p.alpha * std::exp(cxd(0, -th_a)) +
                                        b_coeff * std::exp(cxd(0, -th_b)));
            }
        }
    }
    return h;
}

QubitParams small_params() {
    QubitParams p;
    p.n_max = 5;
    return p;
}

} // namespace

TEST_CASE("fluxqubit: potential at the well bottom for direct substitution points") {
    QubitParams p;
    p.alpha = 0.7;
    p.beta = 0.2;
    p.f1 = 0.0;
    CHECK(fluxqubit::potential_energy(p, 0.0, 0.0) == doctest::Approx(-3.1).epsilon(1e-14));

    p.alpha = 0.8;
    p.f1 = 0.5;
    CHECK(fluxqubit::potential_energy(p, 0.0, 0.0) == doctest::Approx(-0.8).epsilon(1e-14));
}

TEST_CASE("fluxqubit: half-quantum f3 removes the beta junction pair from the potential") {
    QubitParams with_beta;
    with_beta.f3 = 0.5;
    QubitParams no_beta = with_beta;
    no_beta.beta = 0.0;
    for (double phi1 : {0.0, 0.4, -1.3})
        for (double phi2 : {0.0, 0.9, 2.2})
            CHECK(fluxqubit::potential_energy(with_beta, phi1, phi2) ==
                  doctest::Approx(fluxqubit::potential_energy(no_beta, phi1, phi2))
                      .epsilon(1e-14));
}

TEST_CASE("fluxqubit: parameter validation") {
    QubitParams p;
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = QubitParams{};
    p.n_max = 2;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = QubitParams{};
    p.f1 = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = QubitParams{};
    p.beta = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("fluxqubit: hamiltonian matches the entrywise reference construction") {
    QubitParams p = small_params();
    p.f1 = 0.47;
    p.f2 = 0.03;
    p.f3 = 0.1;
    const MatrixXcd h = fluxqubit::build_hamiltonian(p);
    const MatrixXcd ref = reference_hamiltonian(p);
    CHECK(linalg::max_abs(h - ref) < 1e-12 * p.E_J_GHz);
    CHECK(linalg::max_abs(h - h.adjoint()) < 1e-12 * p.E_J_GHz);
}

TEST_CASE("fluxqubit: ground energy agrees with a general-purpose eigensolver") {
    QubitParams p = small_params();
    p.f1 = 0.48;
    const MatrixXcd h = fluxqubit::build_hamiltonian(p);
    Eigen::ComplexEigenSolver<MatrixXcd> general(h);
    REQUIRE(general.info() == Eigen::Success);
    double e_min = 1e300;
    for (Eigen::Index i = 0; i < general.eigenvalues().size(); ++i)
        e_min = std::min(e_min, general.eigenvalues()(i).real());

    const auto model = fluxqubit::solve_qubit(p);
    CHECK(model.E0_GHz == doctest::Approx(e_min).epsilon(1e-9));
}

TEST_CASE("fluxqubit: spectrum converges in the charge cutoff at the default bias") {
    QubitParams p;
    CHECK(fluxqubit::cutoff_gap_drift(p) < 1e-6);
    CHECK_NOTHROW(fluxqubit::solve_qubit(p, true));

    const auto coarse = fluxqubit::solve_qubit(p);
    QubitParams fine = p;
    fine.n_max = 14;
    const auto dense = fluxqubit::solve_qubit(fine);
    CHECK(coarse.transition_GHz() ==
          doctest::Approx(dense.transition_GHz()).epsilon(1e-8));
}

TEST_CASE("fluxqubit: gap sits in the sub-to-few gigahertz band across the alpha window") {
    for (double alpha : {0.6, 0.8, 1.0}) {
        QubitParams p;
        p.alpha = alpha;
        const auto m = fluxqubit::solve_qubit(p);
        CHECK(m.transition_GHz() > 0.3);
        CHECK(m.transition_GHz() < 3.0);
        CHECK(m.two_level_separation() > 3.0);
        CHECK(m.gap_delta_GHz == doctest::Approx(m.transition_GHz()).epsilon(1e-12));
        CHECK(m.tilt_epsilon_GHz == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("fluxqubit: coupling moments solve the pauli expansion exactly") {
    QubitParams p;
    p.f1 = 0.52;
    const auto m = fluxqubit::solve_qubit(p);
    const auto c = fluxqubit::coupling_coefficients(m);

    CHECK(c.residual < 1e-12);

    // independent linear solve for the expansion coefficients
    const MatrixXcd o = fluxqubit::coupling_operator(p);
    MatrixXcd o2(2, 2);
    o2(0, 0) = (m.ground.adjoint() * o * m.ground)(0, 0);
    o2(0, 1) = (m.ground.adjoint() * o * m.excited)(0, 0);
    o2(1, 0) = (m.excited.adjoint() * o * m.ground)(0, 0);
    o2(1, 1) = (m.excited.adjoint() * o * m.excited)(0, 0);
    Eigen::MatrixXd a(8, 4);
    Eigen::VectorXd b(8);
    const MatrixXcd basis[4] = {linalg::id2(), linalg::sigma_x(), linalg::sigma_y(),
                                linalg::sigma_z()};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const int row = 2 * (2 * i + j);
            for (int k = 0; k < 4; ++k) {
                a(row, k) = basis[k](i, j).real();
                a(row + 1, k) = basis[k](i, j).imag();
            }
            b(row) = o2(i, j).real();
            b(row + 1) = o2(i, j).imag();
        }
    Eigen::VectorXd coeff = a.colPivHouseholderQr().solve(b);
    CHECK(c.raw_c0 == doctest::Approx(coeff(0)).epsilon(1e-10));
    CHECK(c.raw_cx == doctest::Approx(coeff(1)).epsilon(1e-10));
    CHECK(c.raw_cy == doctest::Approx(coeff(2)).epsilon(1e-10));
    CHECK(c.raw_cz == doctest::Approx(coeff(3)).epsilon(1e-10));
    CHECK((a * coeff - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fluxqubit: normalized direction cosines live on the x-z great circle") {
    for (double f1 : {0.5, 0.505, 0.52}) {
        QubitParams p;
        p.f1 = f1;
        const auto c = fluxqubit::coupling_coefficients(fluxqubit::solve_qubit(p));
        CHECK(std::abs(c.cy) < 1e-10);
        CHECK(std::abs(c.c0) < 1e-2);
        CHECK(c.cx * c.cx + c.cy * c.cy + c.cz * c.cz ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("fluxqubit: transversal at the symmetry point, longitudinal when tilted") {
    QubitParams p;
    const auto at_half = fluxqubit::coupling_coefficients(fluxqubit::solve_qubit(p));
    CHECK(std::abs(at_half.cx) > 0.99);
    CHECK(std::abs(at_half.cz) < 0.1);

    p.f1 = 0.52;
    const auto tilted = fluxqubit::coupling_coefficients(fluxqubit::solve_qubit(p));
    CHECK(std::abs(tilted.cz) > 0.99);
}

TEST_CASE("fluxqubit: bias reflection about one half flips the longitudinal component") {
    QubitParams plus;
    plus.f1 = 0.515;
    QubitParams minus;
    minus.f1 = 1.0 - plus.f1;
    const auto mp = fluxqubit::solve_qubit(plus);
    const auto mm = fluxqubit::solve_qubit(minus);
    CHECK(mp.transition_GHz() == doctest::Approx(mm.transition_GHz()).epsilon(1e-10));
    const auto cp = fluxqubit::coupling_coefficients(mp);
    const auto cm = fluxqubit::coupling_coefficients(mm);
    CHECK(cp.cz == doctest::Approx(-cm.cz).epsilon(1e-8));
    CHECK(std::abs(cp.cx) == doctest::Approx(std::abs(cm.cx)).epsilon(1e-8));
}

TEST_CASE("fluxqubit: tilt grows linearly in the bias offset") {
    QubitParams p;
    p.f1 = 0.505;
    const auto near = fluxqubit::solve_qubit(p);
    p.f1 = 0.51;
    const auto far = fluxqubit::solve_qubit(p);
    CHECK(near.tilt_epsilon_GHz > 0);
    CHECK(far.tilt_epsilon_GHz ==
          doctest::Approx(2.0 * near.tilt_epsilon_GHz).epsilon(0.05));
    const double gap = far.transition_GHz();
    CHECK(gap * gap == doctest::Approx(far.gap_delta_GHz * far.gap_delta_GHz +
                                       far.tilt_epsilon_GHz * far.tilt_epsilon_GHz)
                           .epsilon(1e-10));
}

TEST_CASE("fluxqubit: sweep output is sign-continuous and row-major") {
    QubitParams base;
    fluxqubit::GridSpec alphas{0.7, 0.9, 3};
    fluxqubit::GridSpec f1s{0.48, 0.52, 5};
    const auto grid = fluxqubit::sweep_bias(base, alphas, f1s);
    REQUIRE(grid.size() == 15);
    CHECK(grid[0].alpha == doctest::Approx(0.7));
    CHECK(grid[0].f1 == doctest::Approx(0.48));
    CHECK(grid[4].f1 == doctest::Approx(0.52));
    CHECK(grid[5].alpha == doctest::Approx(0.8));

    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (grid[k].alpha != grid[k - 1].alpha) continue;
        const double dot = grid[k].coupling.cx * grid[k - 1].coupling.cx +
                           grid[k].coupling.cy * grid[k - 1].coupling.cy;
        const double mag = std::hypot(grid[k].coupling.cx, grid[k].coupling.cy) *
                           std::hypot(grid[k - 1].coupling.cx, grid[k - 1].coupling.cy);
        if (mag > 1e-6) CHECK(dot > -1e-9);
    }

    for (const auto& pt : grid) {
        const double sym_gap = pt.gap_delta_GHz;
        CHECK(pt.transition_GHz >= sym_gap - 1e-9);
        CHECK(pt.coupling.residual < 1e-12);
    }
}
