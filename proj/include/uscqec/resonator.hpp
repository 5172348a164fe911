#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "constants.hpp"

// Transmission-line resonator periodically loaded with N identical junction
// pairs. SI units throughout (meters, seconds, henry, farad, rad/s).
//
// The flux field on each free segment is r(x) = A cos(k (x - x_s)) +
// B sin(k (x - x_s)) with k = omega / v. A junction at x_j carries the line
// current -(1/l) r' through an inductance L_J shunted by the pair
// capacitance C_eff = (gamma + 2 beta) C_J, so the admittance factor
//   chi(omega) = 1/L_J - C_eff omega^2
// fixes the flux drop across it: r(x_j+) = r(x_j-) + r'(x_j)/(l chi),
// r'(x_j+) = r'(x_j-). Open boundaries demand r'(0) = r'(L) = 0.
//
// The characteristic function below is rescaled by chi at every junction,
// which removes the 1/chi poles and keeps it finite at the junction plasma
// frequency. When chi vanishes exactly at the commensurate frequency
// omega_bar = (N+1) pi v / L, every segment is one half wavelength, the
// junctions carry no current, and the spectrum acquires an (N+1)-fold
// degenerate manifold that a sign-change scan cannot see; that case is
// handled analytically by degenerate_manifold().

namespace uscqec::resonator {

struct NotDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RootBracketingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResonatorParams {
    double length_m = 0.072;
    double velocity_mps = 1.2e8;
    double impedance_ohm = 50.0;
    double junction_C_F = 10e-15;
    double junction_L_H = 1.0132118364233778e-7;
    double gamma = 0.6;
    double beta = 0.2;
    int junction_count = 5;

    void validate() const {
        if (length_m <= 0) throw std::invalid_argument("resonator: length must be positive");
        if (velocity_mps <= 0) throw std::invalid_argument("resonator: velocity must be positive");
        if (impedance_ohm <= 0) throw std::invalid_argument("resonator: impedance must be positive");
        if (junction_C_F <= 0) throw std::invalid_argument("resonator: junction capacitance must be positive");
        if (junction_L_H <= 0) throw std::invalid_argument("resonator: junction inductance must be positive");
        if (gamma < 0 || beta < 0 || gamma + 2 * beta <= 0)
            throw std::invalid_argument("resonator: need nonnegative gamma, beta with gamma + 2 beta > 0");
        if (junction_count < 0) throw std::invalid_argument("resonator: junction count must be nonnegative");
    }

    double ell() const { return impedance_ohm / velocity_mps; }          // H per m
    double cap() const { return 1.0 / (impedance_ohm * velocity_mps); } // F per m
    double effective_C() const { return (gamma + 2.0 * beta) * junction_C_F; }
    double segment_m() const { return length_m / (junction_count + 1); }
    double junction_x(int j) const { return segment_m() * (j + 1); }
    double plasma_omega() const { return 1.0 / std::sqrt(effective_C() * junction_L_H); }
    double commensurate_omega() const {
        return (junction_count + 1) * constants::pi * velocity_mps / length_m;
    }
    double chi(double omega) const {
        return 1.0 / junction_L_H - effective_C() * omega * omega;
    }
    // dimensionless detuning of the plasma frequency from omega_bar
    double degeneracy_mismatch() const {
        return chi(commensurate_omega()) * junction_L_H;
    }
};

// junction inductance that pins the plasma frequency onto omega_bar
inline double matched_junction_L(const ResonatorParams& p) {
    const double wb = p.commensurate_omega();
    return 1.0 / (p.effective_C() * wb * wb);
}

// chi-rescaled characteristic function; entire in omega, roots at the
// resonator eigenfrequencies (plus a removable-by-filter zero at the plasma
// frequency whenever the junctions are incommensurate there)
inline double mode_equation(const ResonatorParams& p, double omega) {
    const double k = omega / p.velocity_mps;
    const double a = p.segment_m();
    const double ka = k * a;
    const double ca = std::cos(ka), sa = std::sin(ka);
    double A = 1.0, B = 0.0;
    for (int j = 0; j < p.junction_count; ++j) {
        const double value = A * ca + B * sa;
        const double slope_over_k = -A * sa + B * ca;
        const double x = p.chi(omega);
        A = x * value + k * slope_over_k / p.ell();
        B = x * slope_over_k;
    }
    return -A * sa + B * ca;
}

namespace detail {

inline double bisect(const ResonatorParams& p, double lo, double hi) {
    double flo = mode_equation(p, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo < 1e-14 * mid) return mid;
        const double fm = mode_equation(p, mid);
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline void scan_brackets(const ResonatorParams& p, double lo, double hi, int points,
                          std::vector<double>& roots) {
    if (hi <= lo || points < 2) return;
    double prev_w = lo;
    double prev_f = mode_equation(p, lo);
    for (int i = 1; i <= points; ++i) {
        const double w = lo + (hi - lo) * double(i) / points;
        const double f = mode_equation(p, w);
        if ((prev_f < 0) != (f < 0)) roots.push_back(bisect(p, prev_w, w));
        prev_w = w;
        prev_f = f;
    }
}

} // namespace detail

// lowest `count` eigenfrequencies with simple characteristic roots, ascending.
// A degenerate or nearly degenerate manifold (plasma frequency within ~1e-8
// of omega_bar) hides from sign-change scanning; use degenerate_manifold().
inline std::vector<double> mode_frequencies(const ResonatorParams& p, int count) {
    p.validate();
    if (count < 1) throw std::invalid_argument("resonator: mode count must be positive");
    const double fsr = constants::pi * p.velocity_mps / p.length_m;
    const double w_cap = (count + p.junction_count + 4) * fsr;
    const double wp = p.plasma_omega();

    std::vector<double> roots;
    detail::scan_brackets(p, 0.02 * fsr, w_cap, 800 * (count + p.junction_count + 4), roots);
    if (wp < w_cap) {
        const double wlo = std::max(0.02 * fsr, 0.97 * wp);
        detail::scan_brackets(p, wlo, std::min(1.03 * wp, w_cap), 200000, roots);
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> cleaned;
    for (double w : roots) {
        // spurious zero inherited from the chi rescaling: the plasma
        // frequency is only an eigenfrequency if the segments are
        // commensurate there
        if (std::abs(p.chi(w)) * p.junction_L_H < 1e-9 &&
            std::abs(std::sin(w * p.segment_m() / p.velocity_mps)) > 1e-6)
            continue;
        if (!cleaned.empty() && w - cleaned.back() < 1e-9 * w) continue;
        cleaned.push_back(w);
    }
    if (int(cleaned.size()) < count)
        throw RootBracketingFailure(
            "resonator: found only " + std::to_string(cleaned.size()) + " of " +
            std::to_string(count) + " requested modes below the scan ceiling");
    cleaned.resize(std::size_t(count));
    return cleaned;
}

struct Mode {
    double omega = 0;                 // rad/s
    std::vector<double> amp_cos, amp_sin;  // per-segment field coefficients
    std::vector<double> drops;             // junction flux drops, left to right
    double mass_F = 0;                       // capacitive mode mass
};

// field value of a transfer-constructed or manifold mode
inline double eval_mode(const ResonatorParams& p, const Mode& m, double x) {
    const double a = p.segment_m();
    int s = std::min(int(x / a), p.junction_count);
    if (s < 0) s = 0;
    const double k = m.omega / p.velocity_mps;
    const double u = x - s * a;
    return m.amp_cos[std::size_t(s)] * std::cos(k * u) +
           m.amp_sin[std::size_t(s)] * std::sin(k * u);
}

namespace detail {

inline double simpson_segment_sq(const ResonatorParams& p, const Mode& m, int seg,
                                 int intervals) {
    const double a = p.segment_m();
    const double k = m.omega / p.velocity_mps;
    const double ac = m.amp_cos[std::size_t(seg)];
    const double as = m.amp_sin[std::size_t(seg)];
    const double h = a / intervals;
    double acc = 0;
    for (int i = 0; i <= intervals; ++i) {
        const double u = i * h;
        const double r = ac * std::cos(k * u) + as * std::sin(k * u);
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * r * r;
    }
    return acc * h / 3.0;
}

} // namespace detail

// capacitive mass: line term plus the junction-drop term
inline double mode_mass(const ResonatorParams& p, const Mode& m, int intervals = 512) {
    double line = 0;
    for (int s = 0; s <= p.junction_count; ++s)
        line += detail::simpson_segment_sq(p, m, s, intervals);
    double drops = 0;
    for (double d : m.drops) drops += d * d;
    return p.cap() * line + p.effective_C() * drops;
}

// transfer construction of the eigenmode at a simple root, normalized to
// unit amplitude at the open left end
inline Mode solve_mode(const ResonatorParams& p, double omega) {
    const double xval = p.chi(omega);
    if (std::abs(xval) * p.junction_L_H < 1e-11)
        throw NotDegenerate(
            "resonator: mode sits on the junction plasma frequency; the transfer "
            "construction is singular there, use degenerate_manifold instead");
    Mode m;
    m.omega = omega;
    const double k = omega / p.velocity_mps;
    const double a = p.segment_m();
    const double ca = std::cos(k * a), sa = std::sin(k * a);
    double A = 1.0, B = 0.0;
    m.amp_cos.push_back(A);
    m.amp_sin.push_back(B);
    for (int j = 0; j < p.junction_count; ++j) {
        const double value = A * ca + B * sa;
        const double slope = k * (-A * sa + B * ca);
        const double drop = slope / (p.ell() * xval);
        m.drops.push_back(drop);
        A = value + drop;
        B = slope / k;
        m.amp_cos.push_back(A);
        m.amp_sin.push_back(B);
    }
    m.mass_F = mode_mass(p, m);
    return m;
}

inline std::vector<Mode> solve_modes(const ResonatorParams& p, int count) {
    std::vector<Mode> out;
    for (double w : mode_frequencies(p, count)) out.push_back(solve_mode(p, w));
    return out;
}

struct Manifold {
    double omega = 0;       // common frequency of the degenerate modes
    double mismatch = 0;    // dimensionless plasma detuning, ~0 when matched
    std::vector<Mode> basis;  // N+1 orthogonal modes under the mass metric
};

// Exactly matched junctions: every segment is a half wave at omega_bar and
// each junction tolerates an arbitrary flux drop at zero current. The basis
// diagonalizes the drop quadratic form over per-segment amplitudes, so the
// modes are mass-orthogonal; the first one is drop-free (the smooth cosine
// that survives detuning).
inline Manifold degenerate_manifold(const ResonatorParams& p, double tol = 1e-9) {
    p.validate();
    if (p.junction_count < 1)
        throw NotDegenerate("resonator: no junctions, spectrum has no degenerate manifold");
    Manifold out;
    out.omega = p.commensurate_omega();
    out.mismatch = p.degeneracy_mismatch();
    if (std::abs(out.mismatch) > tol)
        throw NotDegenerate("resonator: plasma frequency misses the commensurate point "
                            "by relative " + std::to_string(out.mismatch));

    const int n = p.junction_count;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n + 1);
    for (int j = 0; j < n; ++j) {
        d(j, j) = 1.0;
        d(j, j + 1) = 1.0;
    }
    Eigen::MatrixXd g = d.transpose() * d;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("resonator: manifold eigenbasis failed");

    const double seg_line_mass = p.cap() * p.segment_m() / 2.0;
    for (int kidx = 0; kidx <= n; ++kidx) {
        Eigen::VectorXd u = eig.eigenvectors().col(kidx);
        Mode m;
        m.omega = out.omega;
        for (int s = 0; s <= n; ++s) {
            m.amp_cos.push_back(u(s));
            m.amp_sin.push_back(0.0);
        }
        Eigen::VectorXd drops = d * u;
        for (int j = 0; j < n; ++j) m.drops.push_back(drops(j));
        m.mass_F = seg_line_mass * u.squaredNorm() + p.effective_C() * drops.squaredNorm();
        out.basis.push_back(m);
    }
    return out;
}

} // namespace uscqec::resonator
