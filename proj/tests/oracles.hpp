#pragma once

// Slow, direct reference computations shared by the unit tests and the
// acceptance binary. None of these reuse the library's fast paths.

#include "hslab/fre.hpp"
#include "hslab/ibps.hpp"
#include "hslab/picard.hpp"
#include "hslab/spectral.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using hslab::cplx;
inline constexpr cplx I{0.0, 1.0};

inline double cube(double x) { return x * x * x; }

// ---------------------------------------------------------------- spectral

inline hslab::SimState gaussian_state(double L, int n, const hslab::Coefficients& c, double amp = 1.0,
                                      double width = 1.0, double shift = 0.5) {
    hslab::Grid g(L, n);
    const double x0 = L / 2;
    return hslab::make_state(
        g, [&](double x) { return amp * std::exp(-(x - x0) * (x - x0) / (width * width)); },
        [&](double x) { return 0.5 * amp * std::exp(-(x - x0 - shift) * (x - x0 - shift) / (width * width)); }, c);
}

// Random real fields supported in |j| <= K.
inline hslab::SimState random_band_state(const hslab::Grid& g, int K, const hslab::Coefficients& c, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    hslab::SimState s;
    s.grid = g;
    s.params = c;
    for (auto* f : {&s.uhat, &s.vhat}) {
        f->coeffs.assign(g.n(), 0.0);
        f->coeffs[0] = d(rng);
        for (int j = 1; j <= K; ++j) {
            const cplx z{d(rng), d(rng)};
            f->coeffs[g.slot(j)] = z;
            f->coeffs[g.slot(-j)] = std::conj(z);
        }
        f->hermitian = true;
    }
    return s;
}

// O(n^2) convolution sums for (i xi F[beta u^2 + gamma v^2], F[theta u v_x]), kept on |j| <= K.
inline hslab::Rhs convolution_rhs(const hslab::SimState& s, int K) {
    const auto& g = s.grid;
    const int n = g.n();
    hslab::Rhs r{std::vector<cplx>(n, 0.0), std::vector<cplx>(n, 0.0)};
    auto c = [&](const hslab::SpectralField& f, int j) { return f.coeffs[g.slot(j)]; };
    const double dk = 2 * std::numbers::pi / g.L();
    for (int j = -K; j <= K; ++j) {
        cplx uu = 0, vv = 0, uvx = 0;
        for (int j1 = -n / 2; j1 < n / 2; ++j1) {
            const int j2 = j - j1;
            if (j2 < -n / 2 || j2 >= n / 2) continue;
            uu += c(s.uhat, j1) * c(s.uhat, j2);
            vv += c(s.vhat, j1) * c(s.vhat, j2);
            uvx += c(s.uhat, j1) * (I * (dk * j2)) * c(s.vhat, j2);
        }
        r.u[g.slot(j)] = I * (dk * j) * (s.params.beta * uu + s.params.gamma * vv);
        r.v[g.slot(j)] = s.params.theta * uvx;
    }
    return r;
}

// ---------------------------------------------------------------- picard

inline cplx kernel_direct(double phi, double t) {
    if (phi == 0.0) return t;
    // e^{iz} - 1 = 2i sin(z/2) e^{iz/2}, no cancellation for small z
    const double h = 0.5 * t * phi;
    return t * std::exp(I * h) * (std::sin(h) / h);
}

// Adaptive Gauss-Kronrod over [lo, hi] after splitting at the given breakpoints.
inline cplx adaptive(const std::function<cplx(double)>& f, std::vector<double> cuts, double lo, double hi,
                     double tol = 1e-13) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (!(hi > lo)) return 0.0;
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cplx acc = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double a = std::max(lo, cuts[i - 1]), b = std::min(hi, cuts[i]);
        if (!(b > a)) continue;
        const double re = GK::integrate([&](double x) { return f(x).real(); }, a, b, 20, tol);
        const double im = GK::integrate([&](double x) { return f(x).imag(); }, a, b, 20, tol);
        acc += cplx(re, im);
    }
    return acc;
}

inline std::vector<double> box_edges(const hslab::BoxData& d, double xi, bool reflect) {
    std::vector<double> e;
    for (const auto& b : d.expanded()) {
        e.push_back(reflect ? xi - b.lo : b.lo);
        e.push_back(reflect ? xi - b.hi : b.hi);
    }
    return e;
}

inline cplx second_v(const hslab::BoxData& u0, const hslab::BoxData& v0, double a, double t, double xi) {
    auto cuts = box_edges(u0, xi, false);
    auto more = box_edges(v0, xi, true);
    cuts.insert(cuts.end(), more.begin(), more.end());
    const double lo = *std::min_element(cuts.begin(), cuts.end());
    const double hi = *std::max_element(cuts.begin(), cuts.end());
    const cplx integral = adaptive(
        [&](double x1) {
            const double x2 = xi - x1;
            const double phase = -cube(xi) + a * cube(x1) + cube(x2);
            return x2 * kernel_direct(phase, t) * u0.eval(x1) * v0.eval(x2);
        },
        cuts, lo, hi);
    return I * std::exp(I * (t * cube(xi))) * integral;
}

inline cplx second_u(const hslab::BoxData& v0, double a, double t, double xi) {
    auto cuts = box_edges(v0, xi, false);
    auto more = box_edges(v0, xi, true);
    cuts.insert(cuts.end(), more.begin(), more.end());
    const double lo = *std::min_element(cuts.begin(), cuts.end());
    const double hi = *std::max_element(cuts.begin(), cuts.end());
    const cplx integral = adaptive(
        [&](double x1) {
            const double x2 = xi - x1;
            const double phase = -a * cube(xi) + cube(x1) + cube(x2);
            return xi * kernel_direct(phase, t) * v0.eval(x1) * v0.eval(x2);
        },
        cuts, lo, hi);
    return I * std::exp(I * (t * a * cube(xi))) * integral;
}

// v3(t) = e^{it xi^3} int int (i xi2 v0(xi2)) (i xi1 v0 v0) int_0^t e^{it' Phiv} (e^{it' Phi1u} - 1)/(i Phi1u) dt'
// with the time integral done by quadrature too when time_quadrature is set.
inline cplx third_v(const hslab::BoxData& v0, double a, double t, double xi, bool time_quadrature = false) {
    auto time_kernel = [&](double p1, double pv) -> cplx {
        if (!time_quadrature) {
            // int_0^t e^{i s pv}(e^{i s p1} - 1) ds / (i p1)
            return (kernel_direct(p1 + pv, t) - kernel_direct(pv, t)) / (I * p1);
        }
        return adaptive([&](double s) { return std::exp(I * (s * pv)) * kernel_direct(p1, s); }, {}, 0.0, t, 1e-12);
    };
    std::vector<double> outer_cuts;
    for (const auto& A : v0.expanded()) {
        outer_cuts.push_back(A.lo);
        outer_cuts.push_back(A.hi);
    }
    const double lo = *std::min_element(outer_cuts.begin(), outer_cuts.end());
    const double hi = *std::max_element(outer_cuts.begin(), outer_cuts.end());
    const cplx integral = adaptive(
        [&](double x11) {
            const cplx va = v0.eval(x11);
            if (va == 0.0) return cplx(0.0);
            std::vector<double> cuts;
            for (const auto& B : v0.expanded()) {
                cuts.push_back(B.lo);
                cuts.push_back(B.hi);
                cuts.push_back(xi - x11 - B.lo);
                cuts.push_back(xi - x11 - B.hi);
            }
            const double l2 = *std::min_element(cuts.begin(), cuts.end());
            const double h2 = *std::max_element(cuts.begin(), cuts.end());
            return adaptive(
                [&](double x12) {
                    const double x2 = xi - x11 - x12, x1 = x11 + x12;
                    const cplx w = v0.eval(x12) * v0.eval(x2);
                    if (w == 0.0) return cplx(0.0);
                    const double p1 = -a * cube(x1) + cube(x11) + cube(x12);
                    const double pv = -cube(xi) + a * cube(x1) + cube(x2);
                    return (I * x2) * (I * x1) * va * w * time_kernel(p1, pv);
                },
                cuts, l2, h2, 1e-11);
        },
        outer_cuts, lo, hi, 1e-10);
    return std::exp(I * (t * cube(xi))) * integral;
}

// Exact L^2 norm squared of (1_[a0,a1] * 1_[b0,b1]) over [w0, w1], from the trapezoid-shaped convolution.
inline double box_convolution_l2sq(double a0, double a1, double b0, double b1, double w0, double w1) {
    auto f = [&](double x) { return std::max(0.0, std::min(a1, x - b0) - std::max(a0, x - b1)); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    std::vector<double> cuts{w0, w1, a0 + b0, a0 + b1, a1 + b0, a1 + b1};
    std::sort(cuts.begin(), cuts.end());
    double acc = 0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double lo = std::max(w0, cuts[i - 1]), hi = std::min(w1, cuts[i]);
        if (hi > lo) acc += GK::integrate([&](double x) { return f(x) * f(x); }, lo, hi, 10, 1e-14);
    }
    return acc;
}

// ---------------------------------------------------------------- ibps

// Every term evaluated from its defining frequency sum, with the phase factors
// e^{it Phi} and e^{it Psi} formed directly from the phase formulas.
struct IbpsTerms {
    std::vector<cplx> N0u, N1u, N2u, N3u, N0v, N1v, N2v, N3v, Bu, Bv, coupling_u, coupling_v;
};

inline IbpsTerms ibps_terms(const hslab::ProfileState& p, const hslab::CutoffParams& cut) {
    const int K = p.K;
    const int m = 2 * K + 1;
    const double t = p.t, a = p.params.a;
    const cplx be = p.params.beta, ga = p.params.gamma, th = p.params.theta;
    auto X = [&](int j) { return p.xi(j); };
    auto u = [&](int j) { return p.u[j + K]; };
    auto v = [&](int j) { return p.v[j + K]; };
    auto e = [&](double phase) { return std::exp(I * (t * phase)); };
    auto inband = [&](int j) { return j >= -K && j <= K; };
    const double dk = 2 * std::numbers::pi / p.grid.L();
    const hslab::CutoffParams unit{cut.delta_u * dk, cut.delta_v * dk, cut.eta_sim};
    auto U = [&](int j, int j1) { return hslab::in_U(a, j, j1, j - j1, unit); };
    auto V = [&](int j, int j1) { return hslab::in_V(j, j1, j - j1, unit); };
    auto Phi1u = [&](double x1, double x2) { return -a * cube(x1 + x2) + cube(x1) + cube(x2); };
    auto Phiv = [&](double x1, double x2) { return -cube(x1 + x2) + a * cube(x1) + cube(x2); };

    IbpsTerms o;
    for (auto* f : {&o.N0u, &o.N1u, &o.N2u, &o.N3u, &o.N0v, &o.N1v, &o.N2v, &o.N3v, &o.Bu, &o.Bv, &o.coupling_u,
                    &o.coupling_v})
        f->assign(m, 0.0);
    for (int j = -K; j <= K; ++j) {
        const double x = X(j);
        for (int j1 = -K; j1 <= K; ++j1) {
            const int j2 = j - j1;
            if (!inband(j2)) continue;
            const double x1 = X(j1), x2 = X(j2);
            const double pu = Phi1u(x1, x2), pv = Phiv(x1, x2);
            const cplx cu = ga * I * x * e(pu) * v(j1) * v(j2);
            const cplx cv = th * I * e(pv) * x2 * u(j1) * v(j2);
            o.coupling_u[j + K] += cu;
            o.coupling_v[j + K] += cv;
            o.N3u[j + K] += be * I * x * e(a * (-cube(x) + cube(x1) + cube(x2))) * u(j1) * u(j2);
            if (U(j, j1)) {
                o.Bu[j + K] += ga * x * e(pu) / pu * v(j1) * v(j2);
                for (int j11 = -K; j11 <= K; ++j11) {
                    const int j12 = j1 - j11;
                    if (!inband(j12)) continue;
                    const double x11 = X(j11), x12 = X(j12);
                    const double psi = -a * cube(x) + cube(x2) + a * cube(x11) + cube(x12);
                    o.N1u[j + K] += -ga * x / pu * e(psi) * th * I * x12 * u(j11) * v(j12) * v(j2);
                }
                for (int j21 = -K; j21 <= K; ++j21) {
                    const int j22 = j2 - j21;
                    if (!inband(j22)) continue;
                    const double x21 = X(j21), x22 = X(j22);
                    const double psi = -a * cube(x) + cube(x1) + a * cube(x21) + cube(x22);
                    o.N2u[j + K] += -ga * x / pu * e(psi) * v(j1) * th * I * x22 * u(j21) * v(j22);
                }
            } else {
                o.N0u[j + K] += cu;
            }
            if (V(j, j1)) {
                o.Bv[j + K] += th * e(pv) / pv * x2 * u(j1) * v(j2);
                for (int j11 = -K; j11 <= K; ++j11) {
                    const int j12 = j1 - j11;
                    if (!inband(j12)) continue;
                    const double x11 = X(j11), x12 = X(j12);
                    const double psi1 = -cube(x) + cube(x2) + cube(x11) + cube(x12);
                    const double psi2 = -cube(x) + cube(x2) + a * cube(x11) + a * cube(x12);
                    o.N1v[j + K] += -th * x2 / pv * e(psi1) * ga * I * x1 * v(j11) * v(j12) * v(j2);
                    o.N2v[j + K] += -th * x2 / pv * e(psi2) * be * I * x1 * u(j11) * u(j12) * v(j2);
                }
                for (int j21 = -K; j21 <= K; ++j21) {
                    const int j22 = j2 - j21;
                    if (!inband(j22)) continue;
                    const double x21 = X(j21), x22 = X(j22);
                    const double psi = -cube(x) + a * cube(x1) + a * cube(x21) + cube(x22);
                    o.N3v[j + K] += -th * x2 / pv * u(j1) * e(psi) * th * I * x22 * u(j21) * v(j22);
                }
            } else {
                o.N0v[j + K] += cv;
            }
        }
    }
    return o;
}

// ---------------------------------------------------------------- fre

// FRE integral over |Phi - alpha| < M with x in [-X, X]: edges found by sign
// changes on a step-h scan and bisection, then Gauss-Kronrod on each piece.
// Pieces narrower than h can be missed.
inline double fre_brute(const hslab::FreSpec& spec, double a, double F, double alpha, double M, double X,
                        double h = 1e-4) {
    const auto c = hslab::phase_polynomial(spec, a, F);
    auto inside = [&](double x) {
        const double P = ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
        return M - std::abs(P - alpha);
    };
    auto edge = [&](double lo, double hi) {
        const bool lo_in = inside(lo) > 0;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            ((inside(mid) > 0) == lo_in ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::vector<double> cuts{-X};
    const long n = static_cast<long>(std::ceil(2 * X / h));
    for (long i = 0; i < n; ++i) {
        const double x0 = -X + i * h, x1 = x0 + h;
        if ((inside(x0) > 0) != (inside(x1) > 0)) cuts.push_back(edge(x0, x1));
    }
    cuts.push_back(X);
    double acc = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo) || inside(0.5 * (lo + hi)) <= 0) continue;
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double x) { return hslab::fre_integrand(spec, F, x); }, lo, hi, 15, 1e-13);
    }
    return acc;
}

// ---------------------------------------------------------------- measurements

inline double max_coeff_diff(const hslab::SimState& x, const hslab::SimState& y) {
    double m = 0;
    for (std::size_t i = 0; i < x.uhat.coeffs.size(); ++i) {
        m = std::max(m, std::abs(x.uhat.coeffs[i] - y.uhat.coeffs[i]));
        m = std::max(m, std::abs(x.vhat.coeffs[i] - y.vhat.coeffs[i]));
    }
    return m;
}

// Observed temporal order from runs at dt, dt/2, dt/4 (Richardson self-convergence).
inline double convergence_order(const hslab::SimState& s0, double T, double dt) {
    hslab::SolverConfig c;
    std::vector<hslab::SimState> runs;
    for (double h : {dt, dt / 2, dt / 4}) {
        c.dt = h;
        runs.push_back(hslab::integrate(s0, c, T));
    }
    return std::log2(max_coeff_diff(runs[0], runs[1]) / max_coeff_diff(runs[1], runs[2]));
}

// Relative drift of the mass over [0, T].
inline double mass_drift(const hslab::SimState& s0, double T, double dt) {
    hslab::SolverConfig c;
    c.dt = dt;
    const auto m0 = hslab::invariants_eval(s0).M;
    const auto m1 = hslab::invariants_eval(hslab::integrate(s0, c, T)).M;
    return std::abs(m1 - m0) / std::abs(m0);
}

} // namespace oracle
