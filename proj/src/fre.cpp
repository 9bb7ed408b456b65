#include "hslab/fre.hpp"
#include "hslab/errors.hpp"
#include "hslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace hslab {

namespace {

double jb(double x) { return std::sqrt(1.0 + x * x); }

// (p, q) with frequency = p + q x for xi, xi1, xi2 in that order
std::array<std::array<double, 2>, 3> affine_frequencies(FixedVar f, double F) {
    switch (f) {
    case FixedVar::Xi: return {{{F, 0.0}, {0.0, 1.0}, {F, -1.0}}};
    case FixedVar::Xi1: return {{{F, 1.0}, {F, 0.0}, {0.0, 1.0}}};
    case FixedVar::Xi2: return {{{F, 1.0}, {0.0, 1.0}, {F, 0.0}}};
    }
    throw DomainError("bad fixed variable");
}

std::array<double, 3> phase_weights(PhaseId id, double a) {
    switch (id) {
    case PhaseId::Phi1u: return {-a, 1.0, 1.0};
    case PhaseId::Phi2u: return {-a, a, a};
    case PhaseId::Phiv: return {-1.0, a, 1.0};
    default: throw DomainError("FRE scans need a two-frequency phase");
    }
}

double horner(const std::array<double, 4>& c, double x) { return ((c[3] * x + c[2]) * x + c[1]) * x + c[0]; }
double horner_d(const std::array<double, 4>& c, double x) { return (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1]; }

std::string describe(const std::array<double, 4>& c) {
    std::ostringstream os;
    os.precision(17);
    os << c[3] << " x^3 + " << c[2] << " x^2 + " << c[1] << " x + " << c[0];
    return os.str();
}

double polish(const std::array<double, 4>& c, double x) {
    for (int it = 0; it < 60; ++it) {
        const double f = horner(c, x), d = horner_d(c, x);
        if (f == 0.0 || d == 0.0) break;
        const double dx = f / d;
        if (!std::isfinite(dx)) break;
        x -= dx;
        if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

std::vector<double> quadratic_roots(double A, double B, double C) {
    std::vector<double> r;
    if (A == 0.0) {
        if (B != 0.0) r.push_back(-C / B);
        return r;
    }
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) {
        // near-tangent: keep the double root if the residual says so
        const double x = -B / (2.0 * A);
        if (std::abs(disc) <= 1e-14 * B * B) r.push_back(x);
        return r;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + std::copysign(sq, B));
    if (q != 0.0) {
        r.push_back(q / A);
        r.push_back(C / q);
    } else {
        r.push_back(0.0);
    }
    return r;
}

} // namespace

std::string_view multiplier_name(Multiplier m) { return m == Multiplier::Xi ? "xi" : "xi2"; }

std::string_view fixed_var_name(FixedVar f) {
    switch (f) {
    case FixedVar::Xi: return "xi";
    case FixedVar::Xi1: return "xi1";
    case FixedVar::Xi2: return "xi2";
    }
    return "?";
}

void FreSpec::validate() const {
    if (arity(phase) != 2) throw DomainError("FRE phase must have arity 2");
    for (double w : {s_out, s1, s2, alpha_exponent})
        if (!std::isfinite(w)) throw DomainError("FRE weights must be finite");
}

FreSpec fre_spec_dxv2(double k, double s, FixedVar fixed) {
    return FreSpec{Multiplier::Xi, k, s, s, PhaseId::Phi1u, fixed, 0.99};
}

FreSpec fre_spec_uvx(double k, double s, FixedVar fixed) {
    return FreSpec{Multiplier::Xi2, s, k, s, PhaseId::Phiv, fixed, 0.99};
}

double level_set_measure(double alpha, double M) {
    if (!(M > 0.0)) throw DomainError("level set needs M > 0");
    const double hi = alpha + M;
    if (hi <= 0.0) return 0.0;
    const double lo = std::max(0.0, alpha - M);
    return 2.0 * (std::sqrt(hi) - std::sqrt(lo));
}

std::vector<double> real_roots(const std::array<double, 4>& c) {
    const double scale = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]) + std::abs(c[3]);
    if (scale == 0.0) throw DomainError("zero polynomial has no isolated roots");
    std::vector<double> roots;
    if (c[3] == 0.0) {
        roots = quadratic_roots(c[2], c[1], c[0]);
    } else {
        // depressed cubic t^3 + p t + q with x = t - b/3
        const double b = c[2] / c[3], cc = c[1] / c[3], d = c[0] / c[3];
        const double p = cc - b * b / 3.0;
        const double q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
        const double shift = -b / 3.0;
        const double disc = q * q / 4.0 + p * p * p / 27.0;
        if (p == 0.0 && q == 0.0) {
            roots.push_back(shift);
        } else if (disc > 0.0) {
            const double sq = std::sqrt(disc);
            const double u = std::cbrt(-q / 2.0 + sq), v = std::cbrt(-q / 2.0 - sq);
            roots.push_back(u + v + shift);
        } else {
            const double r = std::sqrt(-p / 3.0);
            const double arg = std::clamp(3.0 * q / (2.0 * p * r), -1.0, 1.0);
            const double phi = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k)
                roots.push_back(2.0 * r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift);
        }
    }
    for (auto& x : roots) {
        x = polish(c, x);
        if (!std::isfinite(x)) throw NumericalError("root isolation failed for " + describe(c));
        // accept when the remaining Newton correction is negligible in x
        const double f = horner(c, x), d = horner_d(c, x);
        const bool ok = f == 0.0 || (d != 0.0 && std::abs(f / d) <= 1e-8 * std::max(1.0, std::abs(x))) ||
                        std::abs(f) <= 1e-12 * scale * std::max(1.0, std::abs(x * x * x));
        if (!ok) throw NumericalError("root isolation failed for " + describe(c));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

std::array<double, 4> phase_polynomial(const FreSpec& spec, double a, double F) {
    const auto w = phase_weights(spec.phase, a);
    const auto fr = affine_frequencies(spec.fixed, F);
    std::array<double, 4> c{0, 0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        const double p = fr[i][0], q = fr[i][1];
        c[0] += w[i] * p * p * p;
        c[1] += w[i] * 3.0 * p * p * q;
        c[2] += w[i] * 3.0 * p * q * q;
        c[3] += w[i] * q * q * q;
    }
    return c;
}

std::vector<Interval> level_set_intervals(const FreSpec& spec, double a, double F, double alpha, double M) {
    if (!(M > 0.0)) throw DomainError("level set needs M > 0");
    const auto c = phase_polynomial(spec, a, F);
    if (c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0) {
        if (std::abs(c[0] - alpha) < M) throw DomainError("level set is unbounded for this fixed frequency");
        return {};
    }
    std::vector<double> cuts;
    for (double target : {alpha + M, alpha - M}) {
        auto cc = c;
        cc[0] -= target;
        for (double r : real_roots(cc)) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Interval> out;
    auto inside = [&](double x) { return std::abs(horner(c, x) - alpha) < M; };
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double lo = cuts[i - 1], hi = cuts[i];
        if (!(hi > lo)) continue;
        if (!inside(0.5 * (lo + hi))) continue;
        if (!out.empty() && out.back().hi == lo) out.back().hi = hi;
        else out.push_back({lo, hi});
    }
    return out;
}

double fre_integrand(const FreSpec& spec, double F, double x) {
    const auto fr = affine_frequencies(spec.fixed, F);
    const double xi = fr[0][0] + fr[0][1] * x;
    const double x1 = fr[1][0] + fr[1][1] * x;
    const double x2 = fr[2][0] + fr[2][1] * x;
    const double m = spec.multiplier == Multiplier::Xi ? xi : x2;
    return m * m * std::pow(jb(xi), 2.0 * spec.s_out) * std::pow(jb(x1), -2.0 * spec.s1) *
           std::pow(jb(x2), -2.0 * spec.s2);
}

double fre_integral(const FreSpec& spec, double a, double F, double alpha, double M) {
    spec.validate();
    {
        // xi = 0 makes Phi1u vanish identically; the xi multiplier kills it too
        const auto c = phase_polynomial(spec, a, F);
        const auto fr = affine_frequencies(spec.fixed, F);
        const auto& m = spec.multiplier == Multiplier::Xi ? fr[0] : fr[2];
        if (c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0 && m[0] == 0.0 && m[1] == 0.0) return 0.0;
    }
    double acc = 0.0;
    for (const auto& iv : level_set_intervals(spec, a, F, alpha, M)) {
        // weights vary on the scale of the smallest frequency bracket
        const auto fr = affine_frequencies(spec.fixed, F);
        double scale = std::numeric_limits<double>::infinity();
        for (const auto& f : fr)
            for (double x : {iv.lo, iv.hi}) scale = std::min(scale, jb(f[0] + f[1] * x));
        const double len = iv.hi - iv.lo;
        const int panels = static_cast<int>(std::clamp(std::ceil(len / (0.25 * scale)), 1.0, 4000.0));
        const double hpan = len / panels;
        for (int p = 0; p < panels; ++p)
            acc += integrate_gl([&](double x) { return fre_integrand(spec, F, x); }, iv.lo + p * hpan,
                                p + 1 == panels ? iv.hi : iv.lo + (p + 1) * hpan, 16);
    }
    return acc;
}

std::vector<double> fixed_grid(double Lambda, int ppd) {
    if (!(Lambda >= 1.0)) throw DomainError("cutoff must be at least 1");
    if (ppd < 1) throw DomainError("need at least one grid point per decade");
    std::vector<double> g{0.0, 0.25, -0.25, 0.5, -0.5};
    const int n = static_cast<int>(std::ceil(std::log10(Lambda) * ppd));
    for (int i = 0; i <= n; ++i) {
        const double v = std::min(Lambda, std::pow(10.0, static_cast<double>(i) / ppd));
        g.push_back(v);
        g.push_back(-v);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

double fre_sup(const FreSpec& spec, double a, double alpha, double M, double Lambda, int ppd) {
    if (!(Lambda > 0.0) || !(M > 0.0)) throw DomainError("fre_sup needs Lambda > 0 and M > 0");
    double best = 0.0;
    for (double F : fixed_grid(std::max(1.0, Lambda), ppd))
        if (std::abs(F) <= Lambda) best = std::max(best, fre_integral(spec, a, F, alpha, M));
    return best;
}

ScanReport ratio_scan(const FreSpec& spec, double a, std::span<const double> ladder, const ScanOptions& opt) {
    spec.validate();
    if (ladder.size() < 3) throw DomainError("ratio scan needs at least three cutoffs");
    for (std::size_t i = 0; i < ladder.size(); ++i)
        if (!(ladder[i] >= 1.0) || (i > 0 && !(ladder[i] > ladder[i - 1])))
            throw DomainError("ratio scan cutoffs must be increasing and >= 1");
    const double Lmax = ladder.back();
    const auto grid = fixed_grid(Lmax, opt.points_per_decade);

    // best ratio per fixed value; the ladder then takes prefix maxima over |F|
    std::vector<double> best(grid.size(), 0.0);
    std::vector<double> probes{-2.0, -1.5, -1.0, -0.75, -0.5, -0.25, 0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 2.0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double F = grid[g];
        std::vector<double> alphas = opt.alphas;
        if (opt.track_phase) {
            const auto c = phase_polynomial(spec, a, F);
            const auto fr = affine_frequencies(spec.fixed, F);
            std::vector<double> xs;
            for (double r : probes) xs.push_back(r * F);
            // place each free frequency near a few small values
            for (const auto& f : fr)
                if (f[1] != 0.0)
                    for (double target : {-2.0, -1.0, 0.5, 1.0, 2.0}) xs.push_back((target - f[0]) / f[1]);
            for (double x : xs) alphas.push_back(horner(c, x));
        }
        for (double alpha : alphas)
            for (double M : opt.Ms) {
                const double val = fre_integral(spec, a, F, alpha, M);
                const double r = val / (std::pow(jb(alpha), spec.alpha_exponent) * M);
                best[g] = std::max(best[g], r);
            }
    }

    ScanReport rep;
    rep.ladder.assign(ladder.begin(), ladder.end());
    std::vector<double> lx, ly;
    for (double L : ladder) {
        double s = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g)
            if (std::abs(grid[g]) <= L) s = std::max(s, best[g]);
        rep.sup_values.push_back(s);
        if (!(s > 0.0)) throw NumericalError("ratio scan found an empty level set at every grid point");
        lx.push_back(std::log(L));
        ly.push_back(std::log(s));
    }
    const LineFit f = fit_line(lx, ly);
    rep.slope = f.slope;
    rep.intercept = f.intercept;
    rep.r2 = f.r2;
    rep.ratio = rep.sup_values.back();
    return rep;
}

bool SpaceTimeBox::contains(double xi, double tau) const {
    if (xi < xi_lo || xi > xi_hi) return false;
    const double off = tau - curve * xi * xi * xi;
    return off >= tau_lo && off <= tau_hi;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

} // namespace

DualEstimate dual_form_estimate(const SpaceTimeBox& h, const SpaceTimeBox& h1, const SpaceTimeBox& h2, double a,
                                const DualWeights& w, DualForm which, std::size_t samples, std::uint64_t seed) {
    for (const auto* b : {&h, &h1, &h2})
        if (!(b->measure() > 0.0)) throw DomainError("dual form boxes need positive measure");
    constexpr int S = 16;  // strata per frequency axis
    const std::size_t per = std::max<std::size_t>(16, samples / (S * S));
    const double vol = h1.measure() * h2.measure();
    const double svol = vol / (S * S);

    double est = 0.0, var = 0.0;
    std::size_t hits = 0;
    for (int s1 = 0; s1 < S; ++s1)
        for (int s2 = 0; s2 < S; ++s2) {
            std::mt19937_64 rng(splitmix(seed * 1000003ULL + static_cast<std::uint64_t>(s1 * S + s2)));
            const double a1 = h1.xi_lo + (h1.xi_hi - h1.xi_lo) * s1 / S, w1 = (h1.xi_hi - h1.xi_lo) / S;
            const double a2 = h2.xi_lo + (h2.xi_hi - h2.xi_lo) * s2 / S, w2 = (h2.xi_hi - h2.xi_lo) / S;
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t i = 0; i < per; ++i) {
                const double x1 = a1 + w1 * unit(rng);
                const double x2 = a2 + w2 * unit(rng);
                const double t1 = h1.curve * x1 * x1 * x1 + h1.tau_lo + (h1.tau_hi - h1.tau_lo) * unit(rng);
                const double t2 = h2.curve * x2 * x2 * x2 + h2.tau_lo + (h2.tau_hi - h2.tau_lo) * unit(rng);
                const double x = x1 + x2, t = t1 + t2;
                double f = 0.0;
                if (h.contains(x, t)) {
                    ++hits;
                    if (which == DualForm::VVtoU) {
                        f = std::abs(x) * std::pow(jb(x), w.k) * std::pow(jb(t - a * x * x * x), w.bprime) /
                            (std::pow(jb(x1), w.s) * std::pow(jb(t1 - x1 * x1 * x1), w.b) * std::pow(jb(x2), w.s) *
                             std::pow(jb(t2 - x2 * x2 * x2), w.b));
                    } else {
                        f = std::abs(x2) * std::pow(jb(x), w.s) * std::pow(jb(t - x * x * x), w.bprime) /
                            (std::pow(jb(x1), w.k) * std::pow(jb(t1 - a * x1 * x1 * x1), w.b) * std::pow(jb(x2), w.s) *
                             std::pow(jb(t2 - x2 * x2 * x2), w.b));
                    }
                }
                sum += f;
                sum2 += f * f;
            }
            const double mean = sum / per;
            const double v = std::max(0.0, sum2 / per - mean * mean);
            est += svol * mean;
            var += svol * svol * v / per;
        }
    if (hits == 0) {
        // a constraint set of measure zero is an error only when the boxes could meet
        const bool sumset_meets = h1.xi_lo + h2.xi_lo <= h.xi_hi && h1.xi_hi + h2.xi_hi >= h.xi_lo;
        if (sumset_meets && h.xi_hi - h.xi_lo == 0.0) throw DomainError("zero-measure constraint set");
    }
    const double norm = std::sqrt(h.measure() * h1.measure() * h2.measure());
    DualEstimate out;
    out.value = est / norm;
    out.std_error = std::sqrt(var) / norm;
    out.samples = per * S * S;
    out.hit_fraction = static_cast<double>(hits) / static_cast<double>(out.samples);
    return out;
}

DualBoxes dual_boxes_vv_case1(double N) {
    const double N3 = N * N * N;
    return {SpaceTimeBox{N + 1, N + 3, 0.0, N3 - 2, N3}, SpaceTimeBox{N + 1, N + 2, 0.0, N3 - 2, N3 - 1},
            SpaceTimeBox{0, 1, 0.0, 0, 1}};
}

DualBoxes dual_boxes_uv_case1(double N) {
    const double N3 = N * N * N;
    return {SpaceTimeBox{N + 2, N + 4, 0.0, N3 - 2, N3}, SpaceTimeBox{N + 1, N + 2, 0.0, N3 - 1, N3},
            SpaceTimeBox{1, 2, 0.0, -1, 0}};
}

} // namespace hslab
