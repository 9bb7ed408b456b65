#include "hslab/picard.hpp"
#include "hslab/errors.hpp"
#include "hslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace hslab {

namespace {

constexpr cplx I{0.0, 1.0};

double jbracket(double xi) { return std::sqrt(1.0 + xi * xi); }

// Minimal vector type so integrate_gl can carry two accumulators at once.
struct CPair {
    cplx first, second;
    CPair& operator+=(const CPair& o) {
        first += o.first;
        second += o.second;
        return *this;
    }
    friend CPair operator*(double w, const CPair& p) { return {w * p.first, w * p.second}; }
    friend CPair operator*(const CPair& p, double w) { return w * p; }
};

void require_window(Window w) {
    if (!(w.hi > w.lo) || !std::isfinite(w.lo) || !std::isfinite(w.hi)) throw DomainError("output window needs lo < hi");
}

template <class F>
PicardOutput sample(Window w, double t, int count, F&& at) {
    require_window(w);
    PicardOutput out;
    out.t = t;
    out.xi_samples = uniform_samples(w, count);
    out.values.assign(out.xi_samples.size(), cplx{});
    parallel_for(out.xi_samples.size(), [&](std::size_t i) { out.values[i] = at(out.xi_samples[i]); });
    return out;
}

} // namespace

cplx FrequencyBox::amplitude(double xi) const {
    if (xi < lo || xi > hi) return 0.0;
    if (weight_exponent == 0.0) return coefficient;
    return coefficient * std::pow(jbracket(xi), -weight_exponent);
}

void BoxData::validate() const {
    auto all = expanded();
    for (const auto& b : all)
        if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi))
            throw DomainError("frequency box needs finite lo < hi");
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i].lo < all[i - 1].hi) throw DomainError("frequency boxes overlap");
}

std::vector<FrequencyBox> BoxData::expanded() const {
    std::vector<FrequencyBox> out = boxes;
    if (conjugate_symmetric)
        for (const auto& b : boxes) out.push_back({-b.hi, -b.lo, b.weight_exponent, std::conj(b.coefficient)});
    return out;
}

cplx BoxData::eval(double xi) const {
    cplx acc = 0.0;
    for (const auto& b : expanded()) acc += b.amplitude(xi);
    return acc;
}

BoxData BoxData::scaled(cplx alpha) const {
    BoxData out = *this;
    for (auto& b : out.boxes) b.coefficient *= alpha;
    return out;
}

cplx duhamel_kernel(double phi, double t) {
    const double z = t * phi;
    if (std::abs(z) < 1e-4) return t * cplx(1.0 - z * z / 6.0, z / 2.0 - z * z * z / 24.0);
    // (e^{iz}-1)/(iz) = sin z / z + i (1 - cos z)/z, written without cancellation
    const double h = std::sin(0.5 * z);
    return t * cplx(std::sin(z) / z, 2.0 * h * h / z);
}

cplx second_iterate_v_at(const BoxData& u0, const BoxData& v0, double a, double t, double xi, int nodes) {
    if (a == 0.0) throw DomainError("a = 0 is excluded");
    if (t == 0.0 || u0.empty() || v0.empty()) return 0.0;
    cplx acc = 0.0;
    for (const auto& bu : u0.expanded())
        for (const auto& bv : v0.expanded()) {
            const double lo = std::max(bu.lo, xi - bv.hi);
            const double hi = std::min(bu.hi, xi - bv.lo);
            acc += integrate_gl(
                [&](double x1) {
                    const double x2 = xi - x1;
                    return x2 * duhamel_kernel(phiv(a, x1, x2), t) * bu.amplitude(x1) * bv.amplitude(x2);
                },
                lo, hi, nodes);
        }
    return I * std::polar(1.0, t * xi * xi * xi) * acc;
}

cplx second_iterate_u_at(const BoxData& v0, double a, double t, double xi, int nodes) {
    if (a == 0.0) throw DomainError("a = 0 is excluded");
    if (t == 0.0 || v0.empty()) return 0.0;
    cplx acc = 0.0;
    const auto boxes = v0.expanded();
    for (const auto& b1 : boxes)
        for (const auto& b2 : boxes) {
            const double lo = std::max(b1.lo, xi - b2.hi);
            const double hi = std::min(b1.hi, xi - b2.lo);
            acc += integrate_gl(
                [&](double x1) {
                    const double x2 = xi - x1;
                    return xi * duhamel_kernel(phi1u(a, x1, x2), t) * b1.amplitude(x1) * b2.amplitude(x2);
                },
                lo, hi, nodes);
        }
    return I * std::polar(1.0, a * t * xi * xi * xi) * acc;
}

std::pair<cplx, cplx> third_kernel_terms(double a, double t, double x11, double x12, double x2) {
    const double x1 = x11 + x12;
    const double p1 = phi1u(a, x11, x12);
    const double pv = phiv(a, x1, x2);
    const double th = p1 + pv;  // Theta(xi2, xi11, xi12)
    const cplx first = duhamel_kernel(th, t) / (I * p1);
    const cplx second = I * duhamel_kernel(pv, t) / p1;
    return {first, second};
}

std::pair<cplx, cplx> third_iterate_v_parts_at(const BoxData& v0, double a, double t, double xi,
                                               const PicardOptions& opt) {
    if (a == 0.0) throw DomainError("a = 0 is excluded");
    if (t == 0.0 || v0.empty()) return {0.0, 0.0};
    const auto boxes = v0.expanded();
    const cplx rot = -std::polar(1.0, t * xi * xi * xi);
    cplx acc1 = 0.0, acc2 = 0.0;
    for (const auto& A : boxes)
        for (const auto& B : boxes)
            for (const auto& C : boxes) {
                // xi12 in B and xi2 = xi - xi11 - xi12 in C
                const double lo11 = std::max(A.lo, xi - C.hi - B.hi);
                const double hi11 = std::min(A.hi, xi - C.lo - B.lo);
                if (!(hi11 > lo11)) continue;
                std::vector<double> cuts{lo11, hi11};
                for (double c : {xi - C.hi - B.lo, xi - C.lo - B.hi})
                    if (c > lo11 && c < hi11) cuts.push_back(c);
                std::sort(cuts.begin(), cuts.end());

                // both kernel pieces ride along as one vector-valued integrand
                auto inner = [&](double x11) {
                    const double lo12 = std::max(B.lo, xi - x11 - C.hi);
                    const double hi12 = std::min(B.hi, xi - x11 - C.lo);
                    const cplx va = A.amplitude(x11);
                    return integrate_gl(
                        [&](double x12) {
                            const double x2 = xi - x11 - x12;
                            const double x1 = x11 + x12;
                            const double p1 = phi1u(a, x11, x12);
                            const double pv = phiv(a, x1, x2);
                            if (std::abs(p1) < opt.min_phase || std::abs(pv) < opt.min_phase) {
                                std::ostringstream msg;
                                msg << "third iterate: phase below floor " << opt.min_phase << " at node (xi11, xi12, xi2) = ("
                                    << x11 << ", " << x12 << ", " << x2 << "), Phi1u = " << p1 << ", Phiv = " << pv;
                                throw NumericalError(msg.str());
                            }
                            const auto [k1, k2] = third_kernel_terms(a, t, x11, x12, x2);
                            const cplx w = x1 * x2 * va * B.amplitude(x12) * C.amplitude(x2);
                            return CPair{w * k1, w * k2};
                        },
                        lo12, hi12, opt.nodes);
                };
                for (std::size_t c = 1; c < cuts.size(); ++c) {
                    const CPair r = integrate_gl(inner, cuts[c - 1], cuts[c], opt.nodes);
                    acc1 += r.first;
                    acc2 += r.second;
                }
            }
    return {rot * acc1, rot * acc2};
}

cplx third_iterate_v_at(const BoxData& v0, double a, double t, double xi, const PicardOptions& opt) {
    const auto [p1, p2] = third_iterate_v_parts_at(v0, a, t, xi, opt);
    return p1 + p2;
}

PicardOutput second_iterate_v(const BoxData& u0, const BoxData& v0, double a, double t, Window out,
                              const PicardOptions& opt) {
    u0.validate();
    v0.validate();
    return sample(out, t, opt.samples, [&](double xi) { return second_iterate_v_at(u0, v0, a, t, xi, opt.nodes); });
}

PicardOutput second_iterate_u(const BoxData& v0, double a, double t, Window out, const PicardOptions& opt) {
    v0.validate();
    return sample(out, t, opt.samples, [&](double xi) { return second_iterate_u_at(v0, a, t, xi, opt.nodes); });
}

PicardOutput third_iterate_v(const BoxData& v0, double a, double t, Window out, const PicardOptions& opt) {
    v0.validate();
    return sample(out, t, opt.samples, [&](double xi) { return third_iterate_v_at(v0, a, t, xi, opt); });
}

std::vector<double> uniform_samples(Window w, int count) {
    if (count < 2) throw DomainError("need at least two output samples");
    std::vector<double> x(count);
    for (int i = 0; i < count; ++i) x[i] = w.lo + (w.hi - w.lo) * i / (count - 1);
    x.back() = w.hi;
    return x;
}

double hs_norm_window(const PicardOutput& out, double s, Window w) {
    require_window(w);
    const auto& xs = out.xi_samples;
    if (xs.size() < 2 || xs.size() != out.values.size()) throw DomainError("malformed Picard output");
    const double slack = 1e-12 * std::max(1.0, std::abs(xs.front()) + std::abs(xs.back()));
    if (w.lo < xs.front() - slack || w.hi > xs.back() + slack)
        throw DomainError("norm window lies outside the sampled range");

    auto density = [&](std::size_t i) { return std::pow(1.0 + xs[i] * xs[i], s) * std::norm(out.values[i]); };
    // linear interpolation of the density at the window ends
    auto at = [&](double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t j = std::clamp<std::size_t>(it - xs.begin(), 1, xs.size() - 1);
        const double f = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return (1.0 - f) * density(j - 1) + f * density(j);
    };
    std::vector<double> px{std::max(w.lo, xs.front())}, py{at(px[0])};
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > px[0] && xs[i] < w.hi) {
            px.push_back(xs[i]);
            py.push_back(density(i));
        }
    const double end = std::min(w.hi, xs.back());
    if (end > px.back()) {
        px.push_back(end);
        py.push_back(at(end));
    }
    return std::sqrt(std::max(0.0, trapezoid(px, py)));
}

void write_picard_csv(std::ostream& os, const PicardOutput& out) {
    os << "xi,re,im\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < out.xi_samples.size(); ++i)
        os << out.xi_samples[i] << ',' << out.values[i].real() << ',' << out.values[i].imag() << '\n';
    os.precision(old);
}

} // namespace hslab
