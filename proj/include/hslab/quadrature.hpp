#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hslab {

// Nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

// Cached per order; safe to call from several threads.
const GaussLegendre& gauss_legendre(int order);

// sum_i w_i f(x_i) on [lo, hi]; zero when hi <= lo.
template <class F>
auto integrate_gl(F&& f, double lo, double hi, int order) -> decltype(f(lo)) {
    using R = decltype(f(lo));
    R acc{};
    if (!(hi > lo)) return acc;
    const auto& g = gauss_legendre(order);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < g.x.size(); ++i) acc += g.w[i] * f(mid + half * g.x[i]);
    return acc * half;
}

// Runs body(i) for i in [0, n) on up to hardware_concurrency threads. Exceptions
// from workers are rethrown on the caller (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Trapezoid rule on samples (x strictly increasing).
double trapezoid(std::span<const double> x, std::span<const double> y);

// Least-squares line y = slope x + intercept with r^2.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace hslab
