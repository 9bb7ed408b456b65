#pragma once

#include "hslab/phases.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hslab {

enum class Multiplier { Xi, Xi2 };  // |m| = |xi| for d_x(v^2), |xi2| for u v_x
enum class FixedVar { Xi, Xi1, Xi2 };

std::string_view multiplier_name(Multiplier m);
std::string_view fixed_var_name(FixedVar f);

// Weighted bilinear integrand |m|^2 <xi>^{2 s_out} / (<xi1>^{2 s1} <xi2>^{2 s2})
// restricted to |Phi - alpha| < M, with one frequency held fixed.
struct FreSpec {
    Multiplier multiplier = Multiplier::Xi;
    double s_out = 0.0, s1 = 0.0, s2 = 0.0;
    PhaseId phase = PhaseId::Phi1u;
    FixedVar fixed = FixedVar::Xi;
    double alpha_exponent = 0.99;  // <alpha>^{1-} in ratios
    void validate() const;
};

// d_x(v1 v2) from H^s x H^s into H^k, and u v_x from H^k x H^s into H^s.
FreSpec fre_spec_dxv2(double k, double s, FixedVar fixed = FixedVar::Xi);
FreSpec fre_spec_uvx(double k, double s, FixedVar fixed = FixedVar::Xi);

// |{q : |q^2 - alpha| < M}|, closed form.
double level_set_measure(double alpha, double M);

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, polished by Newton.
// Lower degree when leading coefficients vanish; throws NumericalError with the
// coefficients when polishing fails.
std::vector<double> real_roots(const std::array<double, 4>& c);

struct Interval {
    double lo, hi;
};

// Phase as a polynomial in the integration variable once the fixed frequency is set.
std::array<double, 4> phase_polynomial(const FreSpec& spec, double a, double fixed_value);
// {x : |Phi(x) - alpha| < M} as disjoint sorted intervals.
std::vector<Interval> level_set_intervals(const FreSpec& spec, double a, double fixed_value, double alpha, double M);
double fre_integrand(const FreSpec& spec, double fixed_value, double x);
double fre_integral(const FreSpec& spec, double a, double fixed_value, double alpha, double M);

// Fixed-frequency grid: 0, a few small values, then log-spaced up to Lambda, both signs.
std::vector<double> fixed_grid(double Lambda, int points_per_decade);

double fre_sup(const FreSpec& spec, double a, double alpha, double M, double Lambda, int points_per_decade = 40);

struct ScanOptions {
    std::vector<double> alphas{0.0, 10.0, -10.0, 100.0, -100.0};
    std::vector<double> Ms{1.0, 10.0};
    int points_per_decade = 40;
    // also try alpha = Phi at probe points, so alpha ~ |xi|^3 regimes are seen
    bool track_phase = true;
};

struct ScanReport {
    std::vector<double> ladder;
    std::vector<double> sup_values;  // max over grid of integral / (<alpha>^e M)
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double ratio = 0.0;  // sup_values at the largest cutoff
};

ScanReport ratio_scan(const FreSpec& spec, double a, std::span<const double> ladder, const ScanOptions& opt = {});

// Space-time box: xi in [xi_lo, xi_hi], tau - curve xi^3 in [tau_lo, tau_hi].
struct SpaceTimeBox {
    double xi_lo = 0.0, xi_hi = 1.0;
    double curve = 0.0;
    double tau_lo = 0.0, tau_hi = 1.0;
    double measure() const { return (xi_hi - xi_lo) * (tau_hi - tau_lo); }
    bool contains(double xi, double tau) const;
};

enum class DualForm { VVtoU, UVtoV };

struct DualWeights {
    double k = 0.0, s = 0.0;
    double b = 0.51, bprime = -0.48;
};

struct DualEstimate {
    double value = 0.0;      // integral / (|h| |h1| |h2|)
    double std_error = 0.0;
    std::size_t samples = 0;
    double hit_fraction = 0.0;
};

// Stratified Monte Carlo over h1 x h2; h is tested at (xi1 + xi2, tau1 + tau2).
DualEstimate dual_form_estimate(const SpaceTimeBox& h, const SpaceTimeBox& h1, const SpaceTimeBox& h2, double a,
                                const DualWeights& w, DualForm which, std::size_t samples = 200000,
                                std::uint64_t seed = 1);

// Box triples from the sharpness propositions for the bilinear estimates.
struct DualBoxes {
    SpaceTimeBox h, h1, h2;
};
DualBoxes dual_boxes_vv_case1(double N);  // xi ~ xi1 obstruction for d_x(v^2)
DualBoxes dual_boxes_uv_case1(double N);  // xi ~ xi1 obstruction for u v_x

} // namespace hslab
