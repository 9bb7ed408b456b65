#pragma once

#include "hslab/phases.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace hslab {

// Amplitude coefficient * <xi>^{-weight_exponent} on [lo, hi], zero elsewhere.
struct FrequencyBox {
    double lo = 0.0;
    double hi = 1.0;
    double weight_exponent = 0.0;
    cplx coefficient{1.0, 0.0};

    cplx amplitude(double xi) const;
};

struct BoxData {
    std::vector<FrequencyBox> boxes;
    bool conjugate_symmetric = false;  // adds mirrored boxes f(-xi) = conj f(xi)

    void validate() const;
    std::vector<FrequencyBox> expanded() const;
    cplx eval(double xi) const;
    BoxData scaled(cplx alpha) const;
    bool empty() const { return boxes.empty(); }
};

struct Window {
    double lo = 0.0;
    double hi = 1.0;
};

struct PicardOutput {
    std::vector<double> xi_samples;
    std::vector<cplx> values;
    double t = 0.0;
};

struct PicardOptions {
    int nodes = 64;            // Gauss-Legendre nodes per box per dimension
    int samples = 256;         // uniform output samples across the window
    double min_phase = 1e-3;   // third iterate: |Phi| below this on a node is an error
};

// (e^{it phi} - 1)/(i phi), series below |t phi| < 1e-4.
cplx duhamel_kernel(double phi, double t);

// Single-frequency evaluations.
cplx second_iterate_v_at(const BoxData& u0, const BoxData& v0, double a, double t, double xi, int nodes = 64);
cplx second_iterate_u_at(const BoxData& v0, double a, double t, double xi, int nodes = 64);
cplx third_iterate_v_at(const BoxData& v0, double a, double t, double xi, const PicardOptions& opt = {});
// The third iterate split by kernel piece (see third_kernel_terms); the sum is third_iterate_v_at.
std::pair<cplx, cplx> third_iterate_v_parts_at(const BoxData& v0, double a, double t, double xi,
                                               const PicardOptions& opt = {});

PicardOutput second_iterate_v(const BoxData& u0, const BoxData& v0, double a, double t, Window out,
                              const PicardOptions& opt = {});
PicardOutput second_iterate_u(const BoxData& v0, double a, double t, Window out, const PicardOptions& opt = {});
PicardOutput third_iterate_v(const BoxData& v0, double a, double t, Window out, const PicardOptions& opt = {});

// The two pieces of the nested third-iterate time kernel at one node:
// first = (1/(i Phi1u_1)) int_0^t e^{i t' Theta}, second = (e^{i t Phiv} - 1)/(Phi1u_1 Phiv).
std::pair<cplx, cplx> third_kernel_terms(double a, double t, double xi11, double xi12, double xi2);

// sqrt of the trapezoid integral of <xi>^{2s}|I|^2 over the window; the window must
// lie inside the sample range.
double hs_norm_window(const PicardOutput& out, double s, Window w);

void write_picard_csv(std::ostream& os, const PicardOutput& out);

// Uniform samples across [lo, hi], both ends included.
std::vector<double> uniform_samples(Window w, int count);

} // namespace hslab
