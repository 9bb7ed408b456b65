#pragma once

#include "hslab/phases.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hslab {

// Periodic box of length L with n modes, xi_j = 2 pi j / L, j in [-n/2, n/2).
// Coefficient arrays are stored in FFT order: slot i holds j = i for i < n/2, j = i - n otherwise.
class Grid {
public:
    Grid(double L, int n);

    double L() const { return L_; }
    int n() const { return n_; }
    int wavenumber(int slot) const { return slot < n_ / 2 ? slot : slot - n_; }
    int slot(int j) const { return j >= 0 ? j : j + n_; }
    double xi(int slot) const { return dk_ * wavenumber(slot); }
    double x(int i) const { return L_ * i / n_; }
    std::vector<double> nodes() const;
    // Largest |j| kept by a dealias fraction f: |j| < f n / 2, Nyquist always dropped.
    int dealias_limit(double fraction) const;

private:
    double L_;
    int n_;
    double dk_;
};

bool operator==(const Grid& x, const Grid& y);

// f(x) = sum_j c_j exp(i xi_j x).
struct SpectralField {
    std::vector<cplx> coeffs;
    bool hermitian = true;
};

bool check_hermitian(std::span<const cplx> c, double rel_tol = 1e-12);

struct SimState {
    double t = 0.0;
    Grid grid{2.0 * 3.141592653589793, 8};
    SpectralField uhat;  // physical Fourier coefficients at time t
    SpectralField vhat;
    Coefficients params;
};

struct SolverConfig {
    double dt = 1e-4;
    double dealias_fraction = 2.0 / 3.0;
    bool nonlinear_enabled = true;  // off only for linear test runs
    int monitor_every = 100;
    // dt must satisfy dt <= stability_constant / (max|xi| max(|u|,|v|) max(|beta|,|gamma|,|theta|))
    double stability_constant = 0.5;
    void validate() const;
};

// Owns FFTW plans and buffers for one grid; not shared between threads.
class Transform {
public:
    explicit Transform(int n);
    ~Transform();
    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;
    Transform(Transform&&) noexcept;
    Transform& operator=(Transform&&) noexcept;

    // samples -> coefficients (scaled by 1/n)
    void forward(std::span<const cplx> in, std::span<cplx> out);
    // coefficients -> samples
    void backward(std::span<const cplx> in, std::span<cplx> out);
    int n() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SpectralField to_spectral(const Grid& g, std::span<const double> samples, Transform& tr);
std::vector<cplx> to_physical(const SpectralField& f, Transform& tr);

SimState make_state(const Grid& grid, std::span<const double> u0, std::span<const double> v0, const Coefficients& params);
SimState make_state(const Grid& grid, const std::function<double(double)>& u0,
                    const std::function<double(double)>& v0, const Coefficients& params);

// Zero every mode outside the dealias band.
void apply_dealias(SimState& s, double fraction);

// Physical-coefficient right side: (i xi F[beta u^2 + gamma v^2], F[theta u v_x]), masked.
struct Rhs {
    std::vector<cplx> u;
    std::vector<cplx> v;
};
Rhs rhs_physical(const SimState& s, double dealias_fraction, Transform& tr);
// Same, rotated into profile coordinates: multiplied by exp(-i a t xi^3), exp(-i t xi^3).
Rhs rhs_nonlinear(const SimState& s, double dealias_fraction, Transform& tr);
Rhs rhs_nonlinear(const SimState& s, double dealias_fraction = 2.0 / 3.0);

// Profiles at the state's time: exp(-i a t xi^3) uhat, exp(-i t xi^3) vhat.
SpectralField profile_u(const SimState& s);
SpectralField profile_v(const SimState& s);

// Largest stable dt under the documented bound.
double stability_dt(const SimState& s, const SolverConfig& cfg, Transform& tr);

// One integrating-factor RK4 step. Throws NumericalError on a stability-bound
// violation or more than 10x norm growth within the step.
SimState step(const SimState& s, const SolverConfig& cfg, Transform& tr);
SimState step(const SimState& s, const SolverConfig& cfg);

// Steps until t_end (last step shortened to land exactly). observer is called on
// the initial state and after every monitor_every steps and at the end.
SimState integrate(SimState s, const SolverConfig& cfg, double t_end,
                   const std::function<void(const SimState&)>& observer = {});

double sobolev_norm(const SpectralField& f, const Grid& g, double s);

struct Invariants {
    double mean_u = 0.0;
    cplx M;       // int theta u^2 - 2 gamma v^2
    cplx E;       // energy in the generalized form, see energy_conserved
    cplx E_literal; // uncorrected density (1-a)u_x^2 + gamma v_x^2 - 2(1-a)u^3 - gamma u v^2
};

// Requires hermitian fields; throws NumericalError otherwise.
Invariants invariants_eval(const SimState& s, Transform& tr);
Invariants invariants_eval(const SimState& s);
// True when the generalized energy is an exact invariant of the flow (beta = a theta).
bool energy_conserved(const Coefficients& c);

struct TrajectoryRow {
    double t;
    double norm_u;
    double norm_v;
    double mean_u;
    double M;
    double E;
};
TrajectoryRow trajectory_row(const SimState& s, double k, double sreg, Transform& tr);
void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRow> rows);

// Little-endian layout: double L, int64 n, double t, then n (re, im) pairs for u
// followed by n pairs for v, in FFT slot order.
void write_snapshot(std::ostream& os, const SimState& s);
SimState read_snapshot(std::istream& is, const Coefficients& params);

} // namespace hslab
